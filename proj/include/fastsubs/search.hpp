#pragma once

#include <cstdint>
#include <utility>

#include "fastsubs/alpha_index.hpp"
#include "fastsubs/scorer.hpp"
#include "fastsubs/ubqueue.hpp"

namespace fastsubs {

struct SearchStats {
  std::size_t pops = 0;        // root-level extractions, duplicates included
  std::size_t candidates = 0;  // distinct words scored
  LogProb final_sup = kAbsent;
  std::int64_t nanos = 0;
};

struct SearchOptions {
  CandidateFilter filter;
  BlockPolicy policy = BlockPolicy::kRoundRobin;
};

// Exact top-K substitutes by best-first search over the upper bound queue.
// Returns the same list as oracle_topk. Throws std::invalid_argument when
// q.k < 1.
std::pair<SubstituteList, SearchStats> fastsubs_topk(const NgramLM& lm, const AlphaIndex& index, const Query& q,
                                                     const SearchOptions& options = {});

}  // namespace fastsubs

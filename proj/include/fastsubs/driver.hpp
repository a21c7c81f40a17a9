#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fastsubs/alpha_index.hpp"
#include "fastsubs/search.hpp"
#include "fastsubs/synth.hpp"

namespace fastsubs {

// Batch substitute generation.
struct SubsOptions {
  std::size_t k = 10;
  bool oracle = false;
  bool include_unk = false;
  bool exclude_target = false;
  unsigned threads = 1;
  BlockPolicy policy = BlockPolicy::kRoundRobin;
};

// One output line per token of every non-empty input line:
//   sentence<TAB>token<TAB>word<TAB>sub score<TAB>sub score ...
// Sentence and token indices are 0-based; sentence counts input lines,
// blank ones included. Scores are log10 with six decimals. Blank lines
// produce a warning on `diag`. Output does not depend on `threads`.
// Returns the number of blank lines skipped.
std::size_t run_subs(const NgramLM& lm, const AlphaIndex& index, std::istream& in, std::ostream& out,
                     std::ostream& diag, const SubsOptions& options);

std::string format_subs_line(const Vocab& vocab, std::size_t sentence, std::size_t token, const std::string& word,
                             const SubstituteList& subs);

struct QueryPosition {
  std::size_t sentence = 0;
  std::size_t token = 0;

  friend bool operator==(const QueryPosition&, const QueryPosition&) = default;
};

// Distinct positions drawn uniformly without replacement, in corpus order.
// All positions when sample_size covers the corpus.
std::vector<QueryPosition> sample_positions(const Corpus& corpus, std::size_t sample_size, std::uint64_t seed);

// Parses a comma-separated K list. "V" or "all" stands for the number of
// eligible words. Throws std::invalid_argument on K < 1 or bad syntax.
std::vector<std::size_t> parse_k_list(const std::string& text, std::size_t eligible_words);

std::size_t eligible_count(const NgramLM& lm, const CandidateFilter& filter = {});

// Differential check of the search against the exhaustive oracle.
struct CheckOptions {
  std::vector<std::size_t> ks;
  std::size_t sample_size = 100;
  std::uint64_t seed = 1;
  CandidateFilter filter;
  BlockPolicy policy = BlockPolicy::kRoundRobin;
};

struct CheckReport {
  std::size_t queries = 0;
  std::size_t comparisons = 0;
  std::size_t mismatches = 0;
  // Human-readable description of the first mismatch, if any.
  std::string first_mismatch;

  bool ok() const { return mismatches == 0; }
};

// Stops at the first mismatch. Writes one summary line to `out`.
CheckReport run_check(const NgramLM& lm, const AlphaIndex& index, const Corpus& corpus, const CheckOptions& options,
                      std::ostream& out);

// Pop-count scaling measurement.
struct BenchOptions {
  std::vector<std::size_t> ks;
  std::size_t sample_size = 200;
  std::uint64_t seed = 1;
  CandidateFilter filter;
  BlockPolicy policy = BlockPolicy::kRoundRobin;
};

struct BenchRecord {
  std::size_t vocab = 0;
  std::size_t k = 0;
  std::size_t query = 0;
  std::size_t pops = 0;
  std::int64_t nanos = 0;
};

struct BenchSummary {
  std::vector<BenchRecord> records;
  std::vector<std::size_t> ks;
  std::vector<double> mean_pops;  // parallel to ks
  std::optional<double> slope;    // least squares of log mean pops on log K

  double mean_pops_at(std::size_t k) const;
};

// Writes the CSV header "V,K,query,pops,nanos", one row per (K, query),
// then '#'-prefixed summary lines.
BenchSummary run_bench(const NgramLM& lm, const AlphaIndex& index, const Corpus& corpus, const BenchOptions& options,
                       std::ostream& out);

// Least-squares slope of log(y) against log(x). Needs two distinct x.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fastsubs

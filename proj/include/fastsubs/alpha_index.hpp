#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fastsubs/lm.hpp"

namespace fastsubs {

// Placeholder for the candidate position inside an n-gram pattern.
inline constexpr WordId kHole = 0xfffffffeu;

struct AlphaItem {
  WordId word;
  LogProb alpha;
};

// An n-gram pattern with exactly one open position. The pattern length is
// context.size() + 1 and hole is the index of the open slot.
struct HoleContext {
  std::vector<WordId> context;
  std::size_t hole = 0;

  // The pattern with kHole spliced in at the open slot.
  std::vector<WordId> pattern() const;
};

// Pre-sorted candidate lists, one per hole context: for every stored n-gram
// g with finite alpha and every position p in g, the list for (g minus p, p)
// holds (g[p], alpha(g)). Lists are ordered by alpha descending, then id
// ascending. Built once per model and shared read-only by all queries.
class AlphaIndex {
 public:
  explicit AlphaIndex(const NgramLM& lm);

  int order() const { return static_cast<int>(lists_.size()); }

  // `pattern` contains kHole exactly once. Unknown patterns give an empty list.
  std::span<const AlphaItem> list(std::span<const WordId> pattern) const;
  std::span<const AlphaItem> list(const HoleContext& ctx) const;

  // Upper bound on beta(pattern with any word in the hole). Unobserved
  // sequences have beta 0, so the bound is never below 0.
  LogProb beta_bound(std::span<const WordId> pattern) const;

  std::size_t total_pairs() const { return items_.size(); }
  std::size_t context_count(int k) const { return lists_.at(static_cast<std::size_t>(k - 1)).keys.size(); }

  // Visits every (pattern, list) pair of pattern length k.
  template <typename Fn>
  void for_each_list(int k, Fn&& fn) const {
    const Lists& l = lists_.at(static_cast<std::size_t>(k - 1));
    for (std::uint32_t i = 0; i < l.keys.size(); ++i) {
      fn(l.keys.key(i), std::span<const AlphaItem>(items_.data() + l.offsets[i], items_.data() + l.offsets[i + 1]));
    }
  }

  // Fault injection for differential checking: shifts every stored alpha,
  // which makes the queue bounds wrong while keeping list order intact.
  void corrupt_for_testing(LogProb shift);

 private:
  struct Lists {
    explicit Lists(std::size_t width) : keys(width) {}
    NgramTable keys;
    std::vector<std::size_t> offsets;
  };
  struct BetaBounds {
    explicit BetaBounds(std::size_t width) : keys(width) {}
    NgramTable keys;
    std::vector<LogProb> bound;
  };

  std::vector<Lists> lists_;
  std::vector<BetaBounds> betas_;
  std::vector<AlphaItem> items_;
};

}  // namespace fastsubs

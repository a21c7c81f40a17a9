#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fastsubs/alpha_index.hpp"
#include "fastsubs/scorer.hpp"

namespace fastsubs {

// Upper bound queue. Elements come out of pop() in no particular order,
// but no element still inside ever scores above sup(), and sup() never
// increases. top() and pop() return kNoWord when nothing can be popped.
class UBQueue {
 public:
  virtual ~UBQueue() = default;

  virtual LogProb sup() const = 0;
  virtual WordId top() const = 0;
  virtual WordId pop() = 0;

  // Bound computed from scratch, ignoring any cached child values.
  virtual LogProb recompute_sup() const = 0;
};

// Cursor over a shared pre-sorted alpha list. The bound is exact.
class AlphaQueue final : public UBQueue {
 public:
  explicit AlphaQueue(std::span<const AlphaItem> items) : items_(items) {}

  LogProb sup() const override { return cursor_ < items_.size() ? items_[cursor_].alpha : kAbsent; }
  WordId top() const override { return cursor_ < items_.size() ? items_[cursor_].word : kNoWord; }
  WordId pop() override;
  LogProb recompute_sup() const override { return sup(); }

  std::size_t popped() const { return cursor_; }
  std::size_t remaining() const { return items_.size() - cursor_; }

 private:
  std::span<const AlphaItem> items_;
  std::size_t cursor_ = 0;
};

// A term that does not depend on the candidate.
class ConstantQueue final : public UBQueue {
 public:
  explicit ConstantQueue(LogProb value) : value_(value) {}

  LogProb sup() const override { return value_; }
  WordId top() const override { return kNoWord; }
  WordId pop() override { return kNoWord; }
  LogProb recompute_sup() const override { return value_; }

 private:
  LogProb value_;
};

// A back-off weight whose argument contains the candidate. Unobserved
// sequences have weight 0, so the bound is 0 unless the model stores a
// positive weight for some matching sequence.
class BetaHoleQueue final : public UBQueue {
 public:
  explicit BetaHoleQueue(LogProb bound = 0.0) : bound_(bound) {}

  LogProb sup() const override { return bound_; }
  WordId top() const override { return kNoWord; }
  WordId pop() override { return kNoWord; }
  LogProb recompute_sup() const override { return bound_; }

 private:
  LogProb bound_;
};

// Sum of terms. Candidates come only from the designated alpha child.
class SumQueue final : public UBQueue {
 public:
  // alpha_child indexes into children, or is negative when no term
  // produces candidates.
  SumQueue(std::vector<std::unique_ptr<UBQueue>> children, int alpha_child);

  LogProb sup() const override { return sup_; }
  WordId top() const override;
  WordId pop() override;
  LogProb recompute_sup() const override;

 private:
  LogProb sum_of_children() const;

  std::vector<std::unique_ptr<UBQueue>> children_;
  int alpha_child_;
  LogProb sup_;
};

// Back-off alternatives. The value for any word equals one of the
// children, so the bound is the children's maximum.
class CondQueue final : public UBQueue {
 public:
  explicit CondQueue(std::vector<std::unique_ptr<UBQueue>> children);

  LogProb sup() const override { return sup_; }
  WordId top() const override;
  WordId pop() override;
  LogProb recompute_sup() const override;

  // Child that top()/pop() use: highest sup among children with a top,
  // lowest index on ties. -1 when every child is empty.
  int selected() const;

 private:
  std::vector<std::unique_ptr<UBQueue>> children_;
  LogProb sup_;
};

enum class BlockPolicy {
  kMaxSup,      // block with the highest bound that still has a top
  kRoundRobin,  // cycle through blocks that still have a top
};

// Sum over the conditional blocks of a term tree. pop() never returns a
// word twice and never returns a word outside the eligibility mask.
class RootQueue final : public UBQueue {
 public:
  RootQueue(std::vector<std::unique_ptr<CondQueue>> blocks, std::vector<char> eligible,
            BlockPolicy policy = BlockPolicy::kRoundRobin);

  // kAbsent once every reachable alpha list is exhausted.
  LogProb sup() const override;
  WordId top() const override;
  WordId pop() override;
  LogProb recompute_sup() const override;

  // Words removed from child queues, including duplicates and ineligible words.
  std::size_t extractions() const { return extractions_; }
  std::size_t emitted() const { return emitted_; }
  std::size_t block_count() const { return blocks_.size(); }
  const CondQueue& block(std::size_t i) const { return *blocks_[i]; }

 private:
  int selected() const;

  std::vector<std::unique_ptr<CondQueue>> blocks_;
  std::vector<char> fresh_;
  BlockPolicy policy_;
  std::size_t next_block_ = 0;
  std::size_t extractions_ = 0;
  std::size_t emitted_ = 0;
};

// Instantiates the queue tree for a term tree: alpha arguments holding the
// hole become AlphaQueues over the index, other alphas and betas become
// constants, betas holding the hole become BetaHoleQueues.
std::unique_ptr<RootQueue> build_root_queue(const NgramLM& lm, const AlphaIndex& index, const TermTree& tree,
                                            std::vector<char> eligible, BlockPolicy policy = BlockPolicy::kRoundRobin);

}  // namespace fastsubs

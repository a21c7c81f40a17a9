#include "fastsubs/ubqueue.hpp"

#include <algorithm>
#include <stdexcept>

namespace fastsubs {

WordId AlphaQueue::pop() {
  if (cursor_ >= items_.size()) return kNoWord;
  return items_[cursor_++].word;
}

SumQueue::SumQueue(std::vector<std::unique_ptr<UBQueue>> children, int alpha_child)
    : children_(std::move(children)), alpha_child_(alpha_child) {
  if (alpha_child_ >= static_cast<int>(children_.size())) throw std::invalid_argument("alpha child out of range");
  sup_ = sum_of_children();
}

LogProb SumQueue::sum_of_children() const {
  LogProb total = 0.0;
  for (const auto& c : children_) total += c->sup();
  return total;
}

WordId SumQueue::top() const { return alpha_child_ < 0 ? kNoWord : children_[alpha_child_]->top(); }

WordId SumQueue::pop() {
  if (alpha_child_ < 0) return kNoWord;
  WordId w = children_[alpha_child_]->pop();
  if (w != kNoWord) sup_ = sum_of_children();
  return w;
}

LogProb SumQueue::recompute_sup() const {
  LogProb total = 0.0;
  for (const auto& c : children_) total += c->recompute_sup();
  return total;
}

CondQueue::CondQueue(std::vector<std::unique_ptr<UBQueue>> children) : children_(std::move(children)) {
  sup_ = kAbsent;
  for (const auto& c : children_) sup_ = std::max(sup_, c->sup());
}

int CondQueue::selected() const {
  int best = -1;
  LogProb best_sup = kAbsent;
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (children_[i]->top() == kNoWord) continue;
    LogProb s = children_[i]->sup();
    if (best < 0 || s > best_sup) {
      best = static_cast<int>(i);
      best_sup = s;
    }
  }
  return best;
}

WordId CondQueue::top() const {
  int i = selected();
  return i < 0 ? kNoWord : children_[static_cast<std::size_t>(i)]->top();
}

WordId CondQueue::pop() {
  int i = selected();
  if (i < 0) return kNoWord;
  WordId w = children_[static_cast<std::size_t>(i)]->pop();
  sup_ = kAbsent;
  for (const auto& c : children_) sup_ = std::max(sup_, c->sup());
  return w;
}

LogProb CondQueue::recompute_sup() const {
  LogProb best = kAbsent;
  for (const auto& c : children_) best = std::max(best, c->recompute_sup());
  return best;
}

RootQueue::RootQueue(std::vector<std::unique_ptr<CondQueue>> blocks, std::vector<char> eligible, BlockPolicy policy)
    : blocks_(std::move(blocks)), fresh_(std::move(eligible)), policy_(policy) {}

int RootQueue::selected() const {
  const std::size_t n = blocks_.size();
  if (policy_ == BlockPolicy::kRoundRobin) {
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t i = (next_block_ + step) % n;
      if (blocks_[i]->top() != kNoWord) return static_cast<int>(i);
    }
    return -1;
  }
  int best = -1;
  LogProb best_sup = kAbsent;
  for (std::size_t i = 0; i < n; ++i) {
    if (blocks_[i]->top() == kNoWord) continue;
    LogProb s = blocks_[i]->sup();
    if (best < 0 || s > best_sup) {
      best = static_cast<int>(i);
      best_sup = s;
    }
  }
  return best;
}

LogProb RootQueue::sup() const {
  if (selected() < 0) return kAbsent;
  LogProb total = 0.0;
  for (const auto& b : blocks_) total += b->sup();
  return total;
}

WordId RootQueue::top() const {
  int i = selected();
  return i < 0 ? kNoWord : blocks_[static_cast<std::size_t>(i)]->top();
}

WordId RootQueue::pop() {
  while (true) {
    int i = selected();
    if (i < 0) return kNoWord;
    WordId w = blocks_[static_cast<std::size_t>(i)]->pop();
    next_block_ = (static_cast<std::size_t>(i) + 1) % blocks_.size();
    ++extractions_;
    if (w < fresh_.size() && fresh_[w]) {
      fresh_[w] = 0;
      ++emitted_;
      return w;
    }
  }
}

LogProb RootQueue::recompute_sup() const {
  if (selected() < 0) return kAbsent;
  LogProb total = 0.0;
  for (const auto& b : blocks_) total += b->recompute_sup();
  return total;
}

std::unique_ptr<RootQueue> build_root_queue(const NgramLM& lm, const AlphaIndex& index, const TermTree& tree,
                                            std::vector<char> eligible, BlockPolicy policy) {
  auto view = [&](const Block& block, const NgramArg& arg) {
    return std::span<const WordId>(block.window.data() + arg.begin, arg.size());
  };

  std::vector<std::unique_ptr<CondQueue>> blocks;
  for (const Block& block : tree.blocks) {
    std::vector<std::unique_ptr<UBQueue>> branches;
    for (const Branch& br : block.branches) {
      std::vector<std::unique_ptr<UBQueue>> terms;
      for (const NgramArg& b : br.betas) {
        if (b.has_hole()) terms.push_back(std::make_unique<BetaHoleQueue>(index.beta_bound(view(block, b))));
        else terms.push_back(std::make_unique<ConstantQueue>(lm.beta(view(block, b))));
      }
      int alpha_child = -1;
      if (br.alpha_arg.has_hole()) {
        alpha_child = static_cast<int>(terms.size());
        terms.push_back(std::make_unique<AlphaQueue>(index.list(view(block, br.alpha_arg))));
      } else {
        terms.push_back(std::make_unique<ConstantQueue>(lm.alpha(view(block, br.alpha_arg))));
      }
      branches.push_back(std::make_unique<SumQueue>(std::move(terms), alpha_child));
    }
    blocks.push_back(std::make_unique<CondQueue>(std::move(branches)));
  }
  return std::make_unique<RootQueue>(std::move(blocks), std::move(eligible), policy);
}

}  // namespace fastsubs

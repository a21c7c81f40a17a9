#include "fastsubs/alpha_index.hpp"

#include <algorithm>

namespace fastsubs {

std::vector<WordId> HoleContext::pattern() const {
  std::vector<WordId> out(context.begin(), context.end());
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(std::min(hole, out.size())), kHole);
  return out;
}

AlphaIndex::AlphaIndex(const NgramLM& lm) {
  const int n = lm.order();
  std::vector<WordId> pattern;

  // Pass 1: register every pattern and count its members.
  std::vector<std::vector<std::size_t>> counts(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    lists_.emplace_back(static_cast<std::size_t>(k));
    betas_.emplace_back(static_cast<std::size_t>(k));
    Lists& l = lists_.back();
    BetaBounds& b = betas_.back();
    auto& cnt = counts[static_cast<std::size_t>(k - 1)];
    l.keys.reserve(lm.ngram_count(k));

    lm.for_each_ngram(k, [&](std::span<const WordId> key, const NgramEntry& e) {
      for (std::size_t p = 0; p < key.size(); ++p) {
        pattern.assign(key.begin(), key.end());
        pattern[p] = kHole;
        if (!is_absent(e.alpha)) {
          auto [idx, inserted] = l.keys.insert(pattern);
          if (inserted) cnt.push_back(0);
          ++cnt[idx];
        }
        if (e.beta > 0.0) {
          auto [idx, inserted] = b.keys.insert(pattern);
          if (inserted) b.bound.push_back(e.beta);
          else b.bound[idx] = std::max(b.bound[idx], e.beta);
        }
      }
    });
  }

  std::size_t total = 0;
  for (int k = 1; k <= n; ++k) {
    Lists& l = lists_[static_cast<std::size_t>(k - 1)];
    const auto& cnt = counts[static_cast<std::size_t>(k - 1)];
    l.offsets.resize(cnt.size() + 1);
    for (std::size_t i = 0; i < cnt.size(); ++i) {
      l.offsets[i] = total;
      total += cnt[i];
    }
    l.offsets[cnt.size()] = total;
  }
  items_.resize(total);

  // Pass 2: fill, then sort each list.
  for (int k = 1; k <= n; ++k) {
    Lists& l = lists_[static_cast<std::size_t>(k - 1)];
    std::vector<std::size_t> cursor(l.offsets.begin(), l.offsets.end() - 1);
    lm.for_each_ngram(k, [&](std::span<const WordId> key, const NgramEntry& e) {
      if (is_absent(e.alpha)) return;
      for (std::size_t p = 0; p < key.size(); ++p) {
        pattern.assign(key.begin(), key.end());
        pattern[p] = kHole;
        std::uint32_t idx = *l.keys.find(pattern);
        items_[cursor[idx]++] = {key[p], e.alpha};
      }
    });
    for (std::size_t i = 0; i + 1 < l.offsets.size(); ++i) {
      std::sort(items_.begin() + static_cast<std::ptrdiff_t>(l.offsets[i]),
                items_.begin() + static_cast<std::ptrdiff_t>(l.offsets[i + 1]),
                [](const AlphaItem& a, const AlphaItem& b) {
                  if (a.alpha != b.alpha) return a.alpha > b.alpha;
                  return a.word < b.word;
                });
    }
  }
}

std::span<const AlphaItem> AlphaIndex::list(std::span<const WordId> pattern) const {
  if (pattern.empty() || pattern.size() > lists_.size()) return {};
  const Lists& l = lists_[pattern.size() - 1];
  auto idx = l.keys.find(pattern);
  if (!idx) return {};
  return {items_.data() + l.offsets[*idx], items_.data() + l.offsets[*idx + 1]};
}

std::span<const AlphaItem> AlphaIndex::list(const HoleContext& ctx) const {
  auto p = ctx.pattern();
  return list(std::span<const WordId>(p));
}

LogProb AlphaIndex::beta_bound(std::span<const WordId> pattern) const {
  if (pattern.empty() || pattern.size() > betas_.size()) return 0.0;
  const BetaBounds& b = betas_[pattern.size() - 1];
  auto idx = b.keys.find(pattern);
  return idx ? b.bound[*idx] : 0.0;
}

void AlphaIndex::corrupt_for_testing(LogProb shift) {
  for (AlphaItem& item : items_) item.alpha += shift;
}

}  // namespace fastsubs

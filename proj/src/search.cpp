#include "fastsubs/search.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <stdexcept>

namespace fastsubs {

std::pair<SubstituteList, SearchStats> fastsubs_topk(const NgramLM& lm, const AlphaIndex& index, const Query& q,
                                                     const SearchOptions& options) {
  if (q.k < 1) throw std::invalid_argument("K must be at least 1");
  auto start = std::chrono::steady_clock::now();

  TermTree tree = build_term_tree(lm, q);
  auto root = build_root_queue(lm, index, tree, eligible_mask(lm, options.filter), options.policy);

  SubstituteList candidates;
  // Scores not yet known to beat the bound. Once a score is strictly above
  // sup it stays above, since sup never increases.
  std::priority_queue<LogProb> pending;
  std::size_t confirmed = 0;

  while (true) {
    LogProb bound = root->sup();
    while (!pending.empty() && pending.top() > bound) {
      pending.pop();
      ++confirmed;
    }
    if (confirmed >= q.k) break;
    WordId w = root->pop();
    if (w == kNoWord) break;
    LogProb score = substitute_logp(lm, tree, w);
    candidates.push_back({w, score});
    pending.push(score);
  }

  SearchStats stats;
  stats.pops = root->extractions();
  stats.candidates = candidates.size();
  stats.final_sup = root->sup();

  std::size_t k = std::min(q.k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                    ranks_before);
  candidates.resize(k);

  stats.nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  return {std::move(candidates), stats};
}

}  // namespace fastsubs

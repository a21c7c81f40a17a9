#include "fastsubs/scorer.hpp"

#include <algorithm>
#include <stdexcept>

#include "fastsubs/alpha_index.hpp"

namespace fastsubs {

void Query::validate(const Vocab& vocab) const {
  if (words.size() < 3) throw std::invalid_argument("padded sentence needs at least 3 tokens");
  if (words.front() != vocab.bos() || words.back() != vocab.eos())
    throw std::invalid_argument("sentence must be padded with <s> and </s>");
  if (target < 1 || target + 1 >= words.size()) throw std::invalid_argument("target must not be a boundary token");
  if (k < 1) throw std::invalid_argument("K must be at least 1");
}

Query make_query(const Vocab& vocab, std::span<const std::string> tokens, std::size_t position, std::size_t k) {
  if (position >= tokens.size()) throw std::invalid_argument("query position out of range");
  Query q;
  q.words.reserve(tokens.size() + 2);
  q.words.push_back(vocab.bos());
  for (const std::string& tok : tokens) q.words.push_back(vocab.id(tok));
  q.words.push_back(vocab.eos());
  q.target = position + 1;
  q.k = k;
  return q;
}

namespace {

NgramArg slice(std::size_t begin, std::size_t end, int hole) {
  NgramArg arg{begin, end, -1};
  if (hole >= 0 && static_cast<std::size_t>(hole) >= begin && static_cast<std::size_t>(hole) < end) {
    arg.hole = hole - static_cast<int>(begin);
  }
  return arg;
}

}  // namespace

TermTree build_term_tree(const NgramLM& lm, const Query& q) {
  q.validate(lm.vocab());
  const std::size_t n = static_cast<std::size_t>(lm.order());
  const std::size_t last = q.words.size() - 1;

  TermTree tree;
  tree.target = q.target;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t p = q.target + j;
    if (p > last) break;
    std::size_t len = std::min(n - 1, p);
    std::size_t first = p - len;

    Block block;
    block.predicted = p;
    block.window.assign(q.words.begin() + static_cast<std::ptrdiff_t>(first),
                        q.words.begin() + static_cast<std::ptrdiff_t>(p + 1));
    block.hole = static_cast<int>(q.target - first);
    block.window[static_cast<std::size_t>(block.hole)] = kHole;

    for (std::size_t m = 0; m <= len; ++m) {
      Branch br;
      for (std::size_t i = 0; i < m; ++i) br.betas.push_back(slice(i, len, block.hole));
      br.alpha_arg = slice(m, len + 1, block.hole);
      block.branches.push_back(std::move(br));
    }
    tree.blocks.push_back(std::move(block));
  }
  return tree;
}

LogProb substitute_logp(const NgramLM& lm, const TermTree& tree, WordId x) {
  WordId buf[64];
  std::vector<WordId> heap;
  LogProb total = 0.0;
  for (const Block& block : tree.blocks) {
    std::span<WordId> window;
    if (block.window.size() <= std::size(buf)) {
      window = std::span<WordId>(buf, block.window.size());
    } else {
      heap.resize(block.window.size());
      window = heap;
    }
    std::copy(block.window.begin(), block.window.end(), window.begin());
    window[static_cast<std::size_t>(block.hole)] = x;
    auto view = [&](const NgramArg& a) { return std::span<const WordId>(window.subspan(a.begin, a.size())); };

    LogProb value = kAbsent;
    for (const Branch& br : block.branches) {
      LogProb a = lm.alpha(view(br.alpha_arg));
      if (is_absent(a)) continue;
      LogProb betas = 0.0;
      for (const NgramArg& b : br.betas) betas += lm.beta(view(b));
      value = betas + a;
      break;
    }
    total += value;
  }
  return total;
}

std::vector<char> eligible_mask(const NgramLM& lm, const CandidateFilter& filter) {
  const Vocab& vocab = lm.vocab();
  std::vector<char> mask(vocab.size(), 0);
  for (WordId w = 0; w < vocab.size(); ++w) {
    WordId key[1] = {w};
    mask[w] = !is_absent(lm.alpha(key));
  }
  mask[vocab.bos()] = 0;
  mask[vocab.eos()] = 0;
  if (!filter.include_unk) mask[vocab.unk()] = 0;
  if (filter.exclude && *filter.exclude < mask.size()) mask[*filter.exclude] = 0;
  return mask;
}

SubstituteList oracle_topk(const NgramLM& lm, const Query& q, const CandidateFilter& filter) {
  TermTree tree = build_term_tree(lm, q);
  std::vector<char> mask = eligible_mask(lm, filter);
  SubstituteList all;
  for (WordId w = 0; w < mask.size(); ++w) {
    if (mask[w]) all.push_back({w, substitute_logp(lm, tree, w)});
  }
  std::size_t k = std::min(q.k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), ranks_before);
  all.resize(k);
  return all;
}

}  // namespace fastsubs

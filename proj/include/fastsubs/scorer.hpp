#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastsubs/lm.hpp"

namespace fastsubs {

// A sentence padded with <s> and </s>, the position to fill, and how many
// substitutes to return.
struct Query {
  std::vector<WordId> words;
  std::size_t target = 1;
  std::size_t k = 1;

  // Throws std::invalid_argument when the padding or target is malformed.
  void validate(const Vocab& vocab) const;
};

// Pads tokens with <s>/</s>, mapping unknown words to <unk>. `position`
// indexes the unpadded tokens.
Query make_query(const Vocab& vocab, std::span<const std::string> tokens, std::size_t position, std::size_t k);

// A contiguous slice [begin, end) of a block window. hole is the offset of
// the candidate slot inside the slice, or -1 when the slice does not cover it.
struct NgramArg {
  std::size_t begin = 0;
  std::size_t end = 0;
  int hole = -1;

  bool has_hole() const { return hole >= 0; }
  std::size_t size() const { return end - begin; }
};

// One back-off alternative: the summed back-off weights of `betas`, plus
// alpha(alpha_arg). Selected when alpha_arg is present and no earlier
// branch of the block was.
struct Branch {
  std::vector<NgramArg> betas;
  NgramArg alpha_arg;
};

// The conditional term for the word at padded index `predicted`. window holds
// the history followed by the predicted word, with kHole at the candidate slot.
struct Block {
  std::size_t predicted = 0;
  std::vector<WordId> window;
  int hole = -1;
  std::vector<Branch> branches;
};

struct TermTree {
  std::size_t target = 0;
  std::vector<Block> blocks;
};

TermTree build_term_tree(const NgramLM& lm, const Query& q);

// Unnormalized log10 score of placing x in the hole.
LogProb substitute_logp(const NgramLM& lm, const TermTree& tree, WordId x);

struct Substitute {
  WordId word;
  LogProb score;

  friend bool operator==(const Substitute&, const Substitute&) = default;
};

// Score descending, then word id ascending.
inline bool ranks_before(const Substitute& a, const Substitute& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.word < b.word;
}

using SubstituteList = std::vector<Substitute>;

struct CandidateFilter {
  bool include_unk = false;
  std::optional<WordId> exclude;
};

// Words that may be returned as substitutes: everything except <s> and
// </s>, <unk> unless requested, and words whose unigram alpha is absent.
std::vector<char> eligible_mask(const NgramLM& lm, const CandidateFilter& filter = {});

// Scores every eligible word and keeps the best q.k.
SubstituteList oracle_topk(const NgramLM& lm, const Query& q, const CandidateFilter& filter = {});

}  // namespace fastsubs

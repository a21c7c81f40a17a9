#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fastsubs {

using Sentence = std::vector<std::string>;
using Corpus = std::vector<Sentence>;

struct SynthConfig {
  // Includes the three reserved tokens, so V - 3 content words are drawn.
  std::size_t vocab_size = 1000;
  std::size_t tokens = 100000;
  double zipf_s = 1.0;
  int order = 3;
  double discount = 0.5;
  std::uint64_t seed = 1;
  double mean_sentence_length = 20.0;

  void validate() const;
};

// Sentences of geometric length with words drawn from a Zipf(s) law over
// ranks 1..V-3. Word of rank r is spelled "w<r>". Exactly cfg.tokens tokens.
Corpus gen_corpus(const SynthConfig& cfg);

void write_corpus(const Corpus& corpus, std::ostream& out);
// One sentence per line, whitespace separated. Blank lines are dropped.
Corpus read_corpus(std::istream& in);

// Interpolated absolute-discounting model written in ARPA back-off form.
// A seen n-gram hw gets log10((c(hw) - d) / c(h) + gamma(h) p(w | h')),
// with gamma(h) = d * types(h) / c(h) stored as the back-off weight of h.
// <unk> takes the unigram discount mass.
void estimate_arpa(const Corpus& corpus, int order, double discount, std::ostream& out);
std::string estimate_arpa(const Corpus& corpus, int order, double discount);

}  // namespace fastsubs

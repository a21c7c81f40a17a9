#include "fastsubs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fastsubs/lm.hpp"

namespace fastsubs {

void SynthConfig::validate() const {
  if (vocab_size < 4) throw std::invalid_argument("vocab size must be at least 4");
  if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("discount must be in (0, 1)");
  if (order < 1) throw std::invalid_argument("order must be at least 1");
  if (!(zipf_s >= 0.0)) throw std::invalid_argument("zipf exponent must be non-negative");
  if (!(mean_sentence_length >= 1.0)) throw std::invalid_argument("mean sentence length must be at least 1");
}

namespace {

// Uniform in [0, 1) from the top 53 bits; mt19937_64 output is fixed by
// the standard, so this is reproducible everywhere.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Corpus gen_corpus(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t words = cfg.vocab_size - 3;
  std::vector<double> cdf(words);
  double acc = 0.0;
  for (std::size_t r = 0; r < words; ++r) {
    acc += std::pow(static_cast<double>(r + 1), -cfg.zipf_s);
    cdf[r] = acc;
  }
  for (double& c : cdf) c /= acc;

  std::mt19937_64 rng(cfg.seed);
  const double stop = 1.0 / cfg.mean_sentence_length;
  Corpus corpus;
  std::size_t produced = 0;
  while (produced < cfg.tokens) {
    std::size_t len = 1;
    if (stop < 1.0) {
      len += static_cast<std::size_t>(std::floor(std::log1p(-uniform(rng)) / std::log1p(-stop)));
    }
    len = std::min(len, cfg.tokens - produced);
    Sentence s;
    s.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      double u = uniform(rng);
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      std::size_t rank = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), words - 1) + 1;
      s.push_back("w" + std::to_string(rank));
    }
    produced += len;
    corpus.push_back(std::move(s));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const Sentence& s : corpus) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out << ' ';
      out << s[i];
    }
    out << '\n';
  }
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    Sentence s;
    std::string tok;
    while (ss >> tok) s.push_back(tok);
    if (!s.empty()) corpus.push_back(std::move(s));
  }
  return corpus;
}

namespace {

struct Level {
  explicit Level(std::size_t width) : keys(width) {}
  NgramTable keys;
  std::vector<std::uint64_t> count;
  std::vector<std::uint64_t> hist_total;  // sum of continuation counts
  std::vector<std::uint64_t> hist_types;  // distinct continuations
  std::vector<LogProb> alpha;
  std::vector<LogProb> beta;
};

}  // namespace

void estimate_arpa(const Corpus& corpus, int order, double discount, std::ostream& out) {
  if (corpus.empty()) throw std::invalid_argument("cannot estimate a model from an empty corpus");
  if (order < 1) throw std::invalid_argument("order must be at least 1");
  if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("discount must be in (0, 1)");
  const std::size_t n = static_cast<std::size_t>(order);

  Vocab vocab;
  std::vector<Level> levels;
  for (std::size_t k = 1; k <= n; ++k) levels.emplace_back(k);
  auto bump = [](Level& l, std::span<const WordId> key, std::uint64_t by) {
    auto [idx, inserted] = l.keys.insert(key);
    if (inserted) l.count.push_back(0);
    l.count[idx] += by;
    return idx;
  };
  for (WordId w : {vocab.unk(), vocab.bos(), vocab.eos()}) {
    WordId key[1] = {w};
    bump(levels[0], key, 0);
  }

  std::vector<WordId> ids;
  for (const Sentence& s : corpus) {
    ids.clear();
    ids.push_back(vocab.bos());
    for (const std::string& w : s) ids.push_back(vocab.add(w));
    ids.push_back(vocab.eos());
    for (std::size_t i = 1; i < ids.size(); ++i) {
      for (std::size_t k = 1; k <= n && k <= i + 1; ++k) {
        bump(levels[k - 1], std::span<const WordId>(ids.data() + i + 1 - k, k), 1);
      }
    }
  }

  // Continuation statistics for every history.
  for (std::size_t k = 1; k <= n; ++k) {
    Level& l = levels[k - 1];
    l.hist_total.assign(l.count.size(), 0);
    l.hist_types.assign(l.count.size(), 0);
    l.alpha.assign(l.count.size(), kAbsent);
    l.beta.assign(l.count.size(), 0.0);
  }
  std::uint64_t uni_total = 0, uni_types = 0;
  for (std::uint32_t i = 0; i < levels[0].count.size(); ++i) {
    if (levels[0].count[i] > 0) {
      uni_total += levels[0].count[i];
      ++uni_types;
    }
  }
  for (std::size_t k = 2; k <= n; ++k) {
    Level& l = levels[k - 1];
    Level& h = levels[k - 2];
    for (std::uint32_t i = 0; i < l.count.size(); ++i) {
      auto idx = *h.keys.find(l.keys.key(i).first(k - 1));
      h.hist_total[idx] += l.count[i];
      h.hist_types[idx] += 1;
    }
  }

  // Unigrams.
  {
    Level& u = levels[0];
    const double leftover = discount * static_cast<double>(uni_types) / static_cast<double>(uni_total);
    for (std::uint32_t i = 0; i < u.count.size(); ++i) {
      WordId w = u.keys.key(i)[0];
      double p = u.count[i] > 0 ? (static_cast<double>(u.count[i]) - discount) / static_cast<double>(uni_total) : 0.0;
      if (w == vocab.unk()) p += leftover;
      if (p > 0.0) u.alpha[i] = std::log10(p);
    }
  }
  // Interpolation weights: gamma(h) = d * types(h) / c(h), stored as the
  // back-off weight. gamma <= 1, so every weight is <= 0.
  for (std::size_t k = 1; k < n; ++k) {
    Level& h = levels[k - 1];
    for (std::uint32_t i = 0; i < h.count.size(); ++i) {
      if (h.hist_types[i] == 0) continue;
      h.beta[i] = std::log10(discount * static_cast<double>(h.hist_types[i]) / static_cast<double>(h.hist_total[i]));
    }
  }

  // Same recursion and summation order as NgramLM::cond_logp, restricted
  // to orders below the one being estimated.
  auto cond = [&](std::span<const WordId> gram) {
    LogProb betas = 0.0;
    const std::size_t len = gram.size() - 1;
    for (std::size_t m = 0; m <= len; ++m) {
      auto g = gram.subspan(m);
      const Level& l = levels[g.size() - 1];
      if (auto idx = l.keys.find(g); idx && !is_absent(l.alpha[*idx])) return betas + l.alpha[*idx];
      if (m < len) {
        auto hist = gram.subspan(m, len - m);
        const Level& hl = levels[hist.size() - 1];
        if (auto idx = hl.keys.find(hist)) betas += hl.beta[*idx];
      }
    }
    return kAbsent;
  };

  // Seen n-grams: discounted relative frequency plus the interpolated
  // lower-order share. Lowest order first, since each order reads the one below.
  for (std::size_t k = 2; k <= n; ++k) {
    Level& l = levels[k - 1];
    Level& h = levels[k - 2];
    for (std::uint32_t i = 0; i < l.count.size(); ++i) {
      auto key = l.keys.key(i);
      auto idx = *h.keys.find(key.first(k - 1));
      double total = static_cast<double>(h.hist_total[idx]);
      double gamma = discount * static_cast<double>(h.hist_types[idx]) / total;
      LogProb lower = cond(key.subspan(1));
      double p = (static_cast<double>(l.count[i]) - discount) / total;
      if (!is_absent(lower)) p += gamma * std::pow(10.0, lower);
      l.alpha[i] = std::log10(p);
    }
  }

  out << "\\data\\\n";
  for (std::size_t k = 1; k <= n; ++k) out << "ngram " << k << '=' << levels[k - 1].count.size() << '\n';
  for (std::size_t k = 1; k <= n; ++k) {
    const Level& l = levels[k - 1];
    out << "\n\\" << k << "-grams:\n";
    for (std::uint32_t i = 0; i < l.count.size(); ++i) {
      out << (is_absent(l.alpha[i]) ? std::string("-99") : format_logprob(l.alpha[i])) << '\t';
      auto key = l.keys.key(i);
      for (std::size_t j = 0; j < key.size(); ++j) {
        if (j) out << ' ';
        out << vocab.word(key[j]);
      }
      if (k < n && l.hist_types[i] > 0) out << '\t' << format_logprob(l.beta[i]);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

std::string estimate_arpa(const Corpus& corpus, int order, double discount) {
  std::ostringstream out;
  estimate_arpa(corpus, order, discount, out);
  return out.str();
}

}  // namespace fastsubs

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fastsubs/ngram_table.hpp"

namespace fastsubs {

// Base-10 log probability or log back-off weight, as stored in ARPA files.
using LogProb = double;

// Marks a missing alpha entry. Compares below every finite value and
// propagates through sums and maxima as -infinity.
inline constexpr LogProb kAbsent = -std::numeric_limits<double>::infinity();

inline bool is_absent(LogProb p) { return p == kAbsent; }

// ARPA files use -99 as the stand-in for log(0).
inline constexpr LogProb kArpaLogZero = -99.0;

class Vocab {
 public:
  static constexpr std::string_view kUnk = "<unk>";
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";

  // Reserves ids 0, 1, 2 for <unk>, <s>, </s>.
  Vocab();

  // Returns the existing id when the word is already present.
  WordId add(std::string_view word);

  std::optional<WordId> find(std::string_view word) const;
  // Out-of-vocabulary words map to <unk>.
  WordId id(std::string_view word) const;
  const std::string& word(WordId id) const { return words_.at(id); }

  std::size_t size() const { return words_.size(); }
  WordId unk() const { return 0; }
  WordId bos() const { return 1; }
  WordId eos() const { return 2; }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> ids_;
};

struct NgramEntry {
  LogProb alpha = kAbsent;
  LogProb beta = 0.0;
};

// All n-grams of a single order.
struct OrderTable {
  explicit OrderTable(std::size_t width) : keys(width) {}

  NgramTable keys;
  std::vector<NgramEntry> entries;
};

// Immutable back-off n-gram model.
class NgramLM {
 public:
  NgramLM(Vocab vocab, std::vector<OrderTable> orders);

  int order() const { return static_cast<int>(orders_.size()); }
  const Vocab& vocab() const { return vocab_; }

  // Number of stored n-grams of length k (1 <= k <= order()).
  std::size_t ngram_count(int k) const { return table(k).entries.size(); }

  // kAbsent unless the n-gram is stored with a finite log probability.
  LogProb alpha(std::span<const WordId> ngram) const;
  // 0 for any n-gram without a stored back-off weight. Never kAbsent.
  LogProb beta(std::span<const WordId> ngram) const;

  // Back-off conditional log10 p(word | history). Only the last
  // order()-1 history words are used.
  LogProb cond_logp(WordId word, std::span<const WordId> history) const;

  // Sum of per-position conditionals. A leading <s> is context only.
  LogProb seq_logp(std::span<const WordId> words) const;

  // Calls fn(key, entry) for every stored n-gram of length k, in storage order.
  template <typename Fn>
  void for_each_ngram(int k, Fn&& fn) const {
    const OrderTable& t = table(k);
    for (std::uint32_t i = 0; i < t.entries.size(); ++i) fn(t.keys.key(i), t.entries[i]);
  }

 private:
  const OrderTable& table(int k) const { return orders_.at(static_cast<std::size_t>(k - 1)); }
  const NgramEntry* lookup(std::span<const WordId> ngram) const;

  Vocab vocab_;
  std::vector<OrderTable> orders_;
};

class ArpaError : public std::runtime_error {
 public:
  ArpaError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

NgramLM parse_arpa(std::istream& in);
NgramLM load_arpa(const std::string& path);

// Writes the model back out in ARPA format. Values round-trip exactly.
void write_arpa(const NgramLM& lm, std::ostream& out);

// Shortest decimal text that parses back to exactly the same double.
std::string format_logprob(double value);

}  // namespace fastsubs

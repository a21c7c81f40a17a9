#include "fastsubs/lm.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace fastsubs {

Vocab::Vocab() {
  add(kUnk);
  add(kBos);
  add(kEos);
}

WordId Vocab::add(std::string_view word) {
  if (auto it = ids_.find(word); it != ids_.end()) return it->second;
  auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(std::string(word), id);
  return id;
}

std::optional<WordId> Vocab::find(std::string_view word) const {
  if (auto it = ids_.find(word); it != ids_.end()) return it->second;
  return std::nullopt;
}

WordId Vocab::id(std::string_view word) const { return find(word).value_or(unk()); }

NgramLM::NgramLM(Vocab vocab, std::vector<OrderTable> orders)
    : vocab_(std::move(vocab)), orders_(std::move(orders)) {
  if (orders_.empty()) throw std::invalid_argument("model must contain unigrams");
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    if (orders_[k].keys.width() != k + 1) throw std::invalid_argument("order table width mismatch");
    if (orders_[k].entries.size() != orders_[k].keys.size())
      throw std::invalid_argument("order table size mismatch");
  }

  // Reserved tokens must have unigram entries. <unk> and </s> get the
  // smallest finite unigram alpha when the file omits them.
  OrderTable& uni = orders_[0];
  LogProb floor = 0.0;
  bool any = false;
  for (const NgramEntry& e : uni.entries) {
    if (!is_absent(e.alpha)) {
      floor = any ? std::min(floor, e.alpha) : e.alpha;
      any = true;
    }
  }
  if (!any) floor = kArpaLogZero + 1.0;
  auto ensure = [&](WordId w, LogProb fallback) {
    WordId key[1] = {w};
    auto [idx, inserted] = uni.keys.insert(key);
    if (inserted) uni.entries.push_back({fallback, 0.0});
    else if (is_absent(uni.entries[idx].alpha) && !is_absent(fallback)) uni.entries[idx].alpha = fallback;
  };
  ensure(vocab_.unk(), floor);
  ensure(vocab_.bos(), kAbsent);
  WordId eos[1] = {vocab_.eos()};
  if (!uni.keys.find(eos)) ensure(vocab_.eos(), floor);

  for (WordId w = 0; w < vocab_.size(); ++w) {
    WordId key[1] = {w};
    if (!uni.keys.find(key)) throw std::invalid_argument("vocabulary word without unigram: " + vocab_.word(w));
  }
}

const NgramEntry* NgramLM::lookup(std::span<const WordId> ngram) const {
  if (ngram.empty() || ngram.size() > orders_.size()) return nullptr;
  const OrderTable& t = orders_[ngram.size() - 1];
  auto idx = t.keys.find(ngram);
  return idx ? &t.entries[*idx] : nullptr;
}

LogProb NgramLM::alpha(std::span<const WordId> ngram) const {
  const NgramEntry* e = lookup(ngram);
  return e ? e->alpha : kAbsent;
}

LogProb NgramLM::beta(std::span<const WordId> ngram) const {
  const NgramEntry* e = lookup(ngram);
  return e ? e->beta : 0.0;
}

LogProb NgramLM::cond_logp(WordId word, std::span<const WordId> history) const {
  std::size_t len = std::min(history.size(), orders_.size() - 1);
  history = history.subspan(history.size() - len);

  WordId buf[64];
  std::vector<WordId> heap;
  std::span<WordId> gram;
  if (len + 1 <= std::size(buf)) {
    gram = std::span<WordId>(buf, len + 1);
  } else {
    heap.resize(len + 1);
    gram = heap;
  }
  std::copy(history.begin(), history.end(), gram.begin());
  gram[len] = word;

  // Sum order: back-off weights left to right, then the alpha.
  LogProb betas = 0.0;
  for (std::size_t m = 0; m <= len; ++m) {
    LogProb a = alpha(gram.subspan(m));
    if (!is_absent(a)) return betas + a;
    if (m < len) betas += beta(gram.subspan(m, len - m));
  }
  return kAbsent;
}

LogProb NgramLM::seq_logp(std::span<const WordId> words) const {
  std::size_t start = (!words.empty() && words[0] == vocab_.bos()) ? 1 : 0;
  LogProb total = 0.0;
  for (std::size_t i = start; i < words.size(); ++i) {
    total += cond_logp(words[i], words.first(i));
  }
  return total;
}

ArpaError::ArpaError(std::size_t line, const std::string& what)
    : std::runtime_error("ARPA line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_count(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

NgramLM parse_arpa(std::istream& in) {
  std::string raw;
  std::size_t lineno = 0;
  auto next = [&](std::string_view& line) {
    if (!std::getline(in, raw)) return false;
    ++lineno;
    line = trim(raw);
    return true;
  };

  std::string_view line;
  bool found = false;
  while (next(line)) {
    if (line == "\\data\\") {
      found = true;
      break;
    }
  }
  if (!found) throw ArpaError(lineno, "missing \\data\\ header");

  std::vector<std::size_t> declared;
  bool have_line = false;
  while (next(line)) {
    if (line.empty()) continue;
    if (line.substr(0, 6) != "ngram ") {
      have_line = true;
      break;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ArpaError(lineno, "malformed ngram count declaration");
    auto k = parse_count(trim(line.substr(6, eq - 6)));
    auto c = parse_count(trim(line.substr(eq + 1)));
    if (!k || !c || *k == 0) throw ArpaError(lineno, "malformed ngram count declaration");
    if (*k != declared.size() + 1) throw ArpaError(lineno, "ngram orders must be declared in sequence");
    declared.push_back(*c);
  }
  if (declared.empty()) throw ArpaError(lineno, "no ngram count declarations");

  Vocab vocab;
  std::vector<OrderTable> orders;
  for (std::size_t k = 1; k <= declared.size(); ++k) {
    orders.emplace_back(k);
    std::size_t hint = std::min<std::size_t>(declared[k - 1], std::size_t{1} << 24);
    orders.back().keys.reserve(hint);
    orders.back().entries.reserve(hint);
  }

  std::vector<WordId> key;
  std::size_t section = 0;
  std::size_t seen = 0;
  bool ended = false;
  auto close_section = [&]() {
    if (section != 0 && seen != declared[section - 1]) {
      throw ArpaError(lineno, "count mismatch for " + std::to_string(section) + "-grams: declared " +
                                  std::to_string(declared[section - 1]) + ", found " + std::to_string(seen));
    }
  };

  while (have_line || next(line)) {
    have_line = false;
    if (line.empty()) continue;
    if (line == "\\end\\") {
      close_section();
      ended = true;
      break;
    }
    if (line.front() == '\\') {
      close_section();
      std::string expect = "\\" + std::to_string(section + 1) + "-grams:";
      if (line != expect) throw ArpaError(lineno, "expected section " + expect + ", got " + std::string(line));
      ++section;
      if (section > declared.size()) throw ArpaError(lineno, "section not declared in header");
      seen = 0;
      continue;
    }
    if (section == 0) throw ArpaError(lineno, "n-gram line outside of a section");

    auto fields = split_fields(line);
    if (fields.size() != section + 1 && fields.size() != section + 2) {
      throw ArpaError(lineno, "expected " + std::to_string(section) + "-gram, got " +
                                  std::to_string(fields.size()) + " fields");
    }
    auto logprob = parse_double(fields[0]);
    if (!logprob) throw ArpaError(lineno, "non-numeric log probability '" + std::string(fields[0]) + "'");
    LogProb backoff = 0.0;
    if (fields.size() == section + 2) {
      auto b = parse_double(fields.back());
      if (!b) throw ArpaError(lineno, "non-numeric back-off weight '" + std::string(fields.back()) + "'");
      backoff = *b;
    }

    key.clear();
    for (std::size_t i = 1; i <= section; ++i) {
      if (section == 1) {
        key.push_back(vocab.add(fields[i]));
      } else {
        auto id = vocab.find(fields[i]);
        if (!id) throw ArpaError(lineno, "word '" + std::string(fields[i]) + "' missing from 1-grams");
        key.push_back(*id);
      }
    }
    OrderTable& t = orders[section - 1];
    auto [idx, inserted] = t.keys.insert(key);
    if (!inserted) throw ArpaError(lineno, "duplicate n-gram");
    LogProb a = (*logprob <= kArpaLogZero) ? kAbsent : *logprob;
    t.entries.push_back({a, backoff});
    ++seen;
  }
  if (!ended) throw ArpaError(lineno, "missing \\end\\ marker");
  if (section != declared.size()) throw ArpaError(lineno, "missing sections for declared orders");

  return NgramLM(std::move(vocab), std::move(orders));
}

NgramLM load_arpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return parse_arpa(in);
}

std::string format_logprob(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_arpa(const NgramLM& lm, std::ostream& out) {
  const Vocab& vocab = lm.vocab();
  out << "\\data\\\n";
  for (int k = 1; k <= lm.order(); ++k) out << "ngram " << k << '=' << lm.ngram_count(k) << '\n';
  for (int k = 1; k <= lm.order(); ++k) {
    out << "\n\\" << k << "-grams:\n";
    lm.for_each_ngram(k, [&](std::span<const WordId> key, const NgramEntry& e) {
      out << (is_absent(e.alpha) ? std::string("-99") : format_logprob(e.alpha)) << '\t';
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out << ' ';
        out << vocab.word(key[i]);
      }
      if (e.beta != 0.0) out << '\t' << format_logprob(e.beta);
      out << '\n';
    });
  }
  out << "\n\\end\\\n";
}

}  // namespace fastsubs

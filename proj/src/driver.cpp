#include "fastsubs/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <condition_variable>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace fastsubs {

std::string format_subs_line(const Vocab& vocab, std::size_t sentence, std::size_t token, const std::string& word,
                             const SubstituteList& subs) {
  std::string line = fmt::format("{}\t{}\t{}", sentence, token, word);
  for (const Substitute& s : subs) fmt::format_to(std::back_inserter(line), "\t{} {:.6f}", vocab.word(s.word), s.score);
  line += '\n';
  return line;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string substitute_sentence(const NgramLM& lm, const AlphaIndex& index, std::size_t sentence,
                                const std::vector<std::string>& tokens, const SubsOptions& options) {
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Query q = make_query(lm.vocab(), tokens, i, options.k);
    CandidateFilter filter;
    filter.include_unk = options.include_unk;
    if (options.exclude_target) filter.exclude = q.words[q.target];
    SubstituteList subs;
    if (options.oracle) {
      subs = oracle_topk(lm, q, filter);
    } else {
      subs = fastsubs_topk(lm, index, q, {filter, options.policy}).first;
    }
    text += format_subs_line(lm.vocab(), sentence, i, tokens[i], subs);
  }
  return text;
}

}  // namespace

std::size_t run_subs(const NgramLM& lm, const AlphaIndex& index, std::istream& in, std::ostream& out,
                     std::ostream& diag, const SubsOptions& options) {
  if (options.k < 1) throw std::invalid_argument("K must be at least 1");
  std::vector<std::vector<std::string>> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(tokenize(line));

  const std::size_t n = lines.size();
  std::vector<std::string> results(n);
  std::vector<char> done(n, 0);
  std::exception_ptr failure;
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      std::string text;
      try {
        if (!lines[i].empty()) text = substitute_sentence(lm, index, i, lines[i], options);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
      {
        std::lock_guard lock(mu);
        results[i] = std::move(text);
        done[i] = 1;
      }
      cv.notify_all();
    }
  };

  const unsigned threads = std::max(1u, options.threads);
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);

  // Single writer: emit in input order as results become ready.
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return done[i] != 0; });
      text = std::move(results[i]);
    }
    if (lines[i].empty()) {
      diag << "warning: skipping empty line " << i << '\n';
      ++skipped;
      continue;
    }
    out << text;
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return skipped;
}

std::vector<QueryPosition> sample_positions(const Corpus& corpus, std::size_t sample_size, std::uint64_t seed) {
  std::vector<QueryPosition> all;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    for (std::size_t t = 0; t < corpus[s].size(); ++t) all.push_back({s, t});
  }
  if (sample_size >= all.size()) return all;

  // Partial Fisher-Yates with explicit index arithmetic so the draw does
  // not depend on the standard library's distribution implementations.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < sample_size; ++i) {
    std::size_t span = all.size() - i;
    std::size_t j = i + static_cast<std::size_t>(rng() % span);
    std::swap(all[i], all[j]);
  }
  all.resize(sample_size);
  std::sort(all.begin(), all.end(), [](const QueryPosition& a, const QueryPosition& b) {
    return a.sentence != b.sentence ? a.sentence < b.sentence : a.token < b.token;
  });
  return all;
}

std::vector<std::size_t> parse_k_list(const std::string& text, std::size_t eligible_words) {
  std::vector<std::size_t> ks;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) throw std::invalid_argument("empty entry in K list");
    if (item == "V" || item == "all") {
      ks.push_back(std::max<std::size_t>(1, eligible_words));
      continue;
    }
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad K value: " + item);
    }
    if (pos != item.size()) throw std::invalid_argument("bad K value: " + item);
    if (v < 1) throw std::invalid_argument("K must be at least 1");
    ks.push_back(static_cast<std::size_t>(v));
  }
  if (ks.empty()) throw std::invalid_argument("empty K list");
  return ks;
}

std::size_t eligible_count(const NgramLM& lm, const CandidateFilter& filter) {
  auto mask = eligible_mask(lm, filter);
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

namespace {

std::string dump_list(const Vocab& vocab, const SubstituteList& subs) {
  std::string out;
  for (const Substitute& s : subs) out += fmt::format(" {}:{}({:.17g})", vocab.word(s.word), s.word, s.score);
  return out;
}

}  // namespace

CheckReport run_check(const NgramLM& lm, const AlphaIndex& index, const Corpus& corpus, const CheckOptions& options,
                      std::ostream& out) {
  CheckReport report;
  for (const QueryPosition& pos : sample_positions(corpus, options.sample_size, options.seed)) {
    ++report.queries;
    const Sentence& sentence = corpus[pos.sentence];
    for (std::size_t k : options.ks) {
      Query q = make_query(lm.vocab(), sentence, pos.token, k);
      SubstituteList expected = oracle_topk(lm, q, options.filter);
      SubstituteList got = fastsubs_topk(lm, index, q, {options.filter, options.policy}).first;
      ++report.comparisons;
      if (got == expected) continue;

      ++report.mismatches;
      std::string words;
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        if (i) words += ' ';
        words += i == pos.token ? "[" + sentence[i] + "]" : sentence[i];
      }
      report.first_mismatch = fmt::format(
          "mismatch at sentence {} token {} K={}\n  query: {}\n  oracle:{}\n  search:{}\n", pos.sentence, pos.token, k,
          words, dump_list(lm.vocab(), expected), dump_list(lm.vocab(), got));
      out << report.first_mismatch;
      out << fmt::format("check: {} queries, {} comparisons, {} mismatches\n", report.queries, report.comparisons,
                         report.mismatches);
      return report;
    }
  }
  out << fmt::format("check: {} queries, {} comparisons, {} mismatches\n", report.queries, report.comparisons,
                     report.mismatches);
  return report;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("slope inputs differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

double BenchSummary::mean_pops_at(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return mean_pops[i];
  }
  throw std::out_of_range("K not measured: " + std::to_string(k));
}

BenchSummary run_bench(const NgramLM& lm, const AlphaIndex& index, const Corpus& corpus, const BenchOptions& options,
                       std::ostream& out) {
  BenchSummary summary;
  const std::size_t vocab = eligible_count(lm, options.filter);
  auto positions = sample_positions(corpus, options.sample_size, options.seed);

  out << "V,K,query,pops,nanos\n";
  for (std::size_t k : options.ks) {
    double total = 0;
    for (std::size_t qi = 0; qi < positions.size(); ++qi) {
      Query q = make_query(lm.vocab(), corpus[positions[qi].sentence], positions[qi].token, k);
      auto [subs, stats] = fastsubs_topk(lm, index, q, {options.filter, options.policy});
      summary.records.push_back({vocab, k, qi, stats.pops, stats.nanos});
      out << vocab << ',' << k << ',' << qi << ',' << stats.pops << ',' << stats.nanos << '\n';
      total += static_cast<double>(stats.pops);
    }
    summary.ks.push_back(k);
    summary.mean_pops.push_back(positions.empty() ? 0.0 : total / static_cast<double>(positions.size()));
  }

  std::vector<double> xs(summary.ks.begin(), summary.ks.end());
  summary.slope = loglog_slope(xs, summary.mean_pops);
  for (std::size_t i = 0; i < summary.ks.size(); ++i) {
    out << fmt::format("# K={} mean_pops={:.3f}\n", summary.ks[i], summary.mean_pops[i]);
  }
  if (summary.slope) out << fmt::format("# loglog_slope={:.4f}\n", *summary.slope);
  else out << "# loglog_slope=NA\n";
  return summary;
}

}  // namespace fastsubs

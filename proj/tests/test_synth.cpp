#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fastsubs/driver.hpp"
#include "fastsubs/synth.hpp"
#include "test_util.hpp"

using namespace fastsubs;

namespace {

std::size_t token_count(const Corpus& c) {
  std::size_t n = 0;
  for (const auto& s : c) n += s.size();
  return n;
}

std::vector<std::uint64_t> rank_counts(const Corpus& c, std::size_t words) {
  std::vector<std::uint64_t> counts(words + 1, 0);
  for (const auto& s : c) {
    for (const auto& w : s) counts.at(std::stoul(w.substr(1)))++;
  }
  return counts;
}

}  // namespace

TEST_CASE("corpus generation is deterministic") {
  SynthConfig cfg = testutil::small_config(100, 3, 42, 3000);
  Corpus a = gen_corpus(cfg), b = gen_corpus(cfg);
  CHECK(a == b);
  CHECK(token_count(a) == 3000);
  cfg.seed = 43;
  CHECK(gen_corpus(cfg) != a);
  CHECK(estimate_arpa(a, 3, 0.5) == estimate_arpa(b, 3, 0.5));
}

TEST_CASE("corpus text round-trips") {
  Corpus c = gen_corpus(testutil::small_config(30, 2, 8, 500));
  std::stringstream ss;
  write_corpus(c, ss);
  CHECK(read_corpus(ss) == c);
  std::istringstream blanky("a b\n\n   \nc\n");
  CHECK(read_corpus(blanky) == Corpus{{"a", "b"}, {"c"}});
}

TEST_CASE("flat Zipf is uniform") {
  SynthConfig cfg = testutil::small_config(103, 2, 5, 1000000);
  cfg.zipf_s = 0.0;
  auto counts = rank_counts(gen_corpus(cfg), 100);
  const double expected = 1e6 / 100;
  double chi2 = 0;
  for (std::size_t r = 1; r <= 100; ++r) chi2 += std::pow(static_cast<double>(counts[r]) - expected, 2) / expected;
  // Upper 0.001 point of chi-square with 99 degrees of freedom (Wilson-Hilferty).
  const double df = 99, z = 3.090232;
  const double crit = df * std::pow(1 - 2 / (9 * df) + z * std::sqrt(2 / (9 * df)), 3);
  CHECK(chi2 < crit);
}

TEST_CASE("Zipf exponent one gives rank-frequency slope -1") {
  SynthConfig cfg = testutil::small_config(2003, 2, 6, 1000000);
  auto counts = rank_counts(gen_corpus(cfg), 2000);
  std::vector<double> x, y;
  for (std::size_t r = 10; r <= 1000; ++r) {
    x.push_back(static_cast<double>(r));
    y.push_back(static_cast<double>(counts[r]));
  }
  auto slope = loglog_slope(x, y);
  REQUIRE(slope);
  CHECK(*slope == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("repeated sentence gets the discounted frequency") {
  Corpus c(100, Sentence{"x", "y", "z"});
  NgramLM lm = testutil::parse(estimate_arpa(c, 3, 0.5));
  LogProb a = lm.alpha(testutil::ids(lm.vocab(), {"x", "y", "z"}));
  CHECK(a <= 0.0);
  CHECK(a == doctest::Approx(std::log10(99.5 / 100)).epsilon(0.0025));
  CHECK(std::abs(a - std::log10(99.5 / 100)) < 0.0025);
  // Unseen continuation still gets mass through back-off.
  CHECK(testutil::total_mass(lm, testutil::ids(lm.vocab(), {"x", "y"})) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("estimated models normalize and back-off weights are non-positive") {
  for (int order : {1, 2, 3, 4}) {
    SynthConfig cfg = testutil::small_config(120, order, 70 + order, 8000);
    std::string text = estimate_arpa(gen_corpus(cfg), order, cfg.discount);
    NgramLM lm = testutil::parse(text);
    for (int k = 1; k <= order; ++k) {
      lm.for_each_ngram(k, [&](std::span<const WordId>, const NgramEntry& e) {
        REQUIRE(e.beta <= 0.0);
        REQUIRE((is_absent(e.alpha) || e.alpha <= 0.0));
      });
    }
    std::mt19937_64 rng(order);
    for (int trial = 0; trial < 30; ++trial) {
      Query q = testutil::random_query(lm, rng, 1);
      auto hist = std::span<const WordId>(q.words).first(q.target);
      CHECK(testutil::total_mass(lm, hist) == doctest::Approx(1.0).epsilon(1e-6));
    }
    // Header counts match the emitted sections.
    std::istringstream in(text);
    CHECK_NOTHROW(parse_arpa(in));
  }
}

TEST_CASE("bad synthesis settings are rejected") {
  SynthConfig cfg;
  cfg.vocab_size = 3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.discount = 1.0;
  CHECK_THROWS_AS(gen_corpus(cfg), std::invalid_argument);
  cfg = {};
  cfg.zipf_s = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_THROWS_AS(estimate_arpa(Corpus{}, 3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(estimate_arpa(Corpus{{"a"}}, 0, 0.5), std::invalid_argument);
}

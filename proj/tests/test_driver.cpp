#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fastsubs/driver.hpp"
#include "test_util.hpp"

using namespace fastsubs;

namespace {

struct Model {
  NgramLM lm;
  AlphaIndex index;
  Corpus held_out;
};

Model small_model() {
  SynthConfig cfg = testutil::small_config(150, 3, 31, 6000);
  NgramLM lm = testutil::synth_model(cfg);
  AlphaIndex index(lm);
  cfg.seed = 32;
  cfg.tokens = 400;
  return {std::move(lm), std::move(index), gen_corpus(cfg)};
}

std::string corpus_text(const Corpus& c) {
  std::ostringstream out;
  write_corpus(c, out);
  return out.str();
}

std::string subs(const Model& m, const std::string& text, const SubsOptions& opts, std::string* diag = nullptr) {
  std::istringstream in(text);
  std::ostringstream out, err;
  run_subs(m.lm, m.index, in, out, err, opts);
  if (diag) *diag = err.str();
  return out.str();
}

}  // namespace

TEST_CASE("subs line format") {
  NgramLM lm = testutil::toy();
  const Vocab& v = lm.vocab();
  SubstituteList list{{v.id("c"), -1.09691}, {v.id("a"), -1.8239087}};
  CHECK(format_subs_line(v, 3, 1, "zebra", list) == "3\t1\tzebra\tc -1.096910\ta -1.823909\n");
  CHECK(format_subs_line(v, 0, 0, "a", {}) == "0\t0\ta\n");
}

TEST_CASE("subs on the toy model keeps OOV surface forms") {
  NgramLM lm = testutil::toy();
  AlphaIndex index(lm);
  std::istringstream in("a zebra b\n\nc\n");
  std::ostringstream out, err;
  SubsOptions opts;
  opts.k = 2;
  CHECK(run_subs(lm, index, in, out, err, opts) == 1);
  std::istringstream lines(out.str());
  std::vector<std::string> got;
  for (std::string l; std::getline(lines, l);) got.push_back(l);
  REQUIRE(got.size() == 4);
  CHECK(got[1].rfind("0\t1\tzebra\t", 0) == 0);
  CHECK(got[3].rfind("2\t0\tc\t", 0) == 0);
  CHECK(err.str().find("line 1") != std::string::npos);
}

TEST_CASE("search and oracle output are byte-identical, at any thread count") {
  Model m = small_model();
  std::string text = corpus_text(m.held_out);
  SubsOptions opts;
  opts.k = 7;
  std::string base = subs(m, text, opts);
  CHECK_FALSE(base.empty());
  SubsOptions oracle = opts;
  oracle.oracle = true;
  CHECK(subs(m, text, oracle) == base);
  SubsOptions many = opts;
  many.threads = 8;
  CHECK(subs(m, text, many) == base);
  CHECK(subs(m, text, many) == base);
  SubsOptions excl = opts;
  excl.exclude_target = true;
  excl.include_unk = true;
  SubsOptions excl_oracle = excl;
  excl_oracle.oracle = true;
  CHECK(subs(m, text, excl) == subs(m, text, excl_oracle));
}

TEST_CASE("check finds no mismatch, and catches a corrupted index") {
  Model m = small_model();
  std::size_t v = eligible_count(m.lm);
  CheckOptions opts;
  opts.ks = parse_k_list("1,2,V", v);
  opts.sample_size = 60;
  std::ostringstream out;
  CheckReport r = run_check(m.lm, m.index, m.held_out, opts, out);
  CHECK(r.ok());
  CHECK(r.queries == 60);
  CHECK(r.comparisons == 180);
  CHECK(out.str().find("0 mismatches") != std::string::npos);

  AlphaIndex broken(m.lm);
  broken.corrupt_for_testing(-1.0);
  opts.ks = {5};
  std::ostringstream bad;
  CheckReport r2 = run_check(m.lm, broken, m.held_out, opts, bad);
  CHECK_FALSE(r2.ok());
  CHECK(r2.mismatches == 1);
  CHECK(r2.first_mismatch.find("mismatch at sentence") != std::string::npos);

  opts.sample_size = 0;
  std::ostringstream none;
  CHECK(run_check(m.lm, m.index, m.held_out, opts, none).queries == 0);
}

TEST_CASE("bench rows and summary") {
  Model m = small_model();
  BenchOptions opts;
  opts.ks = {1, 4, 16};
  opts.sample_size = 25;
  std::ostringstream out;
  BenchSummary s = run_bench(m.lm, m.index, m.held_out, opts, out);
  CHECK(s.records.size() == 75);
  for (const auto& rec : s.records) CHECK(rec.pops >= 1);
  CHECK(s.slope.has_value());
  CHECK(s.mean_pops_at(4) >= s.mean_pops_at(1));
  CHECK_THROWS_AS(s.mean_pops_at(2), std::out_of_range);
  std::istringstream lines(out.str());
  std::size_t rows = 0, comments = 0;
  std::string header;
  std::getline(lines, header);
  CHECK(header == "V,K,query,pops,nanos");
  for (std::string l; std::getline(lines, l);) (l[0] == '#' ? comments : rows)++;
  CHECK(rows == 75);
  CHECK(comments == 4);
}

TEST_CASE("K lists") {
  CHECK(parse_k_list("1, 5,V", 40) == std::vector<std::size_t>{1, 5, 40});
  CHECK(parse_k_list("all", 9) == std::vector<std::size_t>{9});
  CHECK_THROWS_AS(parse_k_list("0", 9), std::invalid_argument);
  CHECK_THROWS_AS(parse_k_list("1,,2", 9), std::invalid_argument);
  CHECK_THROWS_AS(parse_k_list("3x", 9), std::invalid_argument);
  CHECK_THROWS_AS(parse_k_list("", 9), std::invalid_argument);
}

TEST_CASE("sampled positions are distinct and in order") {
  Corpus c{{"a", "b"}, {"c"}, {"d", "e", "f"}};
  auto all = sample_positions(c, 100, 1);
  CHECK(all.size() == 6);
  auto some = sample_positions(c, 4, 9);
  CHECK(some.size() == 4);
  for (std::size_t i = 1; i < some.size(); ++i) {
    CHECK((some[i - 1].sentence < some[i].sentence ||
           (some[i - 1].sentence == some[i].sentence && some[i - 1].token < some[i].token)));
  }
  CHECK(sample_positions(c, 4, 9) == some);
}

TEST_CASE("log-log slope recovers a power law") {
  std::vector<double> x{1, 2, 4, 8, 16}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.6));
  CHECK(*loglog_slope(x, y) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK_FALSE(loglog_slope({1, 1}, {2, 3}).has_value());
}

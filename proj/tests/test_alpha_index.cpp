#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "fastsubs/alpha_index.hpp"
#include "test_util.hpp"

using namespace fastsubs;
using testutil::ids;

TEST_CASE("unigram list is every finite unigram, best first") {
  NgramLM lm = testutil::toy();
  AlphaIndex index(lm);
  WordId hole[] = {kHole};
  auto list = index.list(hole);
  REQUIRE(list.size() == 5);  // <s> is absent
  CHECK(lm.vocab().word(list[0].word) == "a");
  CHECK(list[0].alpha == -0.5228787);
  CHECK(lm.vocab().word(list[4].word) == "<unk>");
  for (std::size_t i = 1; i < list.size(); ++i) CHECK(list[i - 1].alpha >= list[i].alpha);
}

TEST_CASE("context lists on the toy model") {
  NgramLM lm = testutil::toy();
  const Vocab& v = lm.vocab();
  AlphaIndex index(lm);
  // Words following "a".
  auto after_a = index.list(HoleContext{ids(v, {"a"}), 1});
  REQUIRE(after_a.size() == 2);
  CHECK(v.word(after_a[0].word) == "c");
  CHECK(after_a[0].alpha == -0.39794);
  CHECK(v.word(after_a[1].word) == "</s>");
  // Words preceding "b".
  auto before_b = index.list(HoleContext{ids(v, {"b"}), 0});
  REQUIRE(before_b.size() == 2);
  CHECK(v.word(before_b[0].word) == "<s>");
  CHECK(v.word(before_b[1].word) == "c");
  // Unknown context.
  CHECK(index.list(HoleContext{ids(v, {"<unk>"}), 1}).size() == 0);
  WordId pattern[] = {kHole, v.id("<unk>")};
  CHECK(index.list(pattern).empty());

  CHECK(index.total_pairs() == 5 + 2 * 7);
  CHECK(index.context_count(1) == 1);
  CHECK(HoleContext{ids(v, {"a"}), 1}.pattern() == std::vector<WordId>{v.id("a"), kHole});
}

TEST_CASE("beta bound is zero on models without positive weights") {
  NgramLM lm = testutil::toy();
  AlphaIndex index(lm);
  WordId hole[] = {kHole};
  CHECK(index.beta_bound(hole) == 0.0);
  NgramLM pos = testutil::parse(
      "\\data\\\nngram 1=4\n\\1-grams:\n-1 <unk>\n-0.5 x 0.25\n-0.5 y -0.5\n-0.6 </s>\n\\end\\\n");
  AlphaIndex pindex(pos);
  CHECK(pindex.beta_bound(hole) == 0.25);
}

TEST_CASE("index matches a brute-force rebuild") {
  for (int order : {2, 3, 4}) {
    NgramLM lm = testutil::synth_model(testutil::small_config(40, order, 3 + order));
    AlphaIndex index(lm);
    std::size_t pairs = 0;
    std::map<std::vector<WordId>, std::multiset<std::pair<WordId, LogProb>>> expected;
    for (int k = 1; k <= order; ++k) {
      lm.for_each_ngram(k, [&](std::span<const WordId> key, const NgramEntry& e) {
        if (is_absent(e.alpha)) return;
        for (std::size_t p = 0; p < key.size(); ++p) {
          std::vector<WordId> pattern(key.begin(), key.end());
          WordId w = pattern[p];
          pattern[p] = kHole;
          expected[pattern].insert({w, e.alpha});
          ++pairs;
        }
      });
    }
    CHECK(index.total_pairs() == pairs);
    std::size_t lists = 0;
    for (int k = 1; k <= order; ++k) {
      index.for_each_list(k, [&](std::span<const WordId> pattern, std::span<const AlphaItem> items) {
        ++lists;
        auto it = expected.find(std::vector<WordId>(pattern.begin(), pattern.end()));
        REQUIRE(it != expected.end());
        std::multiset<std::pair<WordId, LogProb>> got;
        for (const auto& item : items) got.insert({item.word, item.alpha});
        CHECK(got == it->second);
        CHECK(std::is_sorted(items.begin(), items.end(), [](const AlphaItem& a, const AlphaItem& b) {
          return a.alpha != b.alpha ? a.alpha > b.alpha : a.word < b.word;
        }));
      });
    }
    CHECK(lists == expected.size());
  }
}

TEST_CASE("corruption shifts every alpha") {
  NgramLM lm = testutil::toy();
  AlphaIndex index(lm);
  index.corrupt_for_testing(-1.0);
  WordId hole[] = {kHole};
  CHECK(index.list(hole)[0].alpha == doctest::Approx(-1.5228787));
}

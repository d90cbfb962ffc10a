#include "features.hpp"

#include <set>

#include "doctest.h"
#include "rng.hpp"
#include "test_util.hpp"

using namespace almd;
using testutil::make_sentence;

namespace {

std::set<std::string> feature_names(const FeatureVector& fv,
                                    const FeatureInterner& interner) {
  std::set<std::string> names;
  for (auto id : fv) names.insert(interner.name(id));
  return names;
}

}  // namespace

TEST_CASE("inside view of a capitalized token") {
  Sentence s = make_sentence(0, {"John", "slept"});
  FeatureInterner interner;
  auto names = feature_names(extract(FeatureView::Inside, s, 0, interner), interner);
  CHECK(names.count("in:w=John"));
  CHECK(names.count("in:lc=john"));
  CHECK(names.count("in:shape=cap"));
  CHECK(names.count("in:pre1=J"));
  CHECK(names.count("in:suf1=n"));
  CHECK(names.count("in:pre4=John"));
  CHECK(names.count("in:bias"));
  for (const auto& n : names) CHECK(n.rfind("in:", 0) == 0);
}

TEST_CASE("shape classes") {
  Sentence s = make_sentence(0, {"USA", "r2d2", "plain", "Mixed", ",", "x"});
  FeatureInterner interner;
  auto shape_of = [&](int i) {
    auto names = feature_names(extract(FeatureView::Inside, s, i, interner), interner);
    for (const auto& n : names)
      if (n.rfind("in:shape=", 0) == 0) return n.substr(9);
    return std::string();
  };
  CHECK(shape_of(0) == "allcaps");
  CHECK(shape_of(1) == "digit");
  CHECK(shape_of(2) == "lower");
  CHECK(shape_of(3) == "cap");
  CHECK(shape_of(4) == "other");
  CHECK(shape_of(5) == "lower");
}

TEST_CASE("outside view of a one-token sentence is sentinels plus bias") {
  Sentence s = make_sentence(0, {"word"});
  FeatureInterner interner;
  auto names = feature_names(extract(FeatureView::Outside, s, 0, interner), interner);
  CHECK(names == std::set<std::string>{"out:bias", "out:bnd[-2]", "out:bnd[-1]",
                                       "out:bnd[+1]", "out:bnd[+2]"});
}

TEST_CASE("outside view carries neighbor and bigram features") {
  Sentence s = make_sentence(0, {"The", "big", "Dog", "ran", "off"});
  FeatureInterner interner;
  auto names = feature_names(extract(FeatureView::Outside, s, 2, interner), interner);
  CHECK(names.count("out:w[-2]=The"));
  CHECK(names.count("out:lc[-2]=the"));
  CHECK(names.count("out:w[-1]=big"));
  CHECK(names.count("out:w[+1]=ran"));
  CHECK(names.count("out:w[+2]=off"));
  CHECK(names.count("out:big=big_ran"));
  CHECK(names.count("out:bias"));
  // nothing in the outside view mentions the current token
  for (const auto& n : names) CHECK(n.find("Dog") == std::string::npos);
}

TEST_CASE("full view is the disjoint union of inside and outside") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Corpus corpus = testutil::random_corpus(rng, 1);
    const Sentence& s = corpus.sentences[0];
    int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.length())));
    FeatureInterner interner;
    auto inside = extract(FeatureView::Inside, s, i, interner);
    auto outside = extract(FeatureView::Outside, s, i, interner);
    auto full = extract(FeatureView::Full, s, i, interner);
    CHECK(full.size() == inside.size() + outside.size());
    std::set<std::uint32_t> in_ids(inside.begin(), inside.end());
    for (auto id : outside) CHECK(in_ids.count(id) == 0);
  }
}

TEST_CASE("view locality: inside ignores neighbors, outside ignores self") {
  Sentence s = make_sentence(0, {"aa", "bb", "cc"});
  FeatureInterner interner;
  auto base_out = feature_names(extract(FeatureView::Outside, s, 1, interner), interner);
  auto base_in = feature_names(extract(FeatureView::Inside, s, 1, interner), interner);

  Sentence self_changed = s;
  self_changed.tokens[1] = "ZZ";
  CHECK(feature_names(extract(FeatureView::Outside, self_changed, 1, interner),
                      interner) == base_out);

  Sentence neighbor_changed = s;
  neighbor_changed.tokens[0] = "QQ";
  neighbor_changed.tokens[2] = "RR";
  CHECK(feature_names(extract(FeatureView::Inside, neighbor_changed, 1, interner),
                      interner) == base_in);
}

TEST_CASE("frozen interner never grows") {
  Sentence s = make_sentence(0, {"known"});
  FeatureInterner interner;
  extract(FeatureView::Full, s, 0, interner);
  interner.freeze();
  auto before = interner.size();

  Sentence unseen = make_sentence(1, {"unseenword"});
  auto fv = extract(FeatureView::Full, unseen, 0, interner);
  CHECK(interner.size() == before);
  // shared features (bias, sentinels, shape) still resolve
  for (auto id : fv) CHECK(id < before);

  const FeatureInterner& frozen = interner;
  auto fv2 = extract(FeatureView::Full, unseen, 0, frozen);
  CHECK(fv2 == fv);
}

TEST_CASE("extract rejects out-of-range indices") {
  Sentence s = make_sentence(0, {"a"});
  FeatureInterner interner;
  CHECK_THROWS_AS(extract(FeatureView::Inside, s, 1, interner), Error);
  CHECK_THROWS_AS(extract(FeatureView::Inside, s, -1, interner), Error);
}

#include "active_loop.hpp"

#include <numeric>
#include <set>

#include "doctest.h"
#include "rng.hpp"
#include "test_util.hpp"

using namespace almd;
using testutil::make_sentence;

namespace {

Corpus pool_with_lengths(const std::vector<int>& lengths) {
  Corpus corpus;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    std::vector<std::string> toks(static_cast<std::size_t>(lengths[i]), "w");
    corpus.sentences.push_back(make_sentence(static_cast<int>(i), toks));
  }
  return corpus;
}

SynthSpec small_spec(int sentences = 260) {
  SynthSpec spec;
  spec.sentences = sentences;
  spec.categories = {"PER", "ORG", "LOC"};
  spec.min_sentence_len = 5;
  spec.max_sentence_len = 14;
  spec.sentences_per_doc = 20;
  return spec;
}

TrainConfig fast_train() {
  TrainConfig cfg;
  cfg.max_iters = 60;
  cfg.tol = 1e-5;
  return cfg;
}

}  // namespace

TEST_CASE("take_batch stopping rule") {
  Corpus pool = pool_with_lengths({4, 4, 4});
  std::vector<int> ranked = {0, 1, 2};
  // |12-10| <= |8-10| so the crossing sentence is kept
  CHECK(take_batch(ranked, pool, 10) == std::vector<int>{0, 1, 2});

  Corpus pool2 = pool_with_lengths({4, 4, 9});
  // |17-10| > |8-10| so it is not
  CHECK(take_batch(ranked, pool2, 10) == std::vector<int>{0, 1});

  // a first sentence longer than the budget is still taken
  Corpus pool3 = pool_with_lengths({12});
  CHECK(take_batch({0}, pool3, 10) == std::vector<int>{0});

  CHECK(take_batch({}, pool, 10).empty());
  // exact hit: overshoot 2 vs undershoot 2 at the third sentence
  Corpus pool4 = pool_with_lengths({5, 5, 4});
  CHECK(take_batch({0, 1, 2}, pool4, 10) == std::vector<int>{0, 1});
}

TEST_CASE("take_batch lands within one sentence length of the budget") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> lengths;
    int max_len = 0;
    for (int i = 0; i < 40; ++i) {
      int len = 1 + static_cast<int>(rng.below(20));
      lengths.push_back(len);
      max_len = std::max(max_len, len);
    }
    Corpus pool = pool_with_lengths(lengths);
    std::vector<int> ranked(lengths.size());
    std::iota(ranked.begin(), ranked.end(), 0);
    rng.shuffle(ranked);

    std::uint64_t budget = 20 + rng.below(100);
    auto batch = take_batch(ranked, pool, budget);
    std::uint64_t words = 0;
    for (int id : batch) words += static_cast<std::uint64_t>(lengths[static_cast<std::size_t>(id)]);
    std::uint64_t gap = words > budget ? words - budget : budget - words;
    CHECK(gap <= static_cast<std::uint64_t>(max_len));
  }
}

TEST_CASE("take_batch rejects ids outside the pool") {
  Corpus pool = pool_with_lengths({3});
  CHECK_THROWS_AS(take_batch({5}, pool, 10), Error);
}

TEST_CASE("select_seed is deterministic and budget-shaped") {
  SynthSpec spec = small_spec();
  Corpus pool = generate_synthetic(spec, 2);
  StepBudget budget;
  budget.seed_size_words = 400;

  auto a = select_seed(pool, budget, 5);
  auto b = select_seed(pool, budget, 5);
  CHECK(a == b);
  auto c = select_seed(pool, budget, 6);
  CHECK_FALSE(a == c);

  std::uint64_t words = 0;
  for (const auto& s : pool.sentences)
    if (std::find(a.begin(), a.end(), s.id) != a.end())
      words += static_cast<std::uint64_t>(s.length());
  std::uint64_t gap = words > 400 ? words - 400 : 400 - words;
  CHECK(gap <= static_cast<std::uint64_t>(spec.max_sentence_len));

  StepBudget too_big;
  too_big.seed_size_words = 100000;
  CHECK_THROWS_AS(select_seed(pool, too_big, 5), Error);
}

TEST_CASE("select_seed: tiny budget takes one sentence") {
  Corpus pool = pool_with_lengths({5, 5, 5, 5});
  StepBudget budget;
  budget.seed_size_words = 5;
  CHECK(select_seed(pool, budget, 3).size() == 1);
}

TEST_CASE("redistribute balances halves") {
  LoopState state;
  state.pool_ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};

  redistribute({1, 2, 3, 4}, state);
  CHECK(state.half_count(Half::A) == 2);
  CHECK(state.half_count(Half::B) == 2);
  CHECK(state.labeled[0] == std::pair<int, Half>{1, Half::A});
  CHECK(state.labeled[1] == std::pair<int, Half>{2, Half::B});
  CHECK(state.pool_ids == std::vector<int>{5, 6, 7, 8, 9, 10, 11, 12});

  // force halves to (5,4): next assignment starts with B
  redistribute({5, 6, 7, 8, 9}, state);
  REQUIRE(state.half_count(Half::A) == 5);
  REQUIRE(state.half_count(Half::B) == 4);
  redistribute({10, 11, 12}, state);
  CHECK(state.half_count(Half::A) == 6);
  CHECK(state.half_count(Half::B) == 6);
  CHECK(state.labeled[9].second == Half::B);  // B was smaller
  CHECK(state.pool_ids.empty());

  CHECK_THROWS_AS(redistribute({1}, state), Error);
}

TEST_CASE("redistribute keeps halves within one of each other") {
  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    LoopState state;
    int next_id = 0;
    for (int round = 0; round < 6; ++round) {
      std::vector<int> batch;
      int n = 1 + static_cast<int>(rng.below(7));
      for (int i = 0; i < n; ++i) batch.push_back(next_id++);
      redistribute(batch, state);
      auto a = state.half_count(Half::A);
      auto b = state.half_count(Half::B);
      CHECK((a > b ? a - b : b - a) <= 1);
    }
  }
}

TEST_CASE("run_experiment: zero steps yields only the seed point") {
  Corpus corpus = generate_synthetic(small_spec(), 4);
  auto [pool, dev] = split_pool_dev(corpus, 0.3, 1);
  StepBudget budget;
  budget.seed_size_words = 300;
  budget.step_size_words = 300;
  budget.num_steps = 0;
  ScoringPolicy policy;
  LearningCurve curve =
      run_experiment(pool, dev, CommitteeSetting::FeatureDifferent, policy,
                     budget, fast_train(), 7);
  REQUIRE(curve.points.size() == 1);
  CHECK(curve.points[0].step == 0);
  CHECK_FALSE(curve.truncated);
}

TEST_CASE("run_experiment: determinism and budget accounting") {
  Corpus corpus = generate_synthetic(small_spec(), 4);
  auto [pool, dev] = split_pool_dev(corpus, 0.3, 1);
  StepBudget budget;
  budget.seed_size_words = 300;
  budget.step_size_words = 250;
  budget.num_steps = 3;
  ScoringPolicy policy;
  policy.metric = Metric::ConfSum;

  TrainConfig cfg = fast_train();
  LearningCurve c1 = run_experiment(pool, dev, CommitteeSetting::FeatureDifferent,
                                    policy, budget, cfg, 7);
  LearningCurve c2 = run_experiment(pool, dev, CommitteeSetting::FeatureDifferent,
                                    policy, budget, cfg, 7);
  REQUIRE(c1.points.size() == c2.points.size());
  for (std::size_t i = 0; i < c1.points.size(); ++i) {
    CHECK(c1.points[i].words_labeled == c2.points[i].words_labeled);
    CHECK(c1.points[i].eval.overall.f == c2.points[i].eval.overall.f);
  }

  REQUIRE(c1.points.size() == 4);
  std::uint64_t expected = c1.points[0].words_labeled;
  for (std::size_t i = 1; i < c1.points.size(); ++i) {
    expected += c1.points[i].batch_words;
    CHECK(c1.points[i].words_labeled == expected);
    CHECK(c1.points[i].words_labeled > c1.points[i - 1].words_labeled);
    // batches stay within one max sentence length of the step budget
    std::uint64_t gap = c1.points[i].batch_words > budget.step_size_words
                            ? c1.points[i].batch_words - budget.step_size_words
                            : budget.step_size_words - c1.points[i].batch_words;
    CHECK(gap <= 14);
  }
}

TEST_CASE("run_experiment: DD halves and committee settings both work") {
  Corpus corpus = generate_synthetic(small_spec(), 4);
  auto [pool, dev] = split_pool_dev(corpus, 0.3, 1);
  StepBudget budget;
  budget.seed_size_words = 300;
  budget.step_size_words = 250;
  budget.num_steps = 2;
  ScoringPolicy policy;
  policy.metric = Metric::FMeasure;
  LearningCurve curve = run_experiment(pool, dev, CommitteeSetting::DataDifferent,
                                       policy, budget, fast_train(), 7);
  CHECK(curve.points.size() == 3);
}

TEST_CASE("FD committee members share no feature names") {
  Corpus corpus = generate_synthetic(small_spec(60), 4);
  std::vector<const Sentence*> sents;
  for (const auto& s : corpus.sentences) sents.push_back(&s);
  LabelMap labels = LabelMap::from_sentences(sents);
  TrainConfig cfg = fast_train();
  Model inside = train(sents, labels, FeatureView::Inside, cfg).model;
  Model outside = train(sents, labels, FeatureView::Outside, cfg).model;
  for (std::uint32_t i = 0; i < inside.features.size(); ++i)
    CHECK(outside.features.lookup(inside.features.name(i)) ==
          FeatureInterner::npos);
}

TEST_CASE("run_experiment: pool exhaustion truncates with a warning") {
  Corpus corpus = generate_synthetic(small_spec(80), 4);
  auto [pool, dev] = split_pool_dev(corpus, 0.3, 1);
  StepBudget budget;
  budget.seed_size_words = 200;
  budget.step_size_words = 200;
  budget.num_steps = 50;  // far beyond the pool
  ScoringPolicy policy;
  policy.metric = Metric::ConfSum;
  LearningCurve curve = run_experiment(pool, dev, CommitteeSetting::FeatureDifferent,
                                       policy, budget, fast_train(), 7);
  CHECK(curve.truncated);
  CHECK_FALSE(curve.warning.empty());
  CHECK(curve.points.back().words_labeled == pool.word_count());
}

TEST_CASE("exhausted strategies agree on the terminal model") {
  Corpus corpus = generate_synthetic(small_spec(80), 4);
  auto [pool, dev] = split_pool_dev(corpus, 0.3, 1);
  StepBudget budget;
  budget.seed_size_words = 200;
  budget.step_size_words = 200;
  budget.num_steps = 50;
  TrainConfig cfg = fast_train();

  ScoringPolicy conf;
  conf.metric = Metric::ConfSum;
  ScoringPolicy rnd;
  rnd.metric = Metric::Random;

  LearningCurve a = run_experiment(pool, dev, CommitteeSetting::FeatureDifferent,
                                   conf, budget, cfg, 7);
  LearningCurve b = run_experiment(pool, dev, CommitteeSetting::FeatureDifferent,
                                   rnd, budget, cfg, 7);
  REQUIRE(a.truncated);
  REQUIRE(b.truncated);
  CHECK(a.points.back().words_labeled == b.points.back().words_labeled);
  CHECK(std::abs(a.points.back().eval.overall.f -
                 b.points.back().eval.overall.f) < 1e-9);
}

#include "active_loop.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "rng.hpp"

namespace almd {

const char* to_string(CommitteeSetting setting) {
  return setting == CommitteeSetting::DataDifferent ? "dd" : "fd";
}

std::optional<CommitteeSetting> parse_committee(std::string_view s) {
  if (s == "dd") return CommitteeSetting::DataDifferent;
  if (s == "fd") return CommitteeSetting::FeatureDifferent;
  return std::nullopt;
}

namespace {

std::unordered_map<int, const Sentence*> index_by_id(const Corpus& corpus) {
  std::unordered_map<int, const Sentence*> index;
  index.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) index.emplace(s.id, &s);
  return index;
}

}  // namespace

std::vector<int> take_batch(const std::vector<int>& ranked, const Corpus& pool,
                            std::uint64_t budget_words) {
  auto index = index_by_id(pool);
  std::vector<int> batch;
  std::uint64_t cum = 0;
  for (int id : ranked) {
    auto it = index.find(id);
    if (it == index.end())
      fail(ErrorKind::Structure,
           "ranked sentence " + std::to_string(id) + " is not in the pool");
    const std::uint64_t len = static_cast<std::uint64_t>(it->second->length());
    if (cum + len < budget_words) {
      batch.push_back(id);
      cum += len;
      continue;
    }
    // Crossing (or exactly hitting) the budget: keep the sentence iff
    // overshooting is at least as close as stopping short.
    const std::uint64_t over = cum + len - budget_words;
    const std::uint64_t under = budget_words - cum;
    if (over <= under) batch.push_back(id);
    break;
  }
  return batch;
}

std::vector<int> select_seed(const Corpus& pool, const StepBudget& budget,
                             std::uint64_t seed) {
  if (pool.word_count() < budget.seed_size_words)
    fail(ErrorKind::Config,
         "pool has " + std::to_string(pool.word_count()) +
             " words, fewer than the seed budget of " +
             std::to_string(budget.seed_size_words));
  std::vector<int> ids;
  ids.reserve(pool.sentences.size());
  for (const auto& s : pool.sentences) ids.push_back(s.id);
  Rng rng(seed);
  rng.shuffle(ids);
  return take_batch(ids, pool, budget.seed_size_words);
}

void redistribute(const std::vector<int>& batch, LoopState& state) {
  std::set<int> labeled_ids;
  for (const auto& [id, half] : state.labeled) labeled_ids.insert(id);
  for (int id : batch)
    if (labeled_ids.count(id))
      fail(ErrorKind::Structure,
           "sentence " + std::to_string(id) + " is already labeled");

  std::size_t count_a = state.half_count(Half::A);
  std::size_t count_b = state.half_count(Half::B);
  Half next = count_b < count_a ? Half::B : Half::A;
  for (int id : batch) {
    state.labeled.emplace_back(id, next);
    next = next == Half::A ? Half::B : Half::A;
  }

  std::set<int> batch_ids(batch.begin(), batch.end());
  std::erase_if(state.pool_ids, [&](int id) { return batch_ids.count(id) > 0; });
}

namespace {

const std::vector<MentionLevel> kEvalLevels = {MentionLevel::Nam,
                                               MentionLevel::Nom};

std::vector<const Sentence*> gather_sorted(
    const std::vector<std::pair<int, Half>>& labeled,
    const std::unordered_map<int, const Sentence*>& index,
    std::optional<Half> half = std::nullopt) {
  std::vector<int> ids;
  for (const auto& [id, h] : labeled)
    if (!half || h == *half) ids.push_back(id);
  // Canonical order: training depends only on the selected set, not on
  // the order sentences were picked in.
  std::sort(ids.begin(), ids.end());
  std::vector<const Sentence*> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(index.at(id));
  return out;
}

CurvePoint evaluate_main(const std::vector<const Sentence*>& labeled,
                         const LabelMap& labels, const Corpus& dev,
                         const TrainConfig& cfg, int step,
                         std::uint64_t batch_words) {
  Model main = train(labeled, labels, FeatureView::Full, cfg).model;
  std::vector<std::vector<Mention>> predicted;
  predicted.reserve(dev.sentences.size());
  for (const auto& s : dev.sentences)
    predicted.push_back(predict(main, s).mentions);

  CurvePoint pt;
  pt.step = step;
  pt.batch_words = batch_words;
  for (const auto* s : labeled)
    pt.words_labeled += static_cast<std::uint64_t>(s->length());
  pt.eval = evaluate(predicted, dev, kEvalLevels);
  return pt;
}

}  // namespace

LearningCurve run_experiment(const Corpus& pool, const Corpus& dev,
                             CommitteeSetting setting,
                             const ScoringPolicy& policy,
                             const StepBudget& budget, const TrainConfig& cfg,
                             std::uint64_t run_seed) {
  policy.validate(pool.categories);
  if (budget.seed_size_words == 0 || budget.step_size_words == 0)
    fail(ErrorKind::Config, "budget sizes must be positive");
  if (budget.num_steps < 0)
    fail(ErrorKind::Config, "num_steps must be non-negative");

  auto index = index_by_id(pool);
  std::vector<const Sentence*> pool_ptrs;  // scratch, rebuilt per step

  std::vector<MentionLevel> pool_levels;
  {
    std::set<MentionLevel> lvls;
    for (const auto& s : pool.sentences)
      for (const auto& m : s.mentions) lvls.insert(m.level);
    pool_levels.assign(lvls.begin(), lvls.end());
  }
  const LabelMap labels = LabelMap::build(pool.categories, pool_levels);

  Rng rng(run_seed);
  LoopState state;
  for (const auto& s : pool.sentences) state.pool_ids.push_back(s.id);

  std::vector<int> seed_ids = select_seed(pool, budget, rng.next());
  redistribute(seed_ids, state);

  LearningCurve curve;
  curve.categories = pool.categories;

  std::vector<const Sentence*> labeled = gather_sorted(state.labeled, index);
  CurvePoint seed_pt =
      evaluate_main(labeled, labels, dev, cfg, 0, /*batch_words=*/0);
  seed_pt.batch_words = seed_pt.words_labeled;
  curve.points.push_back(seed_pt);

  // Committee predictions are only needed when the metric looks at them:
  // a pure random draw with no min-mention filter skips them entirely,
  // which changes nothing in the output.
  const bool needs_committee =
      policy.metric != Metric::Random || policy.min_mentions > 0;

  for (int step = 1; step <= budget.num_steps; ++step) {
    const std::uint64_t draw_seed = rng.next();
    if (state.pool_ids.empty()) {
      curve.truncated = true;
      curve.warning = "pool exhausted after step " + std::to_string(step - 1);
      break;
    }

    pool_ptrs.clear();
    for (int id : state.pool_ids) pool_ptrs.push_back(index.at(id));

    std::vector<Prediction> preds_a, preds_b;
    if (needs_committee) {
      Model member_a, member_b;
      if (setting == CommitteeSetting::DataDifferent) {
        auto half_a = gather_sorted(state.labeled, index, Half::A);
        auto half_b = gather_sorted(state.labeled, index, Half::B);
        member_a = train(half_a, labels, FeatureView::Full, cfg).model;
        member_b = train(half_b, labels, FeatureView::Full, cfg).model;
      } else {
        member_a = train(labeled, labels, FeatureView::Inside, cfg).model;
        member_b = train(labeled, labels, FeatureView::Outside, cfg).model;
      }
      preds_a.reserve(pool_ptrs.size());
      preds_b.reserve(pool_ptrs.size());
      for (const auto* s : pool_ptrs) {
        preds_a.push_back(predict(member_a, *s));
        preds_b.push_back(predict(member_b, *s));
      }
    }

    auto scores = score_pool(pool_ptrs, preds_a, preds_b, policy, draw_seed);
    auto ranked = rank(scores, policy.metric);
    auto batch = take_batch(ranked, pool, budget.step_size_words);
    if (batch.empty()) {
      curve.truncated = true;
      curve.warning = "no selectable sentences at step " + std::to_string(step);
      break;
    }

    // Oracle annotation: gold labels are already attached to the pool
    // sentences, so redistribution is all that remains.
    redistribute(batch, state);

    std::uint64_t batch_words = 0;
    for (int id : batch)
      batch_words += static_cast<std::uint64_t>(index.at(id)->length());

    labeled = gather_sorted(state.labeled, index);
    curve.points.push_back(
        evaluate_main(labeled, labels, dev, cfg, step, batch_words));
  }
  return curve;
}

}  // namespace almd

#include "scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rng.hpp"

namespace almd {

const char* to_string(Metric metric) {
  switch (metric) {
    case Metric::Random: return "random";
    case Metric::FMeasure: return "f_measure";
    case Metric::MacroF: return "macro_f";
    case Metric::ConfSum: return "conf_sum";
    case Metric::ConfDiff: return "conf_diff";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view s) {
  if (s == "random") return Metric::Random;
  if (s == "f_measure") return Metric::FMeasure;
  if (s == "macro_f") return Metric::MacroF;
  if (s == "conf_sum") return Metric::ConfSum;
  if (s == "conf_diff") return Metric::ConfDiff;
  return std::nullopt;
}

double ScoringPolicy::category_weight(const std::string& category) const {
  auto it = category_weights.find(category);
  return it == category_weights.end() ? 1.0 : it->second;
}

void ScoringPolicy::validate(const std::vector<std::string>& categories) const {
  for (const auto& [cat, w] : category_weights)
    if (w < 0) fail(ErrorKind::Config, "negative category weight for " + cat);
  for (double w : level_weights)
    if (w < 0) fail(ErrorKind::Config, "negative level weight");
  if (categories.empty()) return;  // nothing to weight
  for (const auto& cat : categories)
    for (int lvl = 0; lvl < kNumLevels; ++lvl)
      if (category_weight(cat) * level_weights[static_cast<std::size_t>(lvl)] > 0)
        return;
  fail(ErrorKind::Config,
       "scoring policy gives zero weight to every (category, level) pair");
}

namespace {

std::vector<Mention> visible(const std::vector<Mention>& mentions,
                             const ScoringPolicy& policy) {
  std::vector<Mention> out;
  for (const auto& m : mentions)
    if (policy.mention_weight(m) > 0) out.push_back(m);
  std::sort(out.begin(), out.end());
  return out;
}

double weight_sum(const std::vector<Mention>& mentions,
                  const ScoringPolicy& policy) {
  double s = 0;
  for (const auto& m : mentions) s += policy.mention_weight(m);
  return s;
}

}  // namespace

double pair_f_measure(const std::vector<Mention>& m1,
                      const std::vector<Mention>& m2,
                      const ScoringPolicy& policy) {
  std::vector<Mention> a = visible(m1, policy);
  std::vector<Mention> b = visible(m2, policy);
  if (a.empty() && b.empty()) return 1.0;
  std::vector<Mention> matched;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(matched));
  double denom = weight_sum(a, policy) + weight_sum(b, policy);
  return 2.0 * weight_sum(matched, policy) / denom;
}

double macro_f_measure(const std::vector<Mention>& m1,
                       const std::vector<Mention>& m2,
                       const ScoringPolicy& policy) {
  std::vector<Mention> a = visible(m1, policy);
  std::vector<Mention> b = visible(m2, policy);
  std::set<std::string> cats;
  for (const auto& m : a) cats.insert(m.category);
  for (const auto& m : b) cats.insert(m.category);

  double num = 0, denom = 0;
  for (const auto& cat : cats) {
    double cw = policy.category_weight(cat);
    if (cw <= 0) continue;
    std::vector<Mention> ac, bc, matched;
    for (const auto& m : a)
      if (m.category == cat) ac.push_back(m);
    for (const auto& m : b)
      if (m.category == cat) bc.push_back(m);
    std::set_intersection(ac.begin(), ac.end(), bc.begin(), bc.end(),
                          std::back_inserter(matched));
    double f = 2.0 * static_cast<double>(matched.size()) /
               static_cast<double>(ac.size() + bc.size());
    num += cw * f;
    denom += cw;
  }
  return denom > 0 ? num / denom : 1.0;
}

double conf_sum(double c1, double c2) { return 0.5 * (c1 + c2); }

double conf_diff(double c1, double c2) { return std::abs(c1 - c2); }

std::vector<SentenceScore> score_pool(
    const std::vector<const Sentence*>& pool,
    const std::vector<Prediction>& preds_a,
    const std::vector<Prediction>& preds_b, const ScoringPolicy& policy,
    std::uint64_t draw_seed) {
  const bool predictions_optional =
      policy.metric == Metric::Random && policy.min_mentions == 0;
  const bool have_preds = !preds_a.empty() || !preds_b.empty();
  if (have_preds || !predictions_optional) {
    if (preds_a.size() != pool.size() || preds_b.size() != pool.size())
      fail(ErrorKind::Structure,
           "prediction lists are not aligned with the pool");
  }

  Rng rng(draw_seed);
  std::vector<SentenceScore> scores;
  scores.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    SentenceScore ss;
    ss.sentence_id = pool[i]->id;

    // Per-sentence draw happens for every metric so that the stream of
    // draws is aligned across strategies sharing a run seed.
    double draw = rng.real01();

    if (have_preds) {
      std::vector<Mention> va = visible(preds_a[i].mentions, policy);
      std::vector<Mention> vb = visible(preds_b[i].mentions, policy);
      ss.eligible = std::max(va.size(), vb.size()) >= policy.min_mentions;
    } else {
      ss.eligible = true;
    }

    switch (policy.metric) {
      case Metric::Random:
        ss.score = draw;
        break;
      case Metric::FMeasure:
        ss.score = pair_f_measure(preds_a[i].mentions, preds_b[i].mentions, policy);
        break;
      case Metric::MacroF:
        ss.score = macro_f_measure(preds_a[i].mentions, preds_b[i].mentions, policy);
        break;
      case Metric::ConfSum:
        ss.score = conf_sum(preds_a[i].confidence, preds_b[i].confidence);
        break;
      case Metric::ConfDiff:
        ss.score = conf_diff(preds_a[i].confidence, preds_b[i].confidence);
        break;
    }
    scores.push_back(ss);
  }
  return scores;
}

std::vector<int> rank(const std::vector<SentenceScore>& scores, Metric metric) {
  const bool descending = metric == Metric::ConfDiff || metric == Metric::Random;
  std::vector<const SentenceScore*> eligible;
  for (const auto& s : scores)
    if (s.eligible) eligible.push_back(&s);
  std::sort(eligible.begin(), eligible.end(),
            [descending](const SentenceScore* a, const SentenceScore* b) {
              if (a->score != b->score)
                return descending ? a->score > b->score : a->score < b->score;
              return a->sentence_id < b->sentence_id;
            });
  std::vector<int> ids;
  ids.reserve(eligible.size());
  for (const auto* s : eligible) ids.push_back(s->sentence_id);
  return ids;
}

}  // namespace almd

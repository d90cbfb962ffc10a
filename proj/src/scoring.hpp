#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "maxent.hpp"

namespace almd {

enum class Metric : std::uint8_t {
  Random = 0,
  FMeasure = 1,
  MacroF = 2,
  ConfSum = 3,
  ConfDiff = 4,
};

const char* to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view s);

// Selection policy: which metric ranks the pool, how mentions are
// weighted, and the minimum visible-mention count a sentence needs to
// stay a candidate. A mention's weight is category weight times level
// weight; zero-weight mentions are invisible to every metric and to
// the min-mention filter.
struct ScoringPolicy {
  Metric metric = Metric::ConfSum;
  std::map<std::string, double> category_weights;  // absent category -> 1.0
  std::array<double, kNumLevels> level_weights = {1.0, 1.0, 0.0};  // NAM, NOM, PRO
  std::uint32_t min_mentions = 0;

  double category_weight(const std::string& category) const;
  double level_weight(MentionLevel level) const {
    return level_weights[static_cast<std::size_t>(level)];
  }
  double mention_weight(const Mention& m) const {
    return category_weight(m.category) * level_weight(m.level);
  }

  // At least one (category, level) pair must have positive combined
  // weight; throws ErrorKind::Config otherwise.
  void validate(const std::vector<std::string>& categories) const;
};

struct SentenceScore {
  int sentence_id = 0;
  double score = 0;
  bool eligible = true;
};

// Agreement F between two predicted mention sets: mentions matching
// exactly in (span, category, level) count once, weighted.
// 1 when both sets are empty after zero-weight filtering.
double pair_f_measure(const std::vector<Mention>& m1,
                      const std::vector<Mention>& m2,
                      const ScoringPolicy& policy);

// Category-wise unit-weight F, averaged over categories present in
// either set, weighted by category weight. 1 if no category qualifies.
double macro_f_measure(const std::vector<Mention>& m1,
                       const std::vector<Mention>& m2,
                       const ScoringPolicy& policy);

double conf_sum(double c1, double c2);   // (c1+c2)/2, low = informative
double conf_diff(double c1, double c2);  // |c1-c2|, high = disagreement

// Scores every pool sentence under the policy. preds_a/preds_b must be
// aligned with the pool; for Metric::Random with min_mentions == 0 they
// may be empty (the draw ignores predictions). draw_seed feeds the
// per-sentence draws of Metric::Random.
std::vector<SentenceScore> score_pool(
    const std::vector<const Sentence*>& pool,
    const std::vector<Prediction>& preds_a,
    const std::vector<Prediction>& preds_b, const ScoringPolicy& policy,
    std::uint64_t draw_seed);

// Eligible sentence ids, most informative first: ascending score for
// FMeasure/MacroF/ConfSum, descending for ConfDiff and Random; ties
// break by ascending sentence id.
std::vector<int> rank(const std::vector<SentenceScore>& scores, Metric metric);

}  // namespace almd

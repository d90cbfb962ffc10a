#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "eval.hpp"
#include "maxent.hpp"
#include "scoring.hpp"

namespace almd {

// DD: two committee members share the full feature view but train on
// disjoint halves of the labeled data. FD: both train on everything,
// one on the inside view, one on the outside view.
enum class CommitteeSetting : std::uint8_t { DataDifferent = 0, FeatureDifferent = 1 };

const char* to_string(CommitteeSetting setting);
std::optional<CommitteeSetting> parse_committee(std::string_view s);

struct StepBudget {
  std::uint64_t seed_size_words = 20000;
  std::uint64_t step_size_words = 20000;
  int num_steps = 8;
};

enum class Half : std::uint8_t { A = 0, B = 1 };

struct LoopState {
  std::vector<std::pair<int, Half>> labeled;  // selection order
  std::vector<int> pool_ids;                  // remaining candidates, ascending

  std::size_t half_count(Half h) const {
    std::size_t n = 0;
    for (const auto& [id, half] : labeled)
      if (half == h) ++n;
    return n;
  }
};

// Takes sentences from `ranked` in order while the cumulative word count
// is below the budget; the sentence that crosses the budget is included
// iff that lands closer to the budget than stopping short.
std::vector<int> take_batch(const std::vector<int>& ranked, const Corpus& pool,
                            std::uint64_t budget_words);

// Seed selection: take_batch over a seeded shuffle of the pool.
std::vector<int> select_seed(const Corpus& pool, const StepBudget& budget,
                             std::uint64_t seed);

// Appends the batch to the labeled set, assigning DD halves alternately
// starting with the currently smaller half (ties go to A), and removes
// the batch from the pool. Throws on overlap with the labeled set.
void redistribute(const std::vector<int>& batch, LoopState& state);

// One full word-budgeted experiment: seed selection, then per step
// committee training, pool scoring, batch selection, oracle annotation,
// redistribution, main-classifier retraining, and dev evaluation. The
// curve gets a seed-only point plus one point per completed step; it is
// truncated (with a warning, not an error) if the pool runs dry early.
LearningCurve run_experiment(const Corpus& pool, const Corpus& dev,
                             CommitteeSetting setting,
                             const ScoringPolicy& policy,
                             const StepBudget& budget, const TrainConfig& cfg,
                             std::uint64_t run_seed);

}  // namespace almd

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "active_loop.hpp"
#include "config.hpp"
#include "corpus.hpp"
#include "eval.hpp"

namespace almd {

// A full experiment specification, as read from a config file. Exactly
// one of corpus_path / synth is set.
struct ExperimentConfig {
  std::string corpus_path;
  std::optional<SynthSpec> synth;
  std::uint64_t synth_seed = 7;
  bool keep_pronominal = false;

  double dev_fraction = 0.27;
  std::uint64_t split_seed = 1;

  CommitteeSetting committee = CommitteeSetting::FeatureDifferent;
  ScoringPolicy policy;
  StepBudget budget;
  TrainConfig train;

  std::vector<std::uint64_t> run_seeds = {1};
  std::string output_dir = "out";

  static ExperimentConfig from_config(const Config& cfg);

  // Every effective setting, defaults included; echoed into outputs so
  // a run can be reproduced from its CSV alone.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

SynthSpec synth_spec_from_config(const Config& cfg);

// Rejects keys outside the known vocabulary (catches typos early).
void validate_config_keys(const Config& cfg);

// Loads or generates the corpus named by the config (with pronoun
// filtering applied for file corpora).
Corpus materialize_corpus(const ExperimentConfig& cfg);

// One run_experiment invocation: corpus, split, loop. The returned
// curve carries the full config echo plus the run seed.
LearningCurve run_single(const ExperimentConfig& cfg, std::uint64_t run_seed);

struct ExperimentOutput {
  std::vector<std::uint64_t> seeds;
  std::vector<CurveTable> per_seed;
  CurveTable averaged;
};

// All configured run seeds plus their pointwise average.
ExperimentOutput run_all(const ExperimentConfig& cfg);

}  // namespace almd

#include "experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

namespace almd {

namespace {

const std::vector<std::string> kBuiltinCategories = {
    "PER",  "ORG",  "LOC",  "FAC",  "VEH",   "GPE",  "WEA",
    "TIME", "DATE", "EVT",  "PRD",  "LANG",  "LAW",  "MON",
    "PCT",  "QTY",  "ORD",  "CRD",  "NORP",  "MISC"};

const std::set<std::string> kKnownKeys = {
    "corpus.path",      "corpus.keep_pro",
    "split.dev_fraction", "split.seed",
    "committee",
    "policy.metric",    "policy.min_mentions",
    "weights.level.NAM", "weights.level.NOM", "weights.level.PRO",
    "budget.seed_words", "budget.step_words", "budget.steps",
    "train.l2_sigma2",  "train.tol",         "train.max_iters", "train.seed",
    "run.seeds",        "output.dir",
    "synth.sentences",  "synth.categories",  "synth.min_len",
    "synth.max_len",    "synth.sentences_per_doc", "synth.density",
    "synth.max_mention_len", "synth.cue_vocab", "synth.filler_vocab",
    "synth.noise",      "synth.trigger_prob",
    "synth.level_nam",  "synth.level_nom",   "synth.level_pro",
    "synth.seed",
    // echo-only keys, accepted so an emitted echo is itself loadable
    "run.seed",         "averaged_runs",
};

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c);
  });
}

}  // namespace

void validate_config_keys(const Config& cfg) {
  for (const auto& [key, value] : cfg.items()) {
    if (kKnownKeys.count(key)) continue;
    if (key.rfind("weights.category.", 0) == 0 &&
        key.size() > std::string("weights.category.").size())
      continue;
    fail(ErrorKind::Config, "unknown config key: " + key);
  }
}

SynthSpec synth_spec_from_config(const Config& cfg) {
  SynthSpec spec;
  spec.sentences = cfg.get_int("synth.sentences", spec.sentences);

  auto cats = cfg.get("synth.categories");
  if (cats && all_digits(*cats)) {
    int n = cfg.get_int("synth.categories", 5);
    if (n < 1 || n > static_cast<int>(kBuiltinCategories.size()))
      fail(ErrorKind::Config,
           "synth.categories count must be in [1," +
               std::to_string(kBuiltinCategories.size()) + "]");
    spec.categories.assign(kBuiltinCategories.begin(),
                           kBuiltinCategories.begin() + n);
  } else if (cats) {
    spec.categories = cfg.get_string_list("synth.categories", {});
  }

  spec.min_sentence_len = cfg.get_int("synth.min_len", spec.min_sentence_len);
  spec.max_sentence_len = cfg.get_int("synth.max_len", spec.max_sentence_len);
  spec.sentences_per_doc =
      cfg.get_int("synth.sentences_per_doc", spec.sentences_per_doc);
  spec.mention_density = cfg.get_double("synth.density", spec.mention_density);
  spec.max_mention_len =
      cfg.get_int("synth.max_mention_len", spec.max_mention_len);
  spec.cue_vocab = cfg.get_int("synth.cue_vocab", spec.cue_vocab);
  spec.filler_vocab = cfg.get_int("synth.filler_vocab", spec.filler_vocab);
  spec.cue_noise = cfg.get_double("synth.noise", spec.cue_noise);
  spec.trigger_prob = cfg.get_double("synth.trigger_prob", spec.trigger_prob);
  spec.level_nam = cfg.get_double("synth.level_nam", spec.level_nam);
  spec.level_nom = cfg.get_double("synth.level_nom", spec.level_nom);
  spec.level_pro = cfg.get_double("synth.level_pro", spec.level_pro);
  return spec;
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
  validate_config_keys(cfg);

  ExperimentConfig ec;
  const bool has_corpus = cfg.has("corpus.path");
  const bool has_synth = cfg.has_prefix("synth.");
  if (has_corpus == has_synth)
    fail(ErrorKind::Config,
         "config must set exactly one of corpus.path or a synth.* block");
  if (has_corpus)
    ec.corpus_path = *cfg.get("corpus.path");
  else
    ec.synth = synth_spec_from_config(cfg);
  ec.synth_seed = cfg.get_uint64("synth.seed", ec.synth_seed);
  ec.keep_pronominal = cfg.get_bool("corpus.keep_pro", ec.keep_pronominal);

  ec.dev_fraction = cfg.get_double("split.dev_fraction", ec.dev_fraction);
  ec.split_seed = cfg.get_uint64("split.seed", ec.split_seed);

  auto committee = parse_committee(cfg.get_string("committee", "fd"));
  if (!committee)
    fail(ErrorKind::Config,
         "committee must be dd or fd, got " + cfg.get_string("committee", ""));
  ec.committee = *committee;

  auto metric = parse_metric(cfg.get_string("policy.metric", "conf_sum"));
  if (!metric)
    fail(ErrorKind::Config,
         "unknown policy.metric " + cfg.get_string("policy.metric", ""));
  ec.policy.metric = *metric;
  int min_mentions = cfg.get_int("policy.min_mentions", 0);
  if (min_mentions < 0)
    fail(ErrorKind::Config, "policy.min_mentions must be non-negative");
  ec.policy.min_mentions = static_cast<std::uint32_t>(min_mentions);
  ec.policy.level_weights[0] = cfg.get_double("weights.level.NAM", 1.0);
  ec.policy.level_weights[1] = cfg.get_double("weights.level.NOM", 1.0);
  ec.policy.level_weights[2] = cfg.get_double("weights.level.PRO", 0.0);
  for (const auto& [key, value] : cfg.items_with_prefix("weights.category.")) {
    std::string cat = key.substr(std::string("weights.category.").size());
    ec.policy.category_weights[cat] = cfg.get_double(key, 1.0);
  }

  ec.budget.seed_size_words = cfg.get_uint64("budget.seed_words", 20000);
  ec.budget.step_size_words = cfg.get_uint64("budget.step_words", 20000);
  ec.budget.num_steps = cfg.get_int("budget.steps", 8);
  if (ec.budget.seed_size_words == 0 || ec.budget.step_size_words == 0)
    fail(ErrorKind::Config, "budget sizes must be positive");
  if (ec.budget.num_steps < 0)
    fail(ErrorKind::Config, "budget.steps must be non-negative");

  ec.train.l2_sigma2 = cfg.get_double("train.l2_sigma2", 10.0);
  ec.train.tol = cfg.get_double("train.tol", 1e-6);
  ec.train.max_iters = cfg.get_int("train.max_iters", 200);
  ec.train.seed = cfg.get_uint64("train.seed", 0);
  if (!(ec.train.l2_sigma2 > 0))
    fail(ErrorKind::Config, "train.l2_sigma2 must be positive");
  if (!(ec.train.tol > 0)) fail(ErrorKind::Config, "train.tol must be positive");

  ec.run_seeds = cfg.get_uint64_list("run.seeds", {1});
  ec.output_dir = cfg.get_string("output.dir", "out");
  return ec;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  if (synth) {
    out.emplace_back("synth.sentences", std::to_string(synth->sentences));
    std::string cats;
    for (const auto& c : synth->categories) {
      if (!cats.empty()) cats += ',';
      cats += c;
    }
    out.emplace_back("synth.categories", cats);
    out.emplace_back("synth.min_len", std::to_string(synth->min_sentence_len));
    out.emplace_back("synth.max_len", std::to_string(synth->max_sentence_len));
    out.emplace_back("synth.sentences_per_doc",
                     std::to_string(synth->sentences_per_doc));
    out.emplace_back("synth.density", fmt_double(synth->mention_density));
    out.emplace_back("synth.max_mention_len",
                     std::to_string(synth->max_mention_len));
    out.emplace_back("synth.cue_vocab", std::to_string(synth->cue_vocab));
    out.emplace_back("synth.filler_vocab", std::to_string(synth->filler_vocab));
    out.emplace_back("synth.noise", fmt_double(synth->cue_noise));
    out.emplace_back("synth.trigger_prob", fmt_double(synth->trigger_prob));
    out.emplace_back("synth.level_nam", fmt_double(synth->level_nam));
    out.emplace_back("synth.level_nom", fmt_double(synth->level_nom));
    out.emplace_back("synth.level_pro", fmt_double(synth->level_pro));
    out.emplace_back("synth.seed", std::to_string(synth_seed));
  } else {
    out.emplace_back("corpus.path", corpus_path);
  }
  out.emplace_back("corpus.keep_pro", keep_pronominal ? "true" : "false");
  out.emplace_back("split.dev_fraction", fmt_double(dev_fraction));
  out.emplace_back("split.seed", std::to_string(split_seed));
  out.emplace_back("committee", to_string(committee));
  out.emplace_back("policy.metric", to_string(policy.metric));
  out.emplace_back("policy.min_mentions", std::to_string(policy.min_mentions));
  out.emplace_back("weights.level.NAM", fmt_double(policy.level_weights[0]));
  out.emplace_back("weights.level.NOM", fmt_double(policy.level_weights[1]));
  out.emplace_back("weights.level.PRO", fmt_double(policy.level_weights[2]));
  for (const auto& [cat, w] : policy.category_weights)
    out.emplace_back("weights.category." + cat, fmt_double(w));
  out.emplace_back("budget.seed_words", std::to_string(budget.seed_size_words));
  out.emplace_back("budget.step_words", std::to_string(budget.step_size_words));
  out.emplace_back("budget.steps", std::to_string(budget.num_steps));
  out.emplace_back("train.l2_sigma2", fmt_double(train.l2_sigma2));
  out.emplace_back("train.tol", fmt_double(train.tol));
  out.emplace_back("train.max_iters", std::to_string(train.max_iters));
  out.emplace_back("train.seed", std::to_string(train.seed));
  std::string seeds;
  for (std::uint64_t s : run_seeds) {
    if (!seeds.empty()) seeds += ',';
    seeds += std::to_string(s);
  }
  out.emplace_back("run.seeds", seeds);
  return out;
}

Corpus materialize_corpus(const ExperimentConfig& cfg) {
  if (cfg.synth) {
    Corpus corpus = generate_synthetic(*cfg.synth, cfg.synth_seed);
    if (!cfg.keep_pronominal) drop_pronominal(corpus);
    return corpus;
  }
  return read_corpus(cfg.corpus_path, cfg.keep_pronominal);
}

LearningCurve run_single(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  Corpus corpus = materialize_corpus(cfg);
  auto [pool, dev] = split_pool_dev(corpus, cfg.dev_fraction, cfg.split_seed);
  LearningCurve curve = run_experiment(pool, dev, cfg.committee, cfg.policy,
                                       cfg.budget, cfg.train, run_seed);
  curve.config_echo = cfg.echo();
  curve.config_echo.emplace_back("run.seed", std::to_string(run_seed));
  return curve;
}

ExperimentOutput run_all(const ExperimentConfig& cfg) {
  if (cfg.run_seeds.empty())
    fail(ErrorKind::Config, "at least one run seed is required");
  ExperimentOutput out;
  out.seeds = cfg.run_seeds;
  for (std::uint64_t seed : cfg.run_seeds)
    out.per_seed.push_back(to_table(run_single(cfg, seed)));
  out.averaged = average_tables(out.per_seed);
  return out;
}

}  // namespace almd

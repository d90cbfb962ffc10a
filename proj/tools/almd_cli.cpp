// almd command-line tool: generate synthetic corpora, run configured
// active-learning experiments, and compare learning curves. Everything
// substantive goes through the C API in almd.h.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "almd.h"

namespace {

struct ConfigDeleter {
  void operator()(almd_config* c) const { almd_config_free(c); }
};
struct CorpusDeleter {
  void operator()(almd_corpus* c) const { almd_corpus_free(c); }
};
struct CurveDeleter {
  void operator()(almd_curve* c) const { almd_curve_free(c); }
};
using ConfigPtr = std::unique_ptr<almd_config, ConfigDeleter>;
using CorpusPtr = std::unique_ptr<almd_corpus, CorpusDeleter>;
using CurvePtr = std::unique_ptr<almd_curve, CurveDeleter>;

[[noreturn]] void die(almd_status status, const std::string& context) {
  std::fprintf(stderr, "almd: %s: %s (%s)\n", context.c_str(),
               almd_last_error(), almd_status_name(status));
  std::exit(1);
}

void check(almd_status status, const std::string& context) {
  if (status != ALMD_OK) die(status, context);
}

ConfigPtr load_config(const std::string& path) {
  almd_config* cfg = nullptr;
  check(almd_config_load(path.c_str(), &cfg), "loading " + path);
  return ConfigPtr(cfg);
}

int cmd_generate(const std::string& config_path, const std::string& out_path) {
  ConfigPtr cfg = load_config(config_path);
  almd_corpus* corpus = nullptr;
  check(almd_corpus_generate(cfg.get(), &corpus), "generating corpus");
  CorpusPtr owned(corpus);
  check(almd_corpus_write(corpus, out_path.c_str()), "writing " + out_path);
  std::printf("wrote %s: %zu sentences, %zu documents, %" PRIu64
              " words, %" PRIu64 " mentions\n",
              out_path.c_str(), almd_corpus_sentences(corpus),
              almd_corpus_documents(corpus), almd_corpus_words(corpus),
              almd_corpus_mentions(corpus));
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& seeds_override) {
  ConfigPtr cfg = load_config(config_path);
  if (!seeds_override.empty())
    check(almd_config_set(cfg.get(), "run.seeds", seeds_override.c_str()),
          "overriding run.seeds");
  if (!out_dir.empty())
    check(almd_config_set(cfg.get(), "output.dir", out_dir.c_str()),
          "overriding output.dir");

  const char* dir_value = almd_config_get(cfg.get(), "output.dir");
  std::string dir = dir_value ? dir_value : "out";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "almd: cannot create output directory %s: %s\n",
                 dir.c_str(), ec.message().c_str());
    return 1;
  }

  size_t count = 0;
  check(almd_config_run_seeds(cfg.get(), nullptr, 0, &count), "reading seeds");
  std::vector<uint64_t> seeds(count);
  check(almd_config_run_seeds(cfg.get(), seeds.data(), seeds.size(), &count),
        "reading seeds");

  std::vector<CurvePtr> curves;
  std::vector<const almd_curve*> raw;
  for (uint64_t seed : seeds) {
    almd_curve* curve = nullptr;
    check(almd_experiment_run(cfg.get(), seed, &curve),
          "running seed " + std::to_string(seed));
    curves.emplace_back(curve);
    raw.push_back(curve);
    std::string path = dir + "/curve_seed" + std::to_string(seed) + ".csv";
    check(almd_curve_write_csv(curve, path.c_str()), "writing " + path);
    std::printf("seed %" PRIu64 ": %zu points -> %s\n", seed,
                almd_curve_points(curve), path.c_str());
  }

  almd_curve* avg = nullptr;
  check(almd_curve_average(raw.data(), raw.size(), &avg), "averaging curves");
  CurvePtr owned_avg(avg);
  std::string avg_path = dir + "/curve_avg.csv";
  check(almd_curve_write_csv(avg, avg_path.c_str()), "writing " + avg_path);
  std::printf("average of %zu runs -> %s\n", raw.size(), avg_path.c_str());
  return 0;
}

int cmd_compare(const std::vector<std::string>& curve_paths, double target_f) {
  std::vector<CurvePtr> curves;
  for (const auto& path : curve_paths) {
    almd_curve* curve = nullptr;
    check(almd_curve_read_csv(path.c_str(), &curve), "reading " + path);
    curves.emplace_back(curve);
  }

  const almd_curve* baseline = curves[0].get();
  if (target_f < 0) {
    // Default target: 95% of the baseline's terminal F.
    size_t n = almd_curve_points(baseline);
    if (n == 0) {
      std::fprintf(stderr, "almd: baseline curve %s is empty\n",
                   curve_paths[0].c_str());
      return 1;
    }
    double terminal = 0;
    check(almd_curve_f_at(baseline, n - 1, &terminal), "reading baseline f");
    target_f = 0.95 * terminal;
  }
  std::printf("target F: %.6g\n", target_f);

  int reached = 0;
  double base_words = 0;
  check(almd_curve_words_to_reach(baseline, target_f, &reached, &base_words),
        "baseline words_to_reach");
  if (reached)
    std::printf("baseline  %s: words_to_reach = %.6g\n", curve_paths[0].c_str(),
                base_words);
  else
    std::printf("baseline  %s: target not reached\n", curve_paths[0].c_str());

  for (size_t i = 1; i < curves.size(); ++i) {
    double words = 0;
    int r = 0;
    check(almd_curve_words_to_reach(curves[i].get(), target_f, &r, &words),
          "words_to_reach for " + curve_paths[i]);
    if (!r) {
      std::printf("strategy  %s: target not reached\n", curve_paths[i].c_str());
    } else if (!reached || base_words <= 0) {
      std::printf("strategy  %s: words_to_reach = %.6g (baseline never reaches"
                  " the target)\n",
                  curve_paths[i].c_str(), words);
    } else {
      std::printf("strategy  %s: words_to_reach = %.6g, savings = %.4g\n",
                  curve_paths[i].c_str(), words, words / base_words);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active-learning experiment harness for mention detection"};
  app.require_subcommand(1);

  std::string config_path, out_path, seeds_override;
  double target_f = -1;
  std::vector<std::string> curve_paths;

  auto* generate = app.add_subcommand(
      "generate", "generate a synthetic corpus from a spec file");
  generate->add_option("--config", config_path, "synthetic spec file")
      ->required();
  generate->add_option("--out", out_path, "output corpus path")->required();

  auto* run = app.add_subcommand(
      "run", "run a configured experiment, one curve per run seed");
  run->add_option("--config", config_path, "experiment config file")
      ->required();
  run->add_option("--out", out_path, "output directory (overrides output.dir)");
  run->add_option("--seeds", seeds_override,
                  "comma-separated run seeds (overrides run.seeds)");

  auto* compare = app.add_subcommand(
      "compare", "compare curve CSVs against a baseline (first file)");
  compare->add_option("curves", curve_paths, "baseline.csv strategy.csv...")
      ->required()
      ->expected(-2);
  compare->add_option("--target-f", target_f,
                      "target F (default: 95% of baseline terminal F)");

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) return cmd_generate(config_path, out_path);
  if (run->parsed()) return cmd_run(config_path, out_path, seeds_override);
  return cmd_compare(curve_paths, target_f);
}

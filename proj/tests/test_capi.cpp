// Exercises the shared-library C API end to end: config handling,
// corpus generation and I/O, experiment runs, curve files, errors.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "almd.h"
#include "doctest.h"

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("almd_capi_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

almd_config* small_synth_config() {
  almd_config* cfg = nullptr;
  REQUIRE(almd_config_create(&cfg) == ALMD_OK);
  almd_config_set(cfg, "synth.sentences", "160");
  almd_config_set(cfg, "synth.categories", "3");
  almd_config_set(cfg, "synth.sentences_per_doc", "20");
  almd_config_set(cfg, "synth.seed", "5");
  almd_config_set(cfg, "split.dev_fraction", "0.3");
  almd_config_set(cfg, "budget.seed_words", "250");
  almd_config_set(cfg, "budget.step_words", "250");
  almd_config_set(cfg, "budget.steps", "2");
  almd_config_set(cfg, "train.max_iters", "50");
  almd_config_set(cfg, "train.tol", "1e-5");
  return cfg;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(almd_version() != nullptr);
  CHECK(std::strcmp(almd_status_name(ALMD_OK), "ok") == 0);
  CHECK(std::strcmp(almd_status_name(ALMD_ERR_IO), "io") == 0);
}

TEST_CASE("config set/get and run seeds") {
  almd_config* cfg = nullptr;
  REQUIRE(almd_config_create(&cfg) == ALMD_OK);
  CHECK(almd_config_get(cfg, "missing") == nullptr);
  CHECK(almd_config_set(cfg, "run.seeds", "4,7,9") == ALMD_OK);
  CHECK(std::string(almd_config_get(cfg, "run.seeds")) == "4,7,9");

  uint64_t seeds[8];
  size_t count = 0;
  CHECK(almd_config_run_seeds(cfg, seeds, 8, &count) == ALMD_OK);
  REQUIRE(count == 3);
  CHECK(seeds[0] == 4);
  CHECK(seeds[2] == 9);
  almd_config_free(cfg);

  // defaults to a single seed of 1
  REQUIRE(almd_config_create(&cfg) == ALMD_OK);
  CHECK(almd_config_run_seeds(cfg, seeds, 8, &count) == ALMD_OK);
  REQUIRE(count == 1);
  CHECK(seeds[0] == 1);
  almd_config_free(cfg);
}

TEST_CASE("null arguments are rejected, files that do not exist are IO errors") {
  CHECK(almd_config_load(nullptr, nullptr) == ALMD_ERR_INVALID);
  almd_config* cfg = nullptr;
  CHECK(almd_config_load("/nonexistent/almd.cfg", &cfg) == ALMD_ERR_IO);
  CHECK(cfg == nullptr);
  CHECK(std::strlen(almd_last_error()) > 0);

  almd_corpus* corpus = nullptr;
  CHECK(almd_corpus_read("/nonexistent/corpus.tsv", 0, &corpus) == ALMD_ERR_IO);
}

TEST_CASE("corpus generate, write, read round trip") {
  TempDir tmp;
  almd_config* cfg = small_synth_config();
  almd_corpus* corpus = nullptr;
  REQUIRE(almd_corpus_generate(cfg, &corpus) == ALMD_OK);
  CHECK(almd_corpus_sentences(corpus) == 160);
  CHECK(almd_corpus_documents(corpus) == 8);
  CHECK(almd_corpus_words(corpus) > 0);
  CHECK(almd_corpus_mentions(corpus) > 0);

  std::string path = tmp.file("corpus.tsv");
  REQUIRE(almd_corpus_write(corpus, path.c_str()) == ALMD_OK);

  almd_corpus* back = nullptr;
  REQUIRE(almd_corpus_read(path.c_str(), 1, &back) == ALMD_OK);
  CHECK(almd_corpus_sentences(back) == almd_corpus_sentences(corpus));
  CHECK(almd_corpus_words(back) == almd_corpus_words(corpus));
  CHECK(almd_corpus_mentions(back) == almd_corpus_mentions(corpus));

  // pronoun filtering drops some mentions
  almd_corpus* filtered = nullptr;
  REQUIRE(almd_corpus_read(path.c_str(), 0, &filtered) == ALMD_OK);
  CHECK(almd_corpus_mentions(filtered) < almd_corpus_mentions(back));

  almd_corpus_free(filtered);
  almd_corpus_free(back);
  almd_corpus_free(corpus);
  almd_config_free(cfg);
}

TEST_CASE("experiment run and curve file round trip") {
  TempDir tmp;
  almd_config* cfg = small_synth_config();

  almd_curve* curve = nullptr;
  REQUIRE(almd_experiment_run(cfg, 1, &curve) == ALMD_OK);
  REQUIRE(almd_curve_points(curve) == 3);

  double words0 = 0, f0 = 0, named = 0;
  CHECK(almd_curve_words_at(curve, 0, &words0) == ALMD_OK);
  CHECK(almd_curve_f_at(curve, 0, &f0) == ALMD_OK);
  CHECK(almd_curve_value_at(curve, "named_f", 2, &named) == ALMD_OK);
  CHECK(words0 > 0);
  CHECK(f0 >= 0);
  CHECK(f0 <= 1);
  CHECK(almd_curve_value_at(curve, "bogus", 0, &named) == ALMD_ERR_STRUCTURE);
  CHECK(almd_curve_f_at(curve, 99, &f0) == ALMD_ERR_STRUCTURE);

  std::string path = tmp.file("curve.csv");
  REQUIRE(almd_curve_write_csv(curve, path.c_str()) == ALMD_OK);
  almd_curve* loaded = nullptr;
  REQUIRE(almd_curve_read_csv(path.c_str(), &loaded) == ALMD_OK);
  CHECK(almd_curve_points(loaded) == almd_curve_points(curve));
  double f_orig = 0, f_load = 0;
  CHECK(almd_curve_f_at(curve, 2, &f_orig) == ALMD_OK);
  CHECK(almd_curve_f_at(loaded, 2, &f_load) == ALMD_OK);
  CHECK(f_orig == doctest::Approx(f_load).epsilon(1e-10));

  // determinism across handles
  almd_curve* rerun = nullptr;
  REQUIRE(almd_experiment_run(cfg, 1, &rerun) == ALMD_OK);
  for (size_t i = 0; i < almd_curve_points(curve); ++i) {
    double a = 0, b = 0;
    almd_curve_f_at(curve, i, &a);
    almd_curve_f_at(rerun, i, &b);
    CHECK(a == b);
  }

  // averaging two copies reproduces the same f values
  const almd_curve* pair[2] = {curve, rerun};
  almd_curve* avg = nullptr;
  REQUIRE(almd_curve_average(pair, 2, &avg) == ALMD_OK);
  double fa = 0, fc = 0;
  almd_curve_f_at(avg, 1, &fa);
  almd_curve_f_at(curve, 1, &fc);
  CHECK(fa == fc);

  int reached = -1;
  double words = 0;
  CHECK(almd_curve_words_to_reach(curve, 2.0, &reached, &words) == ALMD_OK);
  CHECK(reached == 0);
  CHECK(almd_curve_words_to_reach(curve, 0.0, &reached, &words) == ALMD_OK);
  CHECK(reached == 1);
  CHECK(words == words0);

  almd_curve_free(avg);
  almd_curve_free(rerun);
  almd_curve_free(loaded);
  almd_curve_free(curve);
  almd_config_free(cfg);
}

TEST_CASE("bad experiment configs surface as config errors") {
  almd_config* cfg = nullptr;
  REQUIRE(almd_config_create(&cfg) == ALMD_OK);
  almd_curve* curve = nullptr;
  CHECK(almd_experiment_run(cfg, 1, &curve) == ALMD_ERR_CONFIG);
  CHECK(curve == nullptr);
  CHECK(std::strlen(almd_last_error()) > 0);
  almd_config_free(cfg);
}

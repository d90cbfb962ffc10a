#include "almd.h"

#include <cstring>
#include <exception>
#include <string>

#include "config.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "experiment.hpp"

using namespace almd;

struct almd_config_s {
  Config config;
};

struct almd_corpus_s {
  Corpus corpus;
};

struct almd_curve_s {
  CurveTable table;
};

namespace {

thread_local std::string g_last_error;

almd_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return ALMD_ERR_IO;
    case ErrorKind::Parse: return ALMD_ERR_PARSE;
    case ErrorKind::Config: return ALMD_ERR_CONFIG;
    case ErrorKind::Structure: return ALMD_ERR_STRUCTURE;
    case ErrorKind::Numeric: return ALMD_ERR_NUMERIC;
  }
  return ALMD_ERR_INVALID;
}

almd_status set_error(almd_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

almd_status invalid(const char* what) {
  return set_error(ALMD_ERR_INVALID, std::string("invalid argument: ") + what);
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
almd_status guarded(Fn&& fn) {
  try {
    fn();
    return ALMD_OK;
  } catch (const Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::exception& e) {
    return set_error(ALMD_ERR_INVALID, e.what());
  }
}

}  // namespace

extern "C" {

const char* almd_version(void) { return "0.1.0"; }

const char* almd_status_name(almd_status status) {
  switch (status) {
    case ALMD_OK: return "ok";
    case ALMD_ERR_IO: return "io";
    case ALMD_ERR_PARSE: return "parse";
    case ALMD_ERR_CONFIG: return "config";
    case ALMD_ERR_STRUCTURE: return "structure";
    case ALMD_ERR_NUMERIC: return "numeric";
    case ALMD_ERR_INVALID: return "invalid";
  }
  return "?";
}

const char* almd_last_error(void) { return g_last_error.c_str(); }

almd_status almd_config_create(almd_config** out) {
  if (!out) return invalid("out");
  *out = new almd_config_s{};
  return ALMD_OK;
}

almd_status almd_config_load(const char* path, almd_config** out) {
  if (!path || !out) return invalid("path/out");
  *out = nullptr;
  return guarded([&] { *out = new almd_config_s{Config::load(path)}; });
}

almd_status almd_config_set(almd_config* cfg, const char* key,
                            const char* value) {
  if (!cfg || !key || !value) return invalid("cfg/key/value");
  cfg->config.set(key, value);
  return ALMD_OK;
}

const char* almd_config_get(const almd_config* cfg, const char* key) {
  if (!cfg || !key) return nullptr;
  thread_local std::string value;
  auto v = cfg->config.get(key);
  if (!v) return nullptr;
  value = *v;
  return value.c_str();
}

almd_status almd_config_run_seeds(const almd_config* cfg, uint64_t* seeds,
                                  size_t cap, size_t* count) {
  if (!cfg || !count) return invalid("cfg/count");
  return guarded([&] {
    auto list = cfg->config.get_uint64_list("run.seeds", {1});
    *count = list.size();
    if (seeds)
      for (size_t i = 0; i < list.size() && i < cap; ++i) seeds[i] = list[i];
  });
}

void almd_config_free(almd_config* cfg) { delete cfg; }

almd_status almd_corpus_read(const char* path, int keep_pronominal,
                             almd_corpus** out) {
  if (!path || !out) return invalid("path/out");
  *out = nullptr;
  return guarded(
      [&] { *out = new almd_corpus_s{read_corpus(path, keep_pronominal != 0)}; });
}

almd_status almd_corpus_write(const almd_corpus* corpus, const char* path) {
  if (!corpus || !path) return invalid("corpus/path");
  return guarded([&] { write_corpus(corpus->corpus, path); });
}

almd_status almd_corpus_generate(const almd_config* cfg, almd_corpus** out) {
  if (!cfg || !out) return invalid("cfg/out");
  *out = nullptr;
  return guarded([&] {
    SynthSpec spec = synth_spec_from_config(cfg->config);
    uint64_t seed = cfg->config.get_uint64("synth.seed", 7);
    *out = new almd_corpus_s{generate_synthetic(spec, seed)};
  });
}

size_t almd_corpus_sentences(const almd_corpus* corpus) {
  return corpus ? corpus->corpus.sentences.size() : 0;
}

size_t almd_corpus_documents(const almd_corpus* corpus) {
  return corpus ? static_cast<size_t>(corpus->corpus.document_count()) : 0;
}

uint64_t almd_corpus_words(const almd_corpus* corpus) {
  return corpus ? corpus->corpus.word_count() : 0;
}

uint64_t almd_corpus_mentions(const almd_corpus* corpus) {
  return corpus ? corpus->corpus.mention_count() : 0;
}

void almd_corpus_free(almd_corpus* corpus) { delete corpus; }

almd_status almd_experiment_run(const almd_config* cfg, uint64_t run_seed,
                                almd_curve** out) {
  if (!cfg || !out) return invalid("cfg/out");
  *out = nullptr;
  return guarded([&] {
    ExperimentConfig ec = ExperimentConfig::from_config(cfg->config);
    *out = new almd_curve_s{to_table(run_single(ec, run_seed))};
  });
}

almd_status almd_curve_average(const almd_curve* const* curves, size_t n,
                               almd_curve** out) {
  if (!curves || n == 0 || !out) return invalid("curves/n/out");
  *out = nullptr;
  return guarded([&] {
    std::vector<CurveTable> tables;
    tables.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      if (!curves[i]) fail(ErrorKind::Structure, "null curve in average");
      tables.push_back(curves[i]->table);
    }
    *out = new almd_curve_s{average_tables(tables)};
  });
}

almd_status almd_curve_write_csv(const almd_curve* curve, const char* path) {
  if (!curve || !path) return invalid("curve/path");
  return guarded([&] { write_table_csv(curve->table, path); });
}

almd_status almd_curve_read_csv(const char* path, almd_curve** out) {
  if (!path || !out) return invalid("path/out");
  *out = nullptr;
  return guarded([&] { *out = new almd_curve_s{read_table_csv(path)}; });
}

size_t almd_curve_points(const almd_curve* curve) {
  return curve ? curve->table.rows.size() : 0;
}

almd_status almd_curve_value_at(const almd_curve* curve, const char* column,
                                size_t index, double* out) {
  if (!curve || !column || !out) return invalid("curve/column/out");
  return guarded([&] {
    int col = curve->table.column(column);
    if (col < 0)
      fail(ErrorKind::Structure, std::string("no such column: ") + column);
    if (index >= curve->table.rows.size())
      fail(ErrorKind::Structure, "point index out of range");
    *out = curve->table.rows[index][static_cast<size_t>(col)];
  });
}

almd_status almd_curve_words_at(const almd_curve* curve, size_t index,
                                double* out) {
  return almd_curve_value_at(curve, "words", index, out);
}

almd_status almd_curve_f_at(const almd_curve* curve, size_t index,
                            double* out) {
  return almd_curve_value_at(curve, "f", index, out);
}

almd_status almd_curve_words_to_reach(const almd_curve* curve, double target_f,
                                      int* reached, double* words) {
  if (!curve || !reached || !words) return invalid("curve/reached/words");
  return guarded([&] {
    auto w = words_to_reach(curve->table, target_f);
    *reached = w.has_value() ? 1 : 0;
    if (w) *words = *w;
  });
}

void almd_curve_free(almd_curve* curve) { delete curve; }

}  // extern "C"

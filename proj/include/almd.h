/*
 * almd — active-learning harness for entity mention detection.
 *
 * C API over the core library: opaque handles, status-code returns,
 * and a per-thread error message retrievable via almd_last_error().
 * Every object returned through an out-parameter is owned by the
 * caller and released with the matching *_free function.
 */
#ifndef ALMD_H
#define ALMD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define ALMD_API

typedef enum almd_status {
  ALMD_OK = 0,
  ALMD_ERR_IO = 1,
  ALMD_ERR_PARSE = 2,
  ALMD_ERR_CONFIG = 3,
  ALMD_ERR_STRUCTURE = 4,
  ALMD_ERR_NUMERIC = 5,
  ALMD_ERR_INVALID = 6 /* null/invalid argument */
} almd_status;

typedef struct almd_config_s almd_config;
typedef struct almd_corpus_s almd_corpus;
typedef struct almd_curve_s almd_curve;

ALMD_API const char* almd_version(void);
ALMD_API const char* almd_status_name(almd_status status);

/* Message for the most recent failing call on this thread. */
ALMD_API const char* almd_last_error(void);

/* -------- configuration (line-oriented `key = value` files) -------- */

ALMD_API almd_status almd_config_create(almd_config** out);
ALMD_API almd_status almd_config_load(const char* path, almd_config** out);
ALMD_API almd_status almd_config_set(almd_config* cfg, const char* key,
                                     const char* value);
/* Returns NULL when the key is absent. The pointer stays valid until
 * the config is modified or freed. */
ALMD_API const char* almd_config_get(const almd_config* cfg, const char* key);
/* Run seeds resolved from the config (run.seeds, default "1"). Writes
 * up to cap seeds; *count receives the full count. */
ALMD_API almd_status almd_config_run_seeds(const almd_config* cfg,
                                           uint64_t* seeds, size_t cap,
                                           size_t* count);
ALMD_API void almd_config_free(almd_config* cfg);

/* -------- corpora -------- */

ALMD_API almd_status almd_corpus_read(const char* path, int keep_pronominal,
                                      almd_corpus** out);
ALMD_API almd_status almd_corpus_write(const almd_corpus* corpus,
                                       const char* path);
/* Generates from the synth.* block of cfg (seed: synth.seed). */
ALMD_API almd_status almd_corpus_generate(const almd_config* cfg,
                                          almd_corpus** out);
ALMD_API size_t almd_corpus_sentences(const almd_corpus* corpus);
ALMD_API size_t almd_corpus_documents(const almd_corpus* corpus);
ALMD_API uint64_t almd_corpus_words(const almd_corpus* corpus);
ALMD_API uint64_t almd_corpus_mentions(const almd_corpus* corpus);
ALMD_API void almd_corpus_free(almd_corpus* corpus);

/* -------- experiments and learning curves -------- */

/* Runs the experiment described by cfg once with the given run seed. */
ALMD_API almd_status almd_experiment_run(const almd_config* cfg,
                                         uint64_t run_seed, almd_curve** out);
/* Pointwise mean of n curves, aligned on step index. */
ALMD_API almd_status almd_curve_average(const almd_curve* const* curves,
                                        size_t n, almd_curve** out);
/* CSV write is atomic (write-then-rename). */
ALMD_API almd_status almd_curve_write_csv(const almd_curve* curve,
                                          const char* path);
ALMD_API almd_status almd_curve_read_csv(const char* path, almd_curve** out);

ALMD_API size_t almd_curve_points(const almd_curve* curve);
ALMD_API almd_status almd_curve_words_at(const almd_curve* curve, size_t index,
                                         double* out);
ALMD_API almd_status almd_curve_f_at(const almd_curve* curve, size_t index,
                                     double* out);
/* Value of an arbitrary column ("named_f", "precision", ...). */
ALMD_API almd_status almd_curve_value_at(const almd_curve* curve,
                                         const char* column, size_t index,
                                         double* out);
/* Smallest words count at which overall F reaches target_f (linear
 * interpolation between points). *reached is 0 when the curve never
 * gets there, in which case *words is untouched. */
ALMD_API almd_status almd_curve_words_to_reach(const almd_curve* curve,
                                               double target_f, int* reached,
                                               double* words);
ALMD_API void almd_curve_free(almd_curve* curve);

#ifdef __cplusplus
}
#endif

#endif /* ALMD_H */

/*
 * C API of the courserec library: a hybrid multi-criteria course recommender
 * (user-based collaborative filtering + content-based filtering) whose full
 * configuration can be searched by a CHC-style genetic algorithm.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return CR_OK on success; on failure they return an error code
 * and leave a message retrievable with cr_last_error() (thread-local).
 * Strings returned through char** are owned by the caller and must be
 * released with cr_string_free().
 */

#ifndef COURSEREC_H
#define COURSEREC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CR_API __declspec(dllexport)
#else
#define CR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cr_status {
  CR_OK = 0,
  CR_ERROR_INVALID_ARGUMENT = 1,
  CR_ERROR_IO = 2,
  CR_ERROR_PARSE = 3,
  CR_ERROR_NOT_FOUND = 4,
  CR_ERROR_INTERNAL = 5
} cr_status;

typedef struct cr_dataset cr_dataset;
typedef struct cr_config cr_config;
typedef struct cr_model cr_model;
typedef struct cr_reclist cr_reclist;
typedef struct cr_ga_result cr_ga_result;

/* Message of the last failure on this thread; never NULL. */
CR_API const char* cr_last_error(void);

CR_API void cr_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */

typedef struct cr_synthetic_spec {
  int students;
  int courses;
  int professors;
  int competences;
  int branches;
  int areas;
  int min_ratings_per_student;
  int max_ratings_per_student;
  int vocab_size;
} cr_synthetic_spec;

/* Fills in the default generator dimensions (95 students, 63 courses...). */
CR_API void cr_synthetic_spec_defaults(cr_synthetic_spec* spec);

CR_API cr_status cr_dataset_generate(const cr_synthetic_spec* spec, uint64_t seed,
                                     cr_dataset** out);

/* Loads students.csv, courses.csv, ratings.csv, universes.csv and content/
 * from a directory. */
CR_API cr_status cr_dataset_load(const char* dir, cr_dataset** out);

CR_API cr_status cr_dataset_save(const cr_dataset* dataset, const char* dir);

typedef struct cr_dataset_stats {
  int students;
  int courses;
  long entries;
  long rated_entries;
} cr_dataset_stats;

CR_API cr_status cr_dataset_get_stats(const cr_dataset* dataset, cr_dataset_stats* out);

CR_API void cr_dataset_free(cr_dataset* dataset);

/* ------------------------------------------------------------------ */
/* Configurations                                                      */

/* Stock configuration (balanced hybrid, Pearson/Jaccard metrics). */
CR_API cr_status cr_config_default(cr_config** out);

CR_API cr_status cr_config_parse_json(const char* json_text, cr_config** out);

CR_API cr_status cr_config_to_json(const cr_config* config, char** out_json);

CR_API void cr_config_free(cr_config* config);

/* ------------------------------------------------------------------ */
/* Models and recommendations                                          */

/* Builds similarity matrices for dataset+config. stopwords_path may be NULL
 * (no stopword filtering of content docs). */
CR_API cr_status cr_model_build(const cr_dataset* dataset, const cr_config* config,
                                const char* stopwords_path, int threads, cr_model** out);

/* Estimated rating for (student, course); *out_has_estimate is 0 when the
 * model abstains. */
CR_API cr_status cr_model_predict(const cr_model* model, const char* student_id,
                                  const char* course_id, double* out_estimate,
                                  int* out_has_estimate);

/* Top-n estimates over courses the student has not rated. */
CR_API cr_status cr_model_recommend(const cr_model* model, const char* student_id, int top_n,
                                    cr_reclist** out);

CR_API void cr_model_free(cr_model* model);

CR_API size_t cr_reclist_size(const cr_reclist* list);

/* The returned id pointer stays valid while the list lives. */
CR_API cr_status cr_reclist_item(const cr_reclist* list, size_t index,
                                 const char** out_course_id, double* out_estimate);

CR_API void cr_reclist_free(cr_reclist* list);

/* ------------------------------------------------------------------ */
/* Genetic optimization                                                */

typedef struct cr_ga_options {
  int generations;
  int population_size;
  double crossover_probability;
  int initial_incest_threshold;
  uint64_t seed;
  int threads;
  const char* stopwords_path; /* may be NULL */
} cr_ga_options;

CR_API void cr_ga_options_defaults(cr_ga_options* options);

CR_API cr_status cr_optimize(const cr_dataset* dataset, const cr_ga_options* options,
                             cr_ga_result** out);

CR_API cr_status cr_ga_result_best_config(const cr_ga_result* result, cr_config** out);

CR_API cr_status cr_ga_result_best_fitness(const cr_ga_result* result, double* out);

/* CSV `generation,best_fitness,mean_fitness,incest_threshold,restarted`. */
CR_API cr_status cr_ga_result_trace_csv(const cr_ga_result* result, char** out_csv);

/* CSV of the decoded best configuration per generation. */
CR_API cr_status cr_ga_result_phenotype_csv(const cr_ga_result* result, char** out_csv);

CR_API void cr_ga_result_free(cr_ga_result* result);

/* ------------------------------------------------------------------ */
/* Evaluation                                                          */

/* Stratified k-fold cross-validation of one configuration; out_csv gets a
 * header plus one row `approach,rmse,ndcg,reach_pct,time_s`. */
CR_API cr_status cr_evaluate(const cr_dataset* dataset, const cr_config* config, int folds,
                             uint64_t seed, const char* stopwords_path, int threads,
                             char** out_csv);

/* Ablation table over shared folds: the hybrid config, CF-only, CBF-only and
 * the seven single-criterion variants (10 rows). */
CR_API cr_status cr_compare(const cr_dataset* dataset, const cr_config* config, int folds,
                            uint64_t seed, const char* stopwords_path, int threads,
                            char** out_csv);

/* Back-test for one student: hides the named rated courses, re-estimates
 * them, and produces the top-n list from the reduced model. hidden_course_ids
 * is a comma-separated list. out_csv gets the five-column back-test table;
 * out_recs the recommendations. Either output pointer may be NULL. */
CR_API cr_status cr_case_study(const cr_dataset* dataset, const cr_config* config,
                               const char* student_id, const char* hidden_course_ids,
                               int top_n, const char* stopwords_path, int threads,
                               char** out_csv, cr_reclist** out_recs);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COURSEREC_H */

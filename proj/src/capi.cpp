#include "courserec.h"

#include <cstring>
#include <string>
#include <vector>

#include "courserec/config.hpp"
#include "courserec/dataset.hpp"
#include "courserec/errors.hpp"
#include "courserec/evaluation.hpp"
#include "courserec/ga.hpp"
#include "courserec/recommender.hpp"
#include "csv.hpp"

namespace {

thread_local std::string g_last_error = "no error";

cr_status fail(cr_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
cr_status guarded(Fn&& fn) {
  try {
    fn();
    return CR_OK;
  } catch (const courserec::NotFoundError& e) {
    return fail(CR_ERROR_NOT_FOUND, e.what());
  } catch (const courserec::ParseError& e) {
    return fail(CR_ERROR_PARSE, e.what());
  } catch (const courserec::IoError& e) {
    return fail(CR_ERROR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CR_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(CR_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(CR_ERROR_INTERNAL, "unknown error");
  }
}

cr_status require(bool ok, const char* message) {
  return ok ? CR_OK : fail(CR_ERROR_INVALID_ARGUMENT, message);
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

courserec::StopwordSet load_optional_stopwords(const char* path) {
  if (path == nullptr || *path == '\0') return {};
  return courserec::load_stopwords(path);
}

std::vector<std::string> split_ids(const char* comma_separated) {
  std::vector<std::string> ids;
  for (const auto& part : courserec::csv::split(comma_separated, ',')) {
    const auto id = courserec::csv::strip(part);
    if (!id.empty()) ids.push_back(id);
  }
  return ids;
}

}  // namespace

struct cr_dataset {
  courserec::Dataset value;
};

struct cr_config {
  courserec::RecommenderConfig value;
};

struct cr_model {
  courserec::Recommender value;
};

struct cr_reclist {
  std::vector<courserec::Recommendation> items;
};

struct cr_ga_result {
  courserec::GAResult value;
};

extern "C" {

const char* cr_last_error(void) { return g_last_error.c_str(); }

void cr_string_free(char* s) { delete[] s; }

/* -------------------------------------------------------------- */

void cr_synthetic_spec_defaults(cr_synthetic_spec* spec) {
  if (spec == nullptr) return;
  const courserec::SyntheticSpec d;
  spec->students = d.students;
  spec->courses = d.courses;
  spec->professors = d.professors;
  spec->competences = d.competences;
  spec->branches = d.branches;
  spec->areas = d.areas;
  spec->min_ratings_per_student = d.min_ratings_per_student;
  spec->max_ratings_per_student = d.max_ratings_per_student;
  spec->vocab_size = d.vocab_size;
}

cr_status cr_dataset_generate(const cr_synthetic_spec* spec, uint64_t seed, cr_dataset** out) {
  if (auto st = require(spec && out, "spec and out must not be NULL")) return st;
  return guarded([&] {
    courserec::SyntheticSpec s;
    s.students = spec->students;
    s.courses = spec->courses;
    s.professors = spec->professors;
    s.competences = spec->competences;
    s.branches = spec->branches;
    s.areas = spec->areas;
    s.min_ratings_per_student = spec->min_ratings_per_student;
    s.max_ratings_per_student = spec->max_ratings_per_student;
    s.vocab_size = spec->vocab_size;
    *out = new cr_dataset{courserec::generate_synthetic(s, seed)};
  });
}

cr_status cr_dataset_load(const char* dir, cr_dataset** out) {
  if (auto st = require(dir && out, "dir and out must not be NULL")) return st;
  return guarded([&] { *out = new cr_dataset{courserec::load_dataset_dir(dir)}; });
}

cr_status cr_dataset_save(const cr_dataset* dataset, const char* dir) {
  if (auto st = require(dataset && dir, "dataset and dir must not be NULL")) return st;
  return guarded([&] { courserec::save_dataset(dataset->value, dir); });
}

cr_status cr_dataset_get_stats(const cr_dataset* dataset, cr_dataset_stats* out) {
  if (auto st = require(dataset && out, "dataset and out must not be NULL")) return st;
  out->students = dataset->value.num_students();
  out->courses = dataset->value.num_courses();
  out->entries = static_cast<long>(dataset->value.entries().size());
  out->rated_entries = static_cast<long>(dataset->value.rated_entry_indices().size());
  return CR_OK;
}

void cr_dataset_free(cr_dataset* dataset) { delete dataset; }

/* -------------------------------------------------------------- */

cr_status cr_config_default(cr_config** out) {
  if (auto st = require(out != nullptr, "out must not be NULL")) return st;
  return guarded([&] { *out = new cr_config{courserec::RecommenderConfig{}}; });
}

cr_status cr_config_parse_json(const char* json_text, cr_config** out) {
  if (auto st = require(json_text && out, "json_text and out must not be NULL")) return st;
  return guarded([&] { *out = new cr_config{courserec::config_from_json(json_text)}; });
}

cr_status cr_config_to_json(const cr_config* config, char** out_json) {
  if (auto st = require(config && out_json, "config and out_json must not be NULL")) return st;
  return guarded([&] { *out_json = copy_string(courserec::to_json(config->value)); });
}

void cr_config_free(cr_config* config) { delete config; }

/* -------------------------------------------------------------- */

cr_status cr_model_build(const cr_dataset* dataset, const cr_config* config,
                         const char* stopwords_path, int threads, cr_model** out) {
  if (auto st = require(dataset && config && out, "dataset, config and out must not be NULL"))
    return st;
  return guarded([&] {
    const auto stopwords = load_optional_stopwords(stopwords_path);
    const auto content = courserec::content_similarity_matrix(
        courserec::course_token_maps(dataset->value, stopwords), threads);
    *out = new cr_model{
        courserec::Recommender(dataset->value, config->value, content, threads)};
  });
}

cr_status cr_model_predict(const cr_model* model, const char* student_id,
                           const char* course_id, double* out_estimate,
                           int* out_has_estimate) {
  if (auto st = require(model && student_id && course_id && out_estimate && out_has_estimate,
                        "all arguments must not be NULL"))
    return st;
  return guarded([&] {
    const auto& train = model->value.train();
    const auto s = train.student_index(student_id);
    if (!s) throw courserec::NotFoundError(std::string("unknown student ") + student_id);
    const auto c = train.course_index(course_id);
    if (!c) throw courserec::NotFoundError(std::string("unknown course ") + course_id);
    const auto estimate = model->value.predict(*s, *c);
    *out_has_estimate = estimate.has_value() ? 1 : 0;
    *out_estimate = estimate.value_or(0.0);
  });
}

cr_status cr_model_recommend(const cr_model* model, const char* student_id, int top_n,
                             cr_reclist** out) {
  if (auto st = require(model && student_id && out, "model, student_id and out must not be NULL"))
    return st;
  return guarded([&] { *out = new cr_reclist{model->value.recommend(student_id, top_n)}; });
}

void cr_model_free(cr_model* model) { delete model; }

size_t cr_reclist_size(const cr_reclist* list) { return list ? list->items.size() : 0; }

cr_status cr_reclist_item(const cr_reclist* list, size_t index, const char** out_course_id,
                          double* out_estimate) {
  if (auto st = require(list && out_course_id && out_estimate,
                        "list, out_course_id and out_estimate must not be NULL"))
    return st;
  if (index >= list->items.size())
    return fail(CR_ERROR_INVALID_ARGUMENT, "recommendation index out of range");
  *out_course_id = list->items[index].course_id.c_str();
  *out_estimate = list->items[index].estimate;
  return CR_OK;
}

void cr_reclist_free(cr_reclist* list) { delete list; }

/* -------------------------------------------------------------- */

void cr_ga_options_defaults(cr_ga_options* options) {
  if (options == nullptr) return;
  const courserec::GAParams d;
  options->generations = d.generations;
  options->population_size = d.population_size;
  options->crossover_probability = d.crossover_probability;
  options->initial_incest_threshold = d.initial_incest_threshold;
  options->seed = d.seed;
  options->threads = d.threads;
  options->stopwords_path = nullptr;
}

cr_status cr_optimize(const cr_dataset* dataset, const cr_ga_options* options,
                      cr_ga_result** out) {
  if (auto st = require(dataset && options && out, "dataset, options and out must not be NULL"))
    return st;
  return guarded([&] {
    courserec::GAParams params;
    params.generations = options->generations;
    params.population_size = options->population_size;
    params.crossover_probability = options->crossover_probability;
    params.initial_incest_threshold = options->initial_incest_threshold;
    params.seed = options->seed;
    params.threads = options->threads;
    const auto stopwords = load_optional_stopwords(options->stopwords_path);
    *out = new cr_ga_result{courserec::run_ga(params, dataset->value, stopwords)};
  });
}

cr_status cr_ga_result_best_config(const cr_ga_result* result, cr_config** out) {
  if (auto st = require(result && out, "result and out must not be NULL")) return st;
  return guarded([&] { *out = new cr_config{result->value.best_config}; });
}

cr_status cr_ga_result_best_fitness(const cr_ga_result* result, double* out) {
  if (auto st = require(result && out, "result and out must not be NULL")) return st;
  *out = result->value.best_fitness;
  return CR_OK;
}

cr_status cr_ga_result_trace_csv(const cr_ga_result* result, char** out_csv) {
  if (auto st = require(result && out_csv, "result and out_csv must not be NULL")) return st;
  return guarded([&] { *out_csv = copy_string(courserec::trace_csv(result->value)); });
}

cr_status cr_ga_result_phenotype_csv(const cr_ga_result* result, char** out_csv) {
  if (auto st = require(result && out_csv, "result and out_csv must not be NULL")) return st;
  return guarded(
      [&] { *out_csv = copy_string(courserec::phenotype_trace_csv(result->value)); });
}

void cr_ga_result_free(cr_ga_result* result) { delete result; }

/* -------------------------------------------------------------- */

cr_status cr_evaluate(const cr_dataset* dataset, const cr_config* config, int folds,
                      uint64_t seed, const char* stopwords_path, int threads,
                      char** out_csv) {
  if (auto st = require(dataset && config && out_csv,
                        "dataset, config and out_csv must not be NULL"))
    return st;
  return guarded([&] {
    const auto stopwords = load_optional_stopwords(stopwords_path);
    const auto report = courserec::cross_validate(dataset->value, config->value, folds, seed,
                                                  stopwords, threads);
    *out_csv = copy_string(courserec::report_csv({{"hybrid", report}}));
  });
}

cr_status cr_compare(const cr_dataset* dataset, const cr_config* config, int folds,
                     uint64_t seed, const char* stopwords_path, int threads, char** out_csv) {
  if (auto st = require(dataset && config && out_csv,
                        "dataset, config and out_csv must not be NULL"))
    return st;
  return guarded([&] {
    const auto stopwords = load_optional_stopwords(stopwords_path);
    const auto rows = courserec::compare_ablations(dataset->value, config->value, folds, seed,
                                                   stopwords, threads);
    *out_csv = copy_string(courserec::report_csv(rows));
  });
}

cr_status cr_case_study(const cr_dataset* dataset, const cr_config* config,
                        const char* student_id, const char* hidden_course_ids, int top_n,
                        const char* stopwords_path, int threads, char** out_csv,
                        cr_reclist** out_recs) {
  if (auto st = require(dataset && config && student_id && hidden_course_ids,
                        "dataset, config, student_id and hidden_course_ids must not be NULL"))
    return st;
  return guarded([&] {
    const auto stopwords = load_optional_stopwords(stopwords_path);
    const auto cs =
        courserec::case_study(dataset->value, config->value, student_id,
                              split_ids(hidden_course_ids), top_n, stopwords, threads);
    if (out_csv) *out_csv = copy_string(courserec::case_study_csv(cs));
    if (out_recs) *out_recs = new cr_reclist{cs.topline};
  });
}

} /* extern "C" */

// courserec command line: dataset generation, GA optimization, evaluation
// and per-student recommendation on top of the libcourserec C API.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "courserec.h"

namespace {

struct StringDeleter {
  void operator()(char* s) const { cr_string_free(s); }
};
using ApiString = std::unique_ptr<char, StringDeleter>;

[[noreturn]] void die(cr_status status) {
  std::fprintf(stderr, "error: %s\n", cr_last_error());
  std::exit(status == CR_ERROR_INVALID_ARGUMENT ? 1 : 2);
}

void check(cr_status status) {
  if (status != CR_OK) die(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot open %s\n", path.c_str());
    std::exit(1);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const char* text) {
  std::ofstream out(path);
  if (!out || !(out << text)) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    std::exit(2);
  }
}

cr_dataset* load_data(const std::string& dir) {
  cr_dataset* dataset = nullptr;
  check(cr_dataset_load(dir.c_str(), &dataset));
  return dataset;
}

// Parses --config when given, otherwise the stock configuration.
cr_config* load_config_or_default(const std::string& path) {
  cr_config* config = nullptr;
  if (path.empty()) {
    check(cr_config_default(&config));
  } else {
    const std::string text = read_file(path);
    check(cr_config_parse_json(text.c_str(), &config));
  }
  return config;
}

std::string format_reclist(const cr_reclist* list) {
  std::string out = "[";
  for (size_t i = 0; i < cr_reclist_size(list); ++i) {
    const char* id = nullptr;
    double estimate = 0.0;
    check(cr_reclist_item(list, i, &id, &estimate));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", estimate);
    if (i) out += ", ";
    out += std::string(id) + "(" + buf + ")";
  }
  return out + "]";
}

// Replaces the extension of the --out path to derive sibling outputs.
std::string sibling(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid multi-criteria course recommender with GA-searched configuration"};
  app.require_subcommand(1);

  // gen-data -----------------------------------------------------------
  auto* gen = app.add_subcommand("gen-data", "Generate a seeded synthetic dataset");
  cr_synthetic_spec spec;
  cr_synthetic_spec_defaults(&spec);
  std::string gen_out;
  uint64_t gen_seed = 1;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--students", spec.students, "Number of students");
  gen->add_option("--courses", spec.courses, "Number of courses");
  gen->add_option("--professors", spec.professors, "Professor universe size");
  gen->add_option("--competences", spec.competences, "Competence universe size");
  gen->add_option("--branches", spec.branches, "Number of branches");
  gen->add_option("--areas", spec.areas, "Number of knowledge areas");
  gen->add_option("--min-ratings", spec.min_ratings_per_student, "Min ratings per student");
  gen->add_option("--max-ratings", spec.max_ratings_per_student, "Max ratings per student");
  gen->add_option("--vocab", spec.vocab_size, "Content vocabulary size");
  gen->add_option("--seed", gen_seed, "Generator seed");

  // optimize -----------------------------------------------------------
  auto* opt = app.add_subcommand("optimize", "Search the configuration space with the GA");
  cr_ga_options ga;
  cr_ga_options_defaults(&ga);
  std::string opt_data, opt_out = "config.json", opt_trace, opt_pheno, opt_stopwords;
  opt->add_option("--data-dir", opt_data, "Dataset directory")->required();
  opt->add_option("--out", opt_out, "Best-config JSON output path");
  opt->add_option("--trace", opt_trace, "Fitness trace CSV path (default <out>_trace.csv)");
  opt->add_option("--phenotype-trace", opt_pheno,
                  "Decoded-best trace CSV path (default <out>_phenotype.csv)");
  opt->add_option("--generations", ga.generations, "Number of generations");
  opt->add_option("--population", ga.population_size, "Population size");
  opt->add_option("--crossover-prob", ga.crossover_probability, "Crossover probability");
  opt->add_option("--threshold", ga.initial_incest_threshold,
                  "Initial incest-prevention threshold");
  opt->add_option("--seed", ga.seed, "Run seed (drives init, pairing and the fitness split)");
  opt->add_option("--threads", ga.threads, "Worker threads for fitness evaluation");
  opt->add_option("--stopwords", opt_stopwords, "Stopword file for content docs");

  // evaluate / compare --------------------------------------------------
  std::string eval_data, eval_config, eval_out = "report.csv", eval_stopwords;
  int eval_folds = 5;
  uint64_t eval_seed = 1;
  int eval_threads = 1;
  auto add_eval_flags = [&](CLI::App* cmd) {
    cmd->add_option("--data-dir", eval_data, "Dataset directory")->required();
    cmd->add_option("--config", eval_config, "Config JSON (stock config when omitted)");
    cmd->add_option("--out", eval_out, "Report CSV output path");
    cmd->add_option("--folds", eval_folds, "Number of cross-validation folds");
    cmd->add_option("--seed", eval_seed, "Fold seed");
    cmd->add_option("--threads", eval_threads, "Worker threads");
    cmd->add_option("--stopwords", eval_stopwords, "Stopword file for content docs");
  };
  auto* evaluate =
      app.add_subcommand("evaluate", "Cross-validate one configuration (one report row)");
  add_eval_flags(evaluate);
  auto* compare =
      app.add_subcommand("compare", "Ablation table over shared folds (10 report rows)");
  add_eval_flags(compare);

  // recommend ----------------------------------------------------------
  auto* rec = app.add_subcommand("recommend", "Top-N courses for one student");
  std::string rec_data, rec_config, rec_student, rec_hidden, rec_out, rec_stopwords;
  int rec_n = 3;
  int rec_threads = 1;
  rec->add_option("--data-dir", rec_data, "Dataset directory")->required();
  rec->add_option("--config", rec_config, "Config JSON (stock config when omitted)");
  rec->add_option("--student", rec_student, "Student id")->required();
  rec->add_option("--top-n", rec_n, "Number of recommendations");
  rec->add_option("--hidden", rec_hidden,
                  "Comma-separated rated course ids to hide for a back-test");
  rec->add_option("--out", rec_out, "Back-test CSV output path (with --hidden)");
  rec->add_option("--threads", rec_threads, "Worker threads");
  rec->add_option("--stopwords", rec_stopwords, "Stopword file for content docs");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    cr_dataset* dataset = nullptr;
    check(cr_dataset_generate(&spec, gen_seed, &dataset));
    check(cr_dataset_save(dataset, gen_out.c_str()));
    cr_dataset_stats stats;
    check(cr_dataset_get_stats(dataset, &stats));
    std::printf("wrote %s: %d students, %d courses, %ld entries (%ld rated)\n",
                gen_out.c_str(), stats.students, stats.courses, stats.entries,
                stats.rated_entries);
    cr_dataset_free(dataset);
    return 0;
  }

  if (opt->parsed()) {
    cr_dataset* dataset = load_data(opt_data);
    if (!opt_stopwords.empty()) ga.stopwords_path = opt_stopwords.c_str();
    cr_ga_result* result = nullptr;
    check(cr_optimize(dataset, &ga, &result));

    cr_config* best = nullptr;
    check(cr_ga_result_best_config(result, &best));
    char* json = nullptr;
    check(cr_config_to_json(best, &json));
    write_file(opt_out, json);
    ApiString json_owner(json);

    if (opt_trace.empty()) opt_trace = sibling(opt_out, "_trace.csv");
    if (opt_pheno.empty()) opt_pheno = sibling(opt_out, "_phenotype.csv");
    char* trace = nullptr;
    check(cr_ga_result_trace_csv(result, &trace));
    write_file(opt_trace, trace);
    ApiString trace_owner(trace);
    char* pheno = nullptr;
    check(cr_ga_result_phenotype_csv(result, &pheno));
    write_file(opt_pheno, pheno);
    ApiString pheno_owner(pheno);

    double fitness = 0.0;
    check(cr_ga_result_best_fitness(result, &fitness));
    std::printf("best holdout RMSE: %.6f\n", fitness);
    std::printf("wrote %s, %s, %s\n", opt_out.c_str(), opt_trace.c_str(), opt_pheno.c_str());

    cr_config_free(best);
    cr_ga_result_free(result);
    cr_dataset_free(dataset);
    return 0;
  }

  if (evaluate->parsed() || compare->parsed()) {
    cr_dataset* dataset = load_data(eval_data);
    cr_config* config = load_config_or_default(eval_config);
    const char* stopwords = eval_stopwords.empty() ? nullptr : eval_stopwords.c_str();
    char* csv = nullptr;
    if (evaluate->parsed())
      check(cr_evaluate(dataset, config, eval_folds, eval_seed, stopwords, eval_threads, &csv));
    else
      check(cr_compare(dataset, config, eval_folds, eval_seed, stopwords, eval_threads, &csv));
    write_file(eval_out, csv);
    std::printf("%s", csv);
    std::printf("wrote %s\n", eval_out.c_str());
    cr_string_free(csv);
    cr_config_free(config);
    cr_dataset_free(dataset);
    return 0;
  }

  if (rec->parsed()) {
    cr_dataset* dataset = load_data(rec_data);
    cr_config* config = load_config_or_default(rec_config);
    const char* stopwords = rec_stopwords.empty() ? nullptr : rec_stopwords.c_str();

    if (rec_hidden.empty()) {
      cr_model* model = nullptr;
      check(cr_model_build(dataset, config, stopwords, rec_threads, &model));
      cr_reclist* list = nullptr;
      check(cr_model_recommend(model, rec_student.c_str(), rec_n, &list));
      if (cr_reclist_size(list) == 0)
        std::fprintf(stderr, "warning: no unrated course could be estimated for %s\n",
                     rec_student.c_str());
      std::printf("%s\n", format_reclist(list).c_str());
      cr_reclist_free(list);
      cr_model_free(model);
    } else {
      char* csv = nullptr;
      cr_reclist* list = nullptr;
      check(cr_case_study(dataset, config, rec_student.c_str(), rec_hidden.c_str(), rec_n,
                          stopwords, rec_threads, &csv, &list));
      std::printf("%s\n", format_reclist(list).c_str());
      if (!rec_out.empty()) {
        write_file(rec_out, csv);
        std::printf("wrote %s\n", rec_out.c_str());
      } else {
        std::printf("%s", csv);
      }
      cr_reclist_free(list);
      cr_string_free(csv);
    }
    cr_config_free(config);
    cr_dataset_free(dataset);
    return 0;
  }

  return 0;
}

#include "courserec/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "courserec/errors.hpp"

namespace courserec {

namespace {

using nlohmann::json;

// Weights live on a 2-decimal grid; compare in integer hundredths.
int hundredths(double w, const char* name) {
  const double scaled = w * 100.0;
  const long rounded = std::lround(scaled);
  if (std::abs(scaled - static_cast<double>(rounded)) > 1e-6)
    throw std::invalid_argument(std::string(name) + " must have 2-decimal precision, got " +
                                std::to_string(w));
  if (rounded < 0 || rounded > 100)
    throw std::invalid_argument(std::string(name) + " outside [0, 1]: " + std::to_string(w));
  return static_cast<int>(rounded);
}

void check_group(std::initializer_list<std::pair<double, const char*>> weights,
                 const char* group) {
  int sum = 0;
  for (const auto& [w, name] : weights) sum += hundredths(w, name);
  if (sum != 100)
    throw std::invalid_argument(std::string(group) + " weights sum to " +
                                std::to_string(sum / 100.0) + ", expected 1.00");
}

double get_weight(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(std::string("config: missing or non-numeric '") + key + "'");
  return j[key].get<double>();
}

VectorMetric get_vector_metric(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ParseError(std::string("config: missing or non-string '") + key + "'");
  const auto m = vector_metric_from_string(j[key].get<std::string>());
  if (!m)
    throw ParseError(std::string("config: unknown metric '") + j[key].get<std::string>() +
                     "' for " + key);
  return *m;
}

SetMetric get_set_metric(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ParseError(std::string("config: missing or non-string '") + key + "'");
  const auto m = set_metric_from_string(j[key].get<std::string>());
  if (!m)
    throw ParseError(std::string("config: unknown metric '") + j[key].get<std::string>() +
                     "' for " + key);
  return *m;
}

}  // namespace

void validate(const RecommenderConfig& config) {
  check_group({{config.weight_cf, "cf_weight"}, {config.weight_cbf, "cbf_weight"}}, "hybrid");
  check_group({{config.cf.weight_ratings, "ratings_weight"},
               {config.cf.weight_grades, "grades_weight"},
               {config.cf.weight_branch, "branch_weight"}},
              "cf");
  check_group({{config.cbf.weight_professors, "professors_weight"},
               {config.cbf.weight_competences, "competences_weight"},
               {config.cbf.weight_area, "knowledge_area_weight"},
               {config.cbf.weight_contents, "contents_weight"}},
              "cbf");
  if (config.cf.neighborhood_size < 1)
    throw std::invalid_argument("neighborhood_size must be >= 1");
}

std::string to_json(const RecommenderConfig& config) {
  json j;
  j["hybrid"] = {{"cf_weight", config.weight_cf}, {"cbf_weight", config.weight_cbf}};
  j["cf"] = {{"ratings_weight", config.cf.weight_ratings},
             {"grades_weight", config.cf.weight_grades},
             {"branch_weight", config.cf.weight_branch},
             {"ratings_metric", to_string(config.cf.ratings_metric)},
             {"grades_metric", to_string(config.cf.grades_metric)},
             {"neighborhood_size", config.cf.neighborhood_size},
             {"neighbors_among_raters", config.cf.neighbors_among_raters}};
  j["cbf"] = {{"professors_weight", config.cbf.weight_professors},
              {"competences_weight", config.cbf.weight_competences},
              {"knowledge_area_weight", config.cbf.weight_area},
              {"contents_weight", config.cbf.weight_contents},
              {"professors_metric", to_string(config.cbf.professors_metric)},
              {"competences_metric", to_string(config.cbf.competences_metric)}};
  return j.dump(2) + "\n";
}

RecommenderConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("hybrid") || !j.contains("cf") || !j.contains("cbf"))
    throw ParseError("config: expected object with 'hybrid', 'cf' and 'cbf' sections");

  RecommenderConfig config;
  const auto& hybrid = j["hybrid"];
  config.weight_cf = get_weight(hybrid, "cf_weight");
  config.weight_cbf = get_weight(hybrid, "cbf_weight");

  const auto& cf = j["cf"];
  config.cf.weight_ratings = get_weight(cf, "ratings_weight");
  config.cf.weight_grades = get_weight(cf, "grades_weight");
  config.cf.weight_branch = get_weight(cf, "branch_weight");
  config.cf.ratings_metric = get_vector_metric(cf, "ratings_metric");
  config.cf.grades_metric = get_vector_metric(cf, "grades_metric");
  if (!cf.contains("neighborhood_size") || !cf["neighborhood_size"].is_number_integer())
    throw ParseError("config: missing or non-integer 'neighborhood_size'");
  config.cf.neighborhood_size = cf["neighborhood_size"].get<int>();
  if (cf.contains("neighbors_among_raters")) {
    if (!cf["neighbors_among_raters"].is_boolean())
      throw ParseError("config: 'neighbors_among_raters' must be a boolean");
    config.cf.neighbors_among_raters = cf["neighbors_among_raters"].get<bool>();
  }

  const auto& cbf = j["cbf"];
  config.cbf.weight_professors = get_weight(cbf, "professors_weight");
  config.cbf.weight_competences = get_weight(cbf, "competences_weight");
  config.cbf.weight_area = get_weight(cbf, "knowledge_area_weight");
  config.cbf.weight_contents = get_weight(cbf, "contents_weight");
  config.cbf.professors_metric = get_set_metric(cbf, "professors_metric");
  config.cbf.competences_metric = get_set_metric(cbf, "competences_metric");

  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config;
}

RecommenderConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void save_config(const RecommenderConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path);
  out << to_json(config);
  if (!out) throw IoError("error while writing " + path);
}

}  // namespace courserec

#pragma once

#include <string>

#include "courserec/similarity.hpp"

namespace courserec {

// Weights are 2-decimal values; each group sums to exactly 1.00.

struct CFConfig {
  double weight_ratings = 0.60;
  double weight_grades = 0.30;
  double weight_branch = 0.10;
  int neighborhood_size = 15;
  VectorMetric ratings_metric = VectorMetric::Pearson;
  VectorMetric grades_metric = VectorMetric::Pearson;
  // When true the neighborhood is picked among raters of the target course
  // instead of globally.
  bool neighbors_among_raters = false;
};

struct CBFConfig {
  double weight_professors = 0.65;
  double weight_competences = 0.00;
  double weight_area = 0.00;
  double weight_contents = 0.35;
  SetMetric professors_metric = SetMetric::Jaccard;
  SetMetric competences_metric = SetMetric::Jaccard;
};

struct RecommenderConfig {
  double weight_cf = 0.54;
  double weight_cbf = 0.46;
  CFConfig cf;
  CBFConfig cbf;
};

/// Throws std::invalid_argument when a weight leaves [0,1], is not a
/// 2-decimal value, a group does not sum to 1.00, or neighborhood_size < 1.
void validate(const RecommenderConfig& config);

/// JSON layout fixed by schemas/recommender_config.schema.json.
std::string to_json(const RecommenderConfig& config);
RecommenderConfig config_from_json(const std::string& json_text);

RecommenderConfig load_config(const std::string& path);
void save_config(const RecommenderConfig& config, const std::string& path);

}  // namespace courserec

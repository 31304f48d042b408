#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "courserec/config.hpp"
#include "courserec/content.hpp"
#include "courserec/dataset.hpp"
#include "courserec/recommender.hpp"

namespace courserec {

// A real rating counts as relevant (and an estimate as a recommendation)
// above this value.
inline constexpr double kRelevanceThreshold = 2.5;

struct RmseResult {
  std::optional<double> value;  // empty when no pair had a prediction
  int predicted_count = 0;
};

/// Root mean squared residual over the pairs that have a prediction; absent
/// predictions are excluded (reach reports them separately).
RmseResult rmse(const std::vector<std::pair<std::optional<double>, double>>& pairs);

/// Normalized discounted cumulative gain of `recommended_order` against the
/// ideal (relevance-descending) order, gain 2^rel - 1 in both sums, both
/// truncated at the recommended length. 1.0 when the ideal gain is zero.
double ndcg(const std::vector<std::string>& recommended_order,
            const std::map<std::string, double>& relevance);

/// Percentage of predictions actually produced, in [0,100].
double reach(const std::vector<std::optional<double>>& predictions);

struct EvaluationReport {
  std::vector<std::optional<double>> fold_rmse;
  std::vector<double> fold_ndcg;
  std::vector<double> fold_reach;
  std::vector<size_t> fold_sizes;  // hidden ratings per fold
  std::optional<double> mean_rmse;
  double mean_ndcg = 0.0;
  double reach_pct = 0.0;
  double mean_seconds_per_recommendation = 0.0;
  uint64_t seed = 0;
};

/// Prediction interface the cross-validation harness drives; Recommender is
/// the production implementation.
class RatingPredictor {
 public:
  virtual ~RatingPredictor() = default;
  virtual std::optional<double> predict(int student, int course) const = 0;
  virtual std::vector<Recommendation> recommend(int student, int top_n) const = 0;
};

using PredictorFactory =
    std::function<std::unique_ptr<RatingPredictor>(const Dataset& train)>;

/// Stratified k-fold cross-validation. Per fold: every hidden rating is
/// predicted (RMSE over predicted pairs, reach over all), and per student
/// with hidden ratings the hidden courses are ranked by estimate and scored
/// with nDCG against their true ratings (ties in the ideal order broken by
/// grade, then course id). Recommendation calls are wall-clock timed after
/// each model is built.
EvaluationReport cross_validate_with(const Dataset& dataset, int k, uint64_t seed,
                                     const PredictorFactory& factory);

EvaluationReport cross_validate(const Dataset& dataset, const RecommenderConfig& config,
                                int k, uint64_t seed, const StopwordSet& stopwords = {},
                                int threads = 1);

struct AblationRow {
  std::string approach;
  EvaluationReport report;
};

/// Evaluates, over shared folds: the hybrid config, CF-only and CBF-only
/// with the config's criterion weights, and every single-criterion variant.
/// Ten rows in a fixed order.
std::vector<AblationRow> compare_ablations(const Dataset& dataset,
                                           const RecommenderConfig& config, int k,
                                           uint64_t seed,
                                           const StopwordSet& stopwords = {},
                                           int threads = 1);

/// CSV `approach,rmse,ndcg,reach_pct,time_s`, one row per report.
std::string report_csv(const std::vector<AblationRow>& rows);

struct CaseStudyRow {
  std::string course_id;
  double real_rating = 0.0;
  std::optional<double> estimated;
  bool relevant = false;     // real rating above the threshold
  bool recommended = false;  // estimate above the threshold
};

struct CaseStudy {
  std::vector<CaseStudyRow> rows;           // in hidden-course input order
  std::vector<Recommendation> topline;      // top-n list on the reduced data
  std::optional<double> rmse_over_hidden;
};

/// Back-test for one student: hides the given rated courses, rebuilds the
/// model on the remainder, re-estimates each hidden rating and produces the
/// top-n recommendation list. Throws NotFoundError for unknown ids and
/// std::invalid_argument when a hidden course was not rated by the student.
CaseStudy case_study(const Dataset& dataset, const RecommenderConfig& config,
                     const std::string& student_id,
                     const std::vector<std::string>& hidden_course_ids, int top_n,
                     const StopwordSet& stopwords = {}, int threads = 1);

/// CSV `course_id,real_rating,estimated_rating,relevant,recommended`.
std::string case_study_csv(const CaseStudy& cs);

/// `[id(est), id(est), ...]` display form of a recommendation list.
std::string format_recommendations(const std::vector<Recommendation>& recs);

}  // namespace courserec

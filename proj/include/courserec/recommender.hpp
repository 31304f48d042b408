#pragma once

#include <optional>
#include <string>
#include <vector>

#include "courserec/config.hpp"
#include "courserec/content.hpp"
#include "courserec/dataset.hpp"
#include "courserec/similarity.hpp"

namespace courserec {

struct Recommendation {
  std::string course_id;
  double estimate = 0.0;
  bool operator==(const Recommendation&) const = default;
};

/// Engine-facing view of a training dataset: per-student rating and grade
/// profiles keyed by course index, raters per course, and lexicographic id
/// ranks used for deterministic tie-breaking.
struct RatingView {
  std::vector<SparseProfile> ratings;
  std::vector<SparseProfile> grades;
  std::vector<std::vector<int>> raters;  // per course, ascending student index
  std::vector<int> student_id_rank;
  std::vector<int> course_id_rank;

  static RatingView build(const Dataset& train);
};

/// Weighted combination of the three student criteria. A criterion with
/// weight > 0 that is undefined makes the pair undefined; zero-weight
/// criteria are ignored.
std::optional<double> combine_student_criteria(std::optional<double> ratings_sim,
                                               std::optional<double> grades_sim,
                                               double branch_sim, const CFConfig& cf);

SimilarityMatrix student_similarity(const Dataset& train, const CFConfig& cf,
                                    int threads = 1);

/// Course pairwise similarity: professors, competences, knowledge area and
/// content criteria are all total, so every cell is defined.
SimilarityMatrix course_similarity(const Dataset& train, const CBFConfig& cbf,
                                   const SimilarityMatrix& content_sims, int threads = 1);

/// Neighborhood prediction: the K students most similar to `student`
/// (defined similarity, ties by ascending student id), filtered to those who
/// rated `course` with positive similarity; similarity-weighted mean of
/// their ratings, clamped to [1,5]. Empty when no such neighbor exists.
std::optional<double> predict_cf(const RatingView& view, const CFConfig& cf,
                                 const SimilarityMatrix& student_sims, int student,
                                 int course);

/// Similarity-weighted mean of the student's own ratings over courses with
/// positive similarity to `course`, clamped to [1,5]; falls back to the
/// student's mean rating when every similarity is zero. Empty only when the
/// student has no ratings at all.
std::optional<double> predict_cbf(const RatingView& view,
                                  const SimilarityMatrix& course_sims, int student,
                                  int course);

/// Blend of the two engine estimates. When one engine abstains the other's
/// estimate is returned unscaled, so the blend abstains only where both
/// engines do. An engine with weight 0 is switched off entirely and never
/// serves as the fallback.
std::optional<double> predict_hybrid(const RecommenderConfig& config,
                                     std::optional<double> cf_pred,
                                     std::optional<double> cbf_pred);

/// Token maps for every course's content doc, in course order.
std::vector<TokenFrequency> course_token_maps(const Dataset& dataset,
                                              const StopwordSet& stopwords);

/// A trained model: similarity matrices built once, predictions served as
/// pure reads (safe to call concurrently).
class Recommender {
 public:
  Recommender(const Dataset& train, RecommenderConfig config,
              const SimilarityMatrix& content_sims, int threads = 1);

  std::optional<double> predict(int student, int course) const;
  std::optional<double> predict_cf(int student, int course) const;
  std::optional<double> predict_cbf(int student, int course) const;

  /// Ranked estimates for courses the student has not rated: estimate
  /// descending, ties by ascending course id, at most top_n entries.
  std::vector<Recommendation> recommend(int student, int top_n) const;
  std::vector<Recommendation> recommend(const std::string& student_id, int top_n) const;

  const SimilarityMatrix& student_sims() const { return student_sims_; }
  const SimilarityMatrix& course_sims() const { return course_sims_; }
  const Dataset& train() const { return train_; }
  const RecommenderConfig& config() const { return config_; }

 private:
  Dataset train_;
  RecommenderConfig config_;
  RatingView view_;
  SimilarityMatrix student_sims_;
  SimilarityMatrix course_sims_;
};

}  // namespace courserec

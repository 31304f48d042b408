#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace courserec {

// Sparse per-student profile: course index -> value (a rating or a grade).
using SparseProfile = std::map<int, double>;

// Sorted, duplicate-free indices into a fixed-size universe.
using BinarySet = std::vector<int>;

enum class VectorMetric { Euclidean = 0, Taxicab = 1, Pearson = 2, Spearman = 3 };
enum class SetMetric { Jaccard = 0, LogLikelihood = 1 };

const char* to_string(VectorMetric m);
const char* to_string(SetMetric m);
std::optional<VectorMetric> vector_metric_from_string(const std::string& name);
std::optional<SetMetric> set_metric_from_string(const std::string& name);

/// Pearson or Spearman coefficient over co-indexed items, affinely mapped
/// from [-1,1] to [0,1]. Empty when fewer than two co-indexed items exist or
/// either co-indexed sub-profile has zero variance (for Spearman: zero rank
/// variance; ties receive average ranks).
std::optional<double> correlation_similarity(VectorMetric kind, const SparseProfile& a,
                                             const SparseProfile& b);

/// Euclidean or Taxicab distance over co-indexed items divided by the
/// co-indexed count, then mapped through 1/(1+d). Empty when no co-indexed
/// items exist.
std::optional<double> distance_similarity(VectorMetric kind, const SparseProfile& a,
                                          const SparseProfile& b);

/// Dispatches to distance_similarity or correlation_similarity.
std::optional<double> vector_similarity(VectorMetric kind, const SparseProfile& a,
                                        const SparseProfile& b);

/// Jaccard index (1.0 when both sets are empty) or squashed
/// log-likelihood-ratio similarity 1 - 1/(1 + G^2) of two index sets.
/// Throws std::invalid_argument when universe < |a ∪ b|.
double binary_set_similarity(SetMetric kind, const BinarySet& a, const BinarySet& b,
                             int universe);

/// 1.0 iff the two categories are equal.
double exact_match_similarity(int a, int b);

/// G^2 statistic of a 2x2 contingency table in Shannon-entropy form,
/// with 0*log(0) = 0. Zero exactly when rows and columns are independent.
double log_likelihood_ratio(long long k11, long long k12, long long k21, long long k22);

/// Dense symmetric matrix of pairwise similarities; cells may be undefined.
/// The diagonal is fixed to 1.0 (self-similarity).
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(int n);

  int size() const { return n_; }
  std::optional<double> at(int i, int j) const;
  bool defined(int i, int j) const;
  // Sets both (i,j) and (j,i); the diagonal stays 1.0.
  void set(int i, int j, std::optional<double> value);

 private:
  int n_ = 0;
  std::vector<double> cells_;  // NaN marks undefined
};

}  // namespace courserec

#include "courserec/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace courserec {

namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

// Values of a and b at their shared indices.
std::pair<std::vector<double>, std::vector<double>> co_indexed(const SparseProfile& a,
                                                               const SparseProfile& b) {
  std::vector<double> xs, ys;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      xs.push_back(ia->second);
      ys.push_back(ib->second);
      ++ia;
      ++ib;
    }
  }
  return {std::move(xs), std::move(ys)};
}

std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return (r + 1.0) / 2.0;
}

// Average ranks (1-based), ties share the mean of their rank span.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t i, size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double entropy_term(long long k) {
  return k > 0 ? static_cast<double>(k) * std::log(static_cast<double>(k)) : 0.0;
}

}  // namespace

const char* to_string(VectorMetric m) {
  switch (m) {
    case VectorMetric::Euclidean: return "euclidean";
    case VectorMetric::Taxicab: return "taxicab";
    case VectorMetric::Pearson: return "pearson";
    case VectorMetric::Spearman: return "spearman";
  }
  return "?";
}

const char* to_string(SetMetric m) {
  switch (m) {
    case SetMetric::Jaccard: return "jaccard";
    case SetMetric::LogLikelihood: return "log_likelihood";
  }
  return "?";
}

std::optional<VectorMetric> vector_metric_from_string(const std::string& name) {
  for (auto m : {VectorMetric::Euclidean, VectorMetric::Taxicab, VectorMetric::Pearson,
                 VectorMetric::Spearman})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

std::optional<SetMetric> set_metric_from_string(const std::string& name) {
  for (auto m : {SetMetric::Jaccard, SetMetric::LogLikelihood})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

std::optional<double> correlation_similarity(VectorMetric kind, const SparseProfile& a,
                                             const SparseProfile& b) {
  if (kind != VectorMetric::Pearson && kind != VectorMetric::Spearman)
    throw std::invalid_argument("correlation_similarity: not a correlation metric");
  auto [xs, ys] = co_indexed(a, b);
  if (xs.size() < 2) return std::nullopt;
  if (kind == VectorMetric::Pearson) return pearson(xs, ys);
  return pearson(average_ranks(xs), average_ranks(ys));
}

std::optional<double> distance_similarity(VectorMetric kind, const SparseProfile& a,
                                          const SparseProfile& b) {
  if (kind != VectorMetric::Euclidean && kind != VectorMetric::Taxicab)
    throw std::invalid_argument("distance_similarity: not a distance metric");
  auto [xs, ys] = co_indexed(a, b);
  if (xs.empty()) return std::nullopt;
  double d = 0.0;
  if (kind == VectorMetric::Taxicab) {
    for (size_t i = 0; i < xs.size(); ++i) d += std::abs(xs[i] - ys[i]);
  } else {
    for (size_t i = 0; i < xs.size(); ++i) d += (xs[i] - ys[i]) * (xs[i] - ys[i]);
    d = std::sqrt(d);
  }
  d /= static_cast<double>(xs.size());
  return 1.0 / (1.0 + d);
}

std::optional<double> vector_similarity(VectorMetric kind, const SparseProfile& a,
                                        const SparseProfile& b) {
  if (kind == VectorMetric::Euclidean || kind == VectorMetric::Taxicab)
    return distance_similarity(kind, a, b);
  return correlation_similarity(kind, a, b);
}

double log_likelihood_ratio(long long k11, long long k12, long long k21, long long k22) {
  const long long row1 = k11 + k12, row2 = k21 + k22;
  const long long col1 = k11 + k21, col2 = k12 + k22;
  const long long total = row1 + row2;
  const double matrix = entropy_term(k11) + entropy_term(k12) + entropy_term(k21) +
                        entropy_term(k22);
  const double rows = entropy_term(row1) + entropy_term(row2);
  const double cols = entropy_term(col1) + entropy_term(col2);
  const double g2 = 2.0 * (matrix - rows - cols + entropy_term(total));
  return std::max(g2, 0.0);  // clip float noise below zero
}

double binary_set_similarity(SetMetric kind, const BinarySet& a, const BinarySet& b,
                             int universe) {
  std::vector<int> inter, uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
  if (static_cast<size_t>(universe) < uni.size())
    throw std::invalid_argument("binary_set_similarity: universe smaller than |a ∪ b|");
  if (kind == SetMetric::Jaccard) {
    if (uni.empty()) return 1.0;
    return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
  }
  const long long k11 = static_cast<long long>(inter.size());
  const long long k12 = static_cast<long long>(b.size()) - k11;
  const long long k21 = static_cast<long long>(a.size()) - k11;
  const long long k22 = universe - static_cast<long long>(uni.size());
  const double g2 = log_likelihood_ratio(k11, k12, k21, k22);
  return 1.0 - 1.0 / (1.0 + g2);
}

double exact_match_similarity(int a, int b) { return a == b ? 1.0 : 0.0; }

SimilarityMatrix::SimilarityMatrix(int n) : n_(n), cells_(static_cast<size_t>(n) * n, kUndefined) {
  for (int i = 0; i < n; ++i) cells_[static_cast<size_t>(i) * n + i] = 1.0;
}

std::optional<double> SimilarityMatrix::at(int i, int j) const {
  const double v = cells_[static_cast<size_t>(i) * n_ + j];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

bool SimilarityMatrix::defined(int i, int j) const {
  return !std::isnan(cells_[static_cast<size_t>(i) * n_ + j]);
}

void SimilarityMatrix::set(int i, int j, std::optional<double> value) {
  if (i == j) return;
  const double v = value.value_or(kUndefined);
  cells_[static_cast<size_t>(i) * n_ + j] = v;
  cells_[static_cast<size_t>(j) * n_ + i] = v;
}

}  // namespace courserec

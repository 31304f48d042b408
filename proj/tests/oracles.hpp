#pragma once

// Independent brute-force reference implementations used to check the
// library. Everything here recomputes results from first principles and
// must stay decoupled from the code paths under test.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "courserec/config.hpp"
#include "courserec/content.hpp"
#include "courserec/dataset.hpp"
#include "courserec/similarity.hpp"

namespace oracle {

using courserec::BinarySet;
using courserec::CBFConfig;
using courserec::CFConfig;
using courserec::Dataset;
using courserec::SetMetric;
using courserec::SparseProfile;
using courserec::TokenFrequency;
using courserec::VectorMetric;

// ---------------------------------------------------------------------------
// Metric references

inline std::optional<double> pearson_brute(const std::vector<double>& xs,
                                           const std::vector<double>& ys) {
  const size_t n = xs.size();
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double num = 0, dx2 = 0, dy2 = 0;
  for (size_t i = 0; i < n; ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    dx2 += (xs[i] - mx) * (xs[i] - mx);
    dy2 += (ys[i] - my) * (ys[i] - my);
  }
  if (dx2 == 0 || dy2 == 0) return std::nullopt;
  double r = num / (std::sqrt(dx2) * std::sqrt(dy2));
  r = std::max(-1.0, std::min(1.0, r));
  return (r + 1.0) / 2.0;
}

// Average rank by counting: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> ranks_by_counting(const std::vector<double>& values) {
  std::vector<double> ranks(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    int smaller = 0, equal = 0;
    for (size_t j = 0; j < values.size(); ++j) {
      if (values[j] < values[i]) ++smaller;
      if (values[j] == values[i]) ++equal;
    }
    ranks[i] = 1.0 + smaller + (equal - 1) / 2.0;
  }
  return ranks;
}

inline std::optional<double> spearman_brute(const std::vector<double>& xs,
                                            const std::vector<double>& ys) {
  if (xs.size() < 2) return std::nullopt;
  return pearson_brute(ranks_by_counting(xs), ranks_by_counting(ys));
}

// Shared indices of two profiles via nested scan.
inline std::pair<std::vector<double>, std::vector<double>> co_rated_brute(
    const SparseProfile& a, const SparseProfile& b) {
  std::vector<double> xs, ys;
  for (const auto& [ka, va] : a)
    for (const auto& [kb, vb] : b)
      if (ka == kb) {
        xs.push_back(va);
        ys.push_back(vb);
      }
  return {xs, ys};
}

inline std::optional<double> distance_brute(VectorMetric kind, const SparseProfile& a,
                                            const SparseProfile& b) {
  auto [xs, ys] = co_rated_brute(a, b);
  if (xs.empty()) return std::nullopt;
  double d = 0;
  if (kind == VectorMetric::Taxicab) {
    for (size_t i = 0; i < xs.size(); ++i) d += std::fabs(xs[i] - ys[i]);
  } else {
    for (size_t i = 0; i < xs.size(); ++i) d += (xs[i] - ys[i]) * (xs[i] - ys[i]);
    d = std::sqrt(d);
  }
  d /= xs.size();
  return 1.0 / (1.0 + d);
}

inline std::optional<double> vector_metric_brute(VectorMetric kind, const SparseProfile& a,
                                                 const SparseProfile& b) {
  auto [xs, ys] = co_rated_brute(a, b);
  switch (kind) {
    case VectorMetric::Euclidean:
    case VectorMetric::Taxicab:
      return distance_brute(kind, a, b);
    case VectorMetric::Pearson:
      return pearson_brute(xs, ys);
    case VectorMetric::Spearman:
      return spearman_brute(xs, ys);
  }
  return std::nullopt;
}

inline double jaccard_brute(const BinarySet& a, const BinarySet& b) {
  std::set<int> uni(a.begin(), a.end());
  uni.insert(b.begin(), b.end());
  if (uni.empty()) return 1.0;
  int inter = 0;
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) ++inter;
  return static_cast<double>(inter) / static_cast<double>(uni.size());
}

inline double llr_brute(const BinarySet& a, const BinarySet& b, int universe) {
  std::set<int> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  long long k11 = 0;
  for (int x : sa)
    if (sb.count(x)) ++k11;
  const long long k12 = static_cast<long long>(sb.size()) - k11;
  const long long k21 = static_cast<long long>(sa.size()) - k11;
  std::set<int> uni = sa;
  uni.insert(sb.begin(), sb.end());
  const long long k22 = universe - static_cast<long long>(uni.size());
  const auto h = [](long long k) {
    return k > 0 ? k * std::log(static_cast<double>(k)) : 0.0;
  };
  const double g2 = 2.0 * (h(k11) + h(k12) + h(k21) + h(k22) - h(k11 + k12) - h(k21 + k22) -
                           h(k11 + k21) - h(k12 + k22) + h(k11 + k12 + k21 + k22));
  return 1.0 - 1.0 / (1.0 + std::max(g2, 0.0));
}

inline double set_metric_brute(SetMetric kind, const BinarySet& a, const BinarySet& b,
                               int universe) {
  return kind == SetMetric::Jaccard ? jaccard_brute(a, b) : llr_brute(a, b, universe);
}

// Literal evaluation of the documented content pipeline: union vocabulary,
// l1-normalized frequency vectors, cosine.
inline double cosine_brute(const TokenFrequency& a, const TokenFrequency& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::set<std::string> vocab;
  for (const auto& [t, _] : a) vocab.insert(t);
  for (const auto& [t, _] : b) vocab.insert(t);
  std::vector<double> va, vb;
  for (const auto& t : vocab) {
    auto ia = a.find(t);
    auto ib = b.find(t);
    va.push_back(ia == a.end() ? 0.0 : ia->second);
    vb.push_back(ib == b.end() ? 0.0 : ib->second);
  }
  const auto l1 = [](std::vector<double>& v) {
    double sum = 0;
    for (double x : v) sum += x;
    for (double& x : v) x /= sum;
  };
  l1(va);
  l1(vb);
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline double ndcg_brute(const std::vector<std::string>& order,
                         const std::map<std::string, double>& relevance) {
  const auto dcg = [&](const std::vector<std::string>& ids) {
    double sum = 0;
    for (size_t i = 0; i < ids.size(); ++i)
      sum += (std::pow(2.0, relevance.at(ids[i])) - 1.0) / (std::log(i + 2.0) / std::log(2.0));
    return sum;
  };
  std::vector<std::string> ideal;
  for (const auto& [id, _] : relevance) ideal.push_back(id);
  std::sort(ideal.begin(), ideal.end(), [&](const std::string& x, const std::string& y) {
    return relevance.at(x) > relevance.at(y) || (relevance.at(x) == relevance.at(y) && x < y);
  });
  if (ideal.size() > order.size()) ideal.resize(order.size());
  const double idcg = dcg(ideal);
  if (idcg == 0) return 1.0;
  return dcg(order) / idcg;
}

// ---------------------------------------------------------------------------
// Engine references

// Rating profile of one student, by scanning the entry list.
inline SparseProfile ratings_of(const Dataset& d, int student) {
  SparseProfile p;
  for (const auto& e : d.entries()) {
    if (!e.rating) continue;
    if (*d.student_index(e.student_id) != student) continue;
    p[*d.course_index(e.course_id)] = *e.rating;
  }
  return p;
}

inline SparseProfile grades_of(const Dataset& d, int student) {
  SparseProfile p;
  for (const auto& e : d.entries()) {
    if (!e.grade) continue;
    if (*d.student_index(e.student_id) != student) continue;
    p[*d.course_index(e.course_id)] = *e.grade;
  }
  return p;
}

inline std::optional<double> student_pair_sim_brute(const Dataset& d, const CFConfig& cf,
                                                    int i, int j) {
  double total = 0;
  if (cf.weight_ratings > 0) {
    const auto r = vector_metric_brute(cf.ratings_metric, ratings_of(d, i), ratings_of(d, j));
    if (!r) return std::nullopt;
    total += cf.weight_ratings * *r;
  }
  if (cf.weight_grades > 0) {
    const auto g = vector_metric_brute(cf.grades_metric, grades_of(d, i), grades_of(d, j));
    if (!g) return std::nullopt;
    total += cf.weight_grades * *g;
  }
  if (cf.weight_branch > 0)
    total += cf.weight_branch *
             (d.students()[i].branch == d.students()[j].branch ? 1.0 : 0.0);
  return total;
}

inline double course_pair_sim_brute(const Dataset& d, const CBFConfig& cbf, int i, int j,
                                    const courserec::StopwordSet& stopwords) {
  if (i == j) return 1.0;
  const auto& a = d.courses()[i];
  const auto& b = d.courses()[j];
  return cbf.weight_professors * set_metric_brute(cbf.professors_metric, a.professors,
                                                  b.professors, d.universes().num_professors) +
         cbf.weight_competences *
             set_metric_brute(cbf.competences_metric, a.competences, b.competences,
                              d.universes().num_competences) +
         cbf.weight_area * (a.knowledge_area == b.knowledge_area ? 1.0 : 0.0) +
         cbf.weight_contents * cosine_brute(courserec::tokenize(a.content_text, stopwords),
                                            courserec::tokenize(b.content_text, stopwords));
}

// Full pair enumeration, explicit sort, take K, filter to raters, weighted
// mean, clamp.
inline std::optional<double> predict_cf_brute(const Dataset& d, const CFConfig& cf,
                                              int student, int course) {
  struct Cand {
    double sim;
    std::string id;
    int index;
  };
  std::vector<Cand> cands;
  for (int other = 0; other < d.num_students(); ++other) {
    if (other == student) continue;
    const auto sim = student_pair_sim_brute(d, cf, student, other);
    if (sim) cands.push_back({*sim, d.students()[other].student_id, other});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.sim > b.sim || (a.sim == b.sim && a.id < b.id);
  });
  if (cands.size() > static_cast<size_t>(cf.neighborhood_size))
    cands.resize(static_cast<size_t>(cf.neighborhood_size));
  double num = 0, den = 0;
  for (const auto& c : cands) {
    if (c.sim <= 1e-12) continue;  // voting floor, mirrors the engine contract
    const auto profile = ratings_of(d, c.index);
    const auto it = profile.find(course);
    if (it == profile.end()) continue;
    num += c.sim * it->second;
    den += c.sim;
  }
  if (den <= 0) return std::nullopt;
  return std::max(1.0, std::min(5.0, num / den));
}

inline std::optional<double> predict_cbf_brute(const Dataset& d, const CBFConfig& cbf,
                                               int student, int course,
                                               const courserec::StopwordSet& stopwords) {
  const auto profile = ratings_of(d, student);
  if (profile.empty()) return std::nullopt;
  double num = 0, den = 0, sum = 0;
  for (const auto& [other, rating] : profile) {
    sum += rating;
    const double sim = course_pair_sim_brute(d, cbf, course, other, stopwords);
    if (sim <= 1e-12) continue;  // voting floor, mirrors the engine contract
    num += sim * rating;
    den += sim;
  }
  const double value = den > 0 ? num / den : sum / profile.size();
  return std::max(1.0, std::min(5.0, value));
}

// ---------------------------------------------------------------------------
// Random instances

inline SparseProfile random_profile(std::mt19937_64& rng, int max_items, double lo,
                                    double hi, int index_space = 30) {
  std::uniform_int_distribution<int> count(0, max_items);
  std::uniform_int_distribution<int> index(0, index_space - 1);
  std::uniform_real_distribution<double> value(lo, hi);
  SparseProfile p;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) p[index(rng)] = value(rng);
  return p;
}

// Pair of profiles with an exact number of co-rated items.
inline std::pair<SparseProfile, SparseProfile> co_rated_pair(std::mt19937_64& rng,
                                                             int co_rated) {
  std::uniform_real_distribution<double> value(1.0, 5.0);
  std::uniform_int_distribution<int> likert(1, 5);
  SparseProfile a, b;
  for (int i = 0; i < co_rated; ++i) {
    // Mix continuous and tie-heavy integer values so Spearman tie handling
    // gets exercised.
    a[i] = (i % 2 == 0) ? value(rng) : likert(rng);
    b[i] = (i % 3 == 0) ? value(rng) : likert(rng);
  }
  return {a, b};
}

inline BinarySet random_set(std::mt19937_64& rng, int universe, int max_size) {
  std::uniform_int_distribution<int> count(0, max_size);
  std::uniform_int_distribution<int> index(0, universe - 1);
  std::set<int> s;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) s.insert(index(rng));
  return BinarySet(s.begin(), s.end());
}

// Small random dataset with full control over shapes (independent of the
// library's synthetic generator).
inline Dataset random_micro_dataset(std::mt19937_64& rng, int max_students = 6,
                                    int max_courses = 5) {
  using namespace courserec;
  std::uniform_int_distribution<int> nstud(2, max_students);
  std::uniform_int_distribution<int> ncourse(2, max_courses);
  const int S = nstud(rng), C = ncourse(rng);
  Universes u{4, 4, 2, 2};

  std::uniform_int_distribution<int> branch(1, u.num_branches);
  std::vector<StudentRecord> students(S);
  for (int i = 0; i < S; ++i) {
    students[i].student_id = "s" + std::to_string(i + 1);
    students[i].branch = branch(rng);
  }

  std::uniform_int_distribution<int> area(1, u.num_areas);
  std::uniform_int_distribution<int> word(0, 5);
  std::uniform_int_distribution<int> doc_len(0, 8);
  std::vector<CourseRecord> courses(C);
  for (int i = 0; i < C; ++i) {
    auto& c = courses[i];
    c.course_id = "c" + std::to_string(i + 1);
    c.knowledge_area = area(rng);
    c.professors = random_set(rng, u.num_professors, 3);
    if (c.professors.empty()) c.professors = {0};
    c.competences = random_set(rng, u.num_competences, 3);
    const int len = doc_len(rng);
    for (int w = 0; w < len; ++w) c.content_text += "word" + std::to_string(word(rng)) + " ";
    c.content_file = c.course_id + ".txt";
  }

  std::bernoulli_distribution rated(0.6), graded(0.8);
  std::uniform_int_distribution<int> likert(1, 5);
  std::uniform_real_distribution<double> grade(0.0, 10.0);
  std::vector<RatingEntry> entries;
  for (int s = 0; s < S; ++s)
    for (int c = 0; c < C; ++c) {
      if (!rated(rng)) continue;
      RatingEntry e;
      e.student_id = students[s].student_id;
      e.course_id = courses[c].course_id;
      e.rating = likert(rng);
      if (graded(rng)) e.grade = std::round(grade(rng) * 100.0) / 100.0;
      entries.push_back(std::move(e));
    }
  // The engines need at least something to chew on.
  if (entries.empty())
    entries.push_back({students[0].student_id, courses[0].course_id, 3, 5.0});

  return Dataset(std::move(students), std::move(courses), std::move(entries), u);
}

// Random valid configuration on the 2-decimal grid.
inline courserec::RecommenderConfig random_config(std::mt19937_64& rng) {
  const auto split_100 = [&](int parts) {
    std::vector<int> cuts{0, 100};
    std::uniform_int_distribution<int> cut(0, 100);
    for (int i = 0; i < parts - 1; ++i) cuts.push_back(cut(rng));
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> weights;
    for (int i = 1; i <= parts; ++i) weights.push_back((cuts[i] - cuts[i - 1]) / 100.0);
    return weights;
  };
  std::uniform_int_distribution<int> vm(0, 3), sm(0, 1), k(1, 5);
  courserec::RecommenderConfig cfg;
  const auto h = split_100(2);
  cfg.weight_cf = h[0];
  cfg.weight_cbf = h[1];
  const auto c3 = split_100(3);
  cfg.cf.weight_ratings = c3[0];
  cfg.cf.weight_grades = c3[1];
  cfg.cf.weight_branch = c3[2];
  cfg.cf.ratings_metric = static_cast<VectorMetric>(vm(rng));
  cfg.cf.grades_metric = static_cast<VectorMetric>(vm(rng));
  cfg.cf.neighborhood_size = k(rng);
  const auto c4 = split_100(4);
  cfg.cbf.weight_professors = c4[0];
  cfg.cbf.weight_competences = c4[1];
  cfg.cbf.weight_area = c4[2];
  cfg.cbf.weight_contents = c4[3];
  cfg.cbf.professors_metric = static_cast<SetMetric>(sm(rng));
  cfg.cbf.competences_metric = static_cast<SetMetric>(sm(rng));
  return cfg;
}

}  // namespace oracle

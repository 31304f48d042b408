#include "courserec/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "courserec/errors.hpp"
#include "parallel.hpp"

namespace courserec {

namespace {

double clamp_rating(double v) { return std::clamp(v, 1.0, 5.0); }

// Positivity floor for voting: similarities that are zero up to rounding
// noise (e.g. perfectly anticorrelated two-item profiles) must not vote,
// whichever way the last bit falls.
constexpr double kVoteFloor = 1e-12;

RecommenderConfig validated(RecommenderConfig config) {
  validate(config);
  return config;
}

// Lexicographic rank of each id, for deterministic tie-breaking.
template <typename Records, typename IdOf>
std::vector<int> id_ranks(const Records& records, IdOf&& id_of) {
  std::vector<int> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return id_of(records[a]) < id_of(records[b]); });
  std::vector<int> rank(records.size());
  for (size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = static_cast<int>(pos);
  return rank;
}

}  // namespace

RatingView RatingView::build(const Dataset& train) {
  RatingView view;
  view.ratings.resize(train.num_students());
  view.grades.resize(train.num_students());
  view.raters.resize(train.num_courses());
  for (const auto& e : train.entries()) {
    const int s = *train.student_index(e.student_id);
    const int c = *train.course_index(e.course_id);
    if (e.rating) {
      view.ratings[s][c] = static_cast<double>(*e.rating);
      view.raters[c].push_back(s);
    }
    if (e.grade) view.grades[s][c] = *e.grade;
  }
  for (auto& r : view.raters) std::sort(r.begin(), r.end());
  view.student_id_rank =
      id_ranks(train.students(), [](const StudentRecord& s) -> const std::string& {
        return s.student_id;
      });
  view.course_id_rank =
      id_ranks(train.courses(), [](const CourseRecord& c) -> const std::string& {
        return c.course_id;
      });
  return view;
}

std::optional<double> combine_student_criteria(std::optional<double> ratings_sim,
                                               std::optional<double> grades_sim,
                                               double branch_sim, const CFConfig& cf) {
  double total = 0.0;
  if (cf.weight_ratings > 0.0) {
    if (!ratings_sim) return std::nullopt;
    total += cf.weight_ratings * *ratings_sim;
  }
  if (cf.weight_grades > 0.0) {
    if (!grades_sim) return std::nullopt;
    total += cf.weight_grades * *grades_sim;
  }
  total += cf.weight_branch * branch_sim;
  return total;
}

SimilarityMatrix student_similarity(const Dataset& train, const CFConfig& cf, int threads) {
  const RatingView view = RatingView::build(train);
  const int n = train.num_students();
  SimilarityMatrix m(n);
  parallel_for(n, threads, [&](int i) {
    for (int j = i + 1; j < n; ++j) {
      const auto ratings = vector_similarity(cf.ratings_metric, view.ratings[i], view.ratings[j]);
      const auto grades = vector_similarity(cf.grades_metric, view.grades[i], view.grades[j]);
      const double branch =
          exact_match_similarity(train.students()[i].branch, train.students()[j].branch);
      m.set(i, j, combine_student_criteria(ratings, grades, branch, cf));
    }
  });
  return m;
}

SimilarityMatrix course_similarity(const Dataset& train, const CBFConfig& cbf,
                                   const SimilarityMatrix& content_sims, int threads) {
  const int n = train.num_courses();
  if (content_sims.size() != n)
    throw std::invalid_argument("course_similarity: content table size mismatch");
  const auto& universes = train.universes();
  SimilarityMatrix m(n);
  parallel_for(n, threads, [&](int i) {
    const auto& a = train.courses()[i];
    for (int j = i + 1; j < n; ++j) {
      const auto& b = train.courses()[j];
      const double value =
          cbf.weight_professors * binary_set_similarity(cbf.professors_metric, a.professors,
                                                        b.professors, universes.num_professors) +
          cbf.weight_competences *
              binary_set_similarity(cbf.competences_metric, a.competences, b.competences,
                                    universes.num_competences) +
          cbf.weight_area * exact_match_similarity(a.knowledge_area, b.knowledge_area) +
          cbf.weight_contents * content_sims.at(i, j).value();
      m.set(i, j, value);
    }
  });
  return m;
}

std::optional<double> predict_cf(const RatingView& view, const CFConfig& cf,
                                 const SimilarityMatrix& student_sims, int student,
                                 int course) {
  struct Neighbor {
    double sim;
    int id_rank;
    int index;
  };
  std::vector<Neighbor> candidates;
  candidates.reserve(student_sims.size());
  const auto consider = [&](int other) {
    if (other == student) return;
    if (const auto sim = student_sims.at(student, other))
      candidates.push_back({*sim, view.student_id_rank[other], other});
  };
  if (cf.neighbors_among_raters) {
    for (int other : view.raters[course]) consider(other);
  } else {
    for (int other = 0; other < student_sims.size(); ++other) consider(other);
  }
  const size_t k = static_cast<size_t>(cf.neighborhood_size);
  if (candidates.size() > k) {
    std::nth_element(candidates.begin(), candidates.begin() + k, candidates.end(),
                     [](const Neighbor& a, const Neighbor& b) {
                       return a.sim > b.sim || (a.sim == b.sim && a.id_rank < b.id_rank);
                     });
    candidates.resize(k);
  }
  double weighted = 0.0, total = 0.0;
  for (const auto& n : candidates) {
    if (n.sim <= kVoteFloor) continue;
    const auto rating = view.ratings[n.index].find(course);
    if (rating == view.ratings[n.index].end()) continue;
    weighted += n.sim * rating->second;
    total += n.sim;
  }
  if (total <= 0.0) return std::nullopt;
  return clamp_rating(weighted / total);
}

std::optional<double> predict_cbf(const RatingView& view,
                                  const SimilarityMatrix& course_sims, int student,
                                  int course) {
  const auto& rated = view.ratings[student];
  if (rated.empty()) return std::nullopt;
  double weighted = 0.0, total = 0.0, plain_sum = 0.0;
  for (const auto& [other, rating] : rated) {
    plain_sum += rating;
    const double sim = course_sims.at(course, other).value_or(0.0);
    if (sim <= kVoteFloor) continue;
    weighted += sim * rating;
    total += sim;
  }
  if (total <= 0.0) return clamp_rating(plain_sum / static_cast<double>(rated.size()));
  return clamp_rating(weighted / total);
}

std::optional<double> predict_hybrid(const RecommenderConfig& config,
                                     std::optional<double> cf_pred,
                                     std::optional<double> cbf_pred) {
  // A zero-weight engine is switched off entirely: it neither blends nor
  // serves as the fallback, so a pure-CF configuration abstains where CF
  // abstains.
  if (config.weight_cf <= 0.0) cf_pred.reset();
  if (config.weight_cbf <= 0.0) cbf_pred.reset();
  if (cf_pred && cbf_pred)
    return clamp_rating(config.weight_cf * *cf_pred + config.weight_cbf * *cbf_pred);
  if (cf_pred) return cf_pred;
  return cbf_pred;
}

std::vector<TokenFrequency> course_token_maps(const Dataset& dataset,
                                              const StopwordSet& stopwords) {
  std::vector<TokenFrequency> docs;
  docs.reserve(dataset.courses().size());
  for (const auto& c : dataset.courses()) docs.push_back(tokenize(c.content_text, stopwords));
  return docs;
}

Recommender::Recommender(const Dataset& train, RecommenderConfig config,
                         const SimilarityMatrix& content_sims, int threads)
    : train_(train),
      config_(validated(std::move(config))),
      view_(RatingView::build(train)),
      student_sims_(student_similarity(train, config_.cf, threads)),
      course_sims_(course_similarity(train, config_.cbf, content_sims, threads)) {}

std::optional<double> Recommender::predict_cf(int student, int course) const {
  return courserec::predict_cf(view_, config_.cf, student_sims_, student, course);
}

std::optional<double> Recommender::predict_cbf(int student, int course) const {
  return courserec::predict_cbf(view_, course_sims_, student, course);
}

std::optional<double> Recommender::predict(int student, int course) const {
  return predict_hybrid(config_, predict_cf(student, course), predict_cbf(student, course));
}

std::vector<Recommendation> Recommender::recommend(int student, int top_n) const {
  if (top_n < 1) throw std::invalid_argument("recommend: top_n must be >= 1");
  struct Scored {
    double estimate;
    int id_rank;
    int course;
  };
  std::vector<Scored> scored;
  for (int c = 0; c < train_.num_courses(); ++c) {
    if (view_.ratings[student].contains(c)) continue;
    if (const auto estimate = predict(student, c))
      scored.push_back({*estimate, view_.course_id_rank[c], c});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return a.estimate > b.estimate || (a.estimate == b.estimate && a.id_rank < b.id_rank);
  });
  if (scored.size() > static_cast<size_t>(top_n)) scored.resize(static_cast<size_t>(top_n));
  std::vector<Recommendation> out;
  out.reserve(scored.size());
  for (const auto& s : scored)
    out.push_back({train_.courses()[s.course].course_id, s.estimate});
  return out;
}

std::vector<Recommendation> Recommender::recommend(const std::string& student_id,
                                                   int top_n) const {
  const auto idx = train_.student_index(student_id);
  if (!idx) throw NotFoundError("unknown student " + student_id);
  return recommend(*idx, top_n);
}

}  // namespace courserec

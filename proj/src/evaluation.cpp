#include "courserec/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "courserec/errors.hpp"
#include "csv.hpp"

namespace courserec {

namespace {

double gain(double rel) { return std::exp2(rel) - 1.0; }

double discounted_sum(const std::vector<double>& rels) {
  double sum = 0.0;
  for (size_t i = 0; i < rels.size(); ++i)
    sum += gain(rels[i]) / std::log2(static_cast<double>(i) + 2.0);
  return sum;
}

}  // namespace

RmseResult rmse(const std::vector<std::pair<std::optional<double>, double>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("rmse: empty pair list");
  double sum_sq = 0.0;
  int predicted = 0;
  for (const auto& [pred, truth] : pairs) {
    if (!pred) continue;
    const double err = *pred - truth;
    sum_sq += err * err;
    ++predicted;
  }
  RmseResult result;
  result.predicted_count = predicted;
  if (predicted > 0) result.value = std::sqrt(sum_sq / predicted);
  return result;
}

double ndcg(const std::vector<std::string>& recommended_order,
            const std::map<std::string, double>& relevance) {
  if (recommended_order.empty()) throw std::invalid_argument("ndcg: empty recommendation");
  std::vector<double> listed;
  listed.reserve(recommended_order.size());
  for (const auto& id : recommended_order) {
    auto it = relevance.find(id);
    if (it == relevance.end())
      throw std::invalid_argument("ndcg: no relevance for course " + id);
    listed.push_back(it->second);
  }
  std::vector<double> ideal;
  ideal.reserve(relevance.size());
  for (const auto& [_, rel] : relevance) ideal.push_back(rel);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  ideal.resize(std::min(ideal.size(), listed.size()));

  const double idcg = discounted_sum(ideal);
  if (idcg == 0.0) return 1.0;  // nothing relevant to rank
  return std::clamp(discounted_sum(listed) / idcg, 0.0, 1.0);
}

double reach(const std::vector<std::optional<double>>& predictions) {
  if (predictions.empty()) throw std::invalid_argument("reach: empty prediction list");
  const auto present = std::count_if(predictions.begin(), predictions.end(),
                                     [](const auto& p) { return p.has_value(); });
  return 100.0 * static_cast<double>(present) / static_cast<double>(predictions.size());
}

namespace {

EvaluationReport evaluate_on_folds(const Dataset& dataset,
                                   const std::vector<std::vector<int>>& folds, uint64_t seed,
                                   const PredictorFactory& factory) {
  EvaluationReport report;
  report.seed = seed;
  double time_total = 0.0;
  long recommend_calls = 0;

  for (const auto& fold : folds) {
    report.fold_sizes.push_back(fold.size());
    if (fold.empty()) {
      report.fold_rmse.push_back(std::nullopt);
      report.fold_ndcg.push_back(0.0);
      report.fold_reach.push_back(0.0);
      continue;
    }
    const Dataset train = hide_ratings(dataset, fold);
    const auto predictor = factory(train);

    struct Hidden {
      int course = 0;
      double rating = 0.0;
      std::string course_id;
      std::optional<double> prediction;
    };
    std::map<int, std::vector<Hidden>> by_student;
    std::vector<std::pair<std::optional<double>, double>> rmse_pairs;
    std::vector<std::optional<double>> reach_preds;
    for (int entry_idx : fold) {
      const auto& e = dataset.entries()[entry_idx];
      const int s = *dataset.student_index(e.student_id);
      const int c = *dataset.course_index(e.course_id);
      Hidden h;
      h.course = c;
      h.rating = static_cast<double>(*e.rating);
      h.course_id = e.course_id;
      h.prediction = predictor->predict(s, c);
      rmse_pairs.emplace_back(h.prediction, h.rating);
      reach_preds.push_back(h.prediction);
      by_student[s].push_back(std::move(h));
    }
    report.fold_rmse.push_back(rmse(rmse_pairs).value);
    report.fold_reach.push_back(reach(reach_preds));

    // Ranking quality per student: order the hidden courses by estimate and
    // compare against their true ratings; time the production ranking call.
    double ndcg_sum = 0.0;
    for (auto& [student, hidden] : by_student) {
      std::stable_sort(hidden.begin(), hidden.end(), [](const Hidden& a, const Hidden& b) {
        if (a.prediction.has_value() != b.prediction.has_value())
          return a.prediction.has_value();
        if (a.prediction.has_value() && *a.prediction != *b.prediction)
          return *a.prediction > *b.prediction;
        return a.course_id < b.course_id;
      });
      std::vector<std::string> recommended;
      std::map<std::string, double> relevance;
      for (const auto& h : hidden) {
        recommended.push_back(h.course_id);
        relevance[h.course_id] = h.rating;
      }
      ndcg_sum += ndcg(recommended, relevance);

      const auto start = std::chrono::steady_clock::now();
      (void)predictor->recommend(student, static_cast<int>(hidden.size()));
      const auto stop = std::chrono::steady_clock::now();
      time_total += std::chrono::duration<double>(stop - start).count();
      ++recommend_calls;
    }
    report.fold_ndcg.push_back(by_student.empty() ? 0.0
                                                  : ndcg_sum /
                                                        static_cast<double>(by_student.size()));
  }

  // Aggregates over non-empty folds.
  double rmse_sum = 0.0, ndcg_sum = 0.0, reach_sum = 0.0;
  int rmse_n = 0, used = 0;
  for (size_t f = 0; f < folds.size(); ++f) {
    if (folds[f].empty()) continue;
    ++used;
    ndcg_sum += report.fold_ndcg[f];
    reach_sum += report.fold_reach[f];
    if (report.fold_rmse[f]) {
      rmse_sum += *report.fold_rmse[f];
      ++rmse_n;
    }
  }
  if (rmse_n > 0) report.mean_rmse = rmse_sum / rmse_n;
  if (used > 0) {
    report.mean_ndcg = ndcg_sum / used;
    report.reach_pct = reach_sum / used;
  }
  if (recommend_calls > 0)
    report.mean_seconds_per_recommendation = time_total / static_cast<double>(recommend_calls);
  return report;
}

class RecommenderPredictor final : public RatingPredictor {
 public:
  RecommenderPredictor(const Dataset& train, const RecommenderConfig& config,
                       const SimilarityMatrix& content_sims, int threads)
      : model_(train, config, content_sims, threads) {}

  std::optional<double> predict(int student, int course) const override {
    return model_.predict(student, course);
  }
  std::vector<Recommendation> recommend(int student, int top_n) const override {
    return model_.recommend(student, top_n);
  }

 private:
  Recommender model_;
};

PredictorFactory recommender_factory(const RecommenderConfig& config,
                                     const StopwordSet& stopwords, int threads) {
  // Content docs do not change across folds, so tokenize once per dataset.
  auto cache = std::make_shared<std::optional<SimilarityMatrix>>();
  return [config, &stopwords, threads, cache](const Dataset& train) {
    if (!cache->has_value())
      *cache = content_similarity_matrix(course_token_maps(train, stopwords), threads);
    return std::make_unique<RecommenderPredictor>(train, config, **cache, threads);
  };
}

}  // namespace

EvaluationReport cross_validate_with(const Dataset& dataset, int k, uint64_t seed,
                                     const PredictorFactory& factory) {
  return evaluate_on_folds(dataset, stratified_folds(dataset, k, seed), seed, factory);
}

EvaluationReport cross_validate(const Dataset& dataset, const RecommenderConfig& config,
                                int k, uint64_t seed, const StopwordSet& stopwords,
                                int threads) {
  validate(config);
  return cross_validate_with(dataset, k, seed, recommender_factory(config, stopwords, threads));
}

std::vector<AblationRow> compare_ablations(const Dataset& dataset,
                                           const RecommenderConfig& config, int k,
                                           uint64_t seed, const StopwordSet& stopwords,
                                           int threads) {
  validate(config);

  RecommenderConfig cf_only = config;
  cf_only.weight_cf = 1.00;
  cf_only.weight_cbf = 0.00;
  RecommenderConfig cbf_only = config;
  cbf_only.weight_cf = 0.00;
  cbf_only.weight_cbf = 1.00;

  const auto cf_single = [&](double ratings, double grades, double branch) {
    RecommenderConfig c = cf_only;
    c.cf.weight_ratings = ratings;
    c.cf.weight_grades = grades;
    c.cf.weight_branch = branch;
    return c;
  };
  const auto cbf_single = [&](double professors, double competences, double area,
                              double contents) {
    RecommenderConfig c = cbf_only;
    c.cbf.weight_professors = professors;
    c.cbf.weight_competences = competences;
    c.cbf.weight_area = area;
    c.cbf.weight_contents = contents;
    return c;
  };

  const std::vector<std::pair<std::string, RecommenderConfig>> approaches = {
      {"hybrid", config},
      {"cf_multi_criteria", cf_only},
      {"cbf_multi_criteria", cbf_only},
      {"cf_ratings_only", cf_single(1.00, 0.00, 0.00)},
      {"cf_grades_only", cf_single(0.00, 1.00, 0.00)},
      {"cf_branch_only", cf_single(0.00, 0.00, 1.00)},
      {"cbf_professors_only", cbf_single(1.00, 0.00, 0.00, 0.00)},
      {"cbf_contents_only", cbf_single(0.00, 0.00, 0.00, 1.00)},
      {"cbf_competences_only", cbf_single(0.00, 1.00, 0.00, 0.00)},
      {"cbf_knowledge_area_only", cbf_single(0.00, 0.00, 1.00, 0.00)},
  };

  // One fold set shared by every row keeps the comparison paired.
  const auto folds = stratified_folds(dataset, k, seed);
  std::vector<AblationRow> rows;
  rows.reserve(approaches.size());
  for (const auto& [name, cfg] : approaches)
    rows.push_back({name, evaluate_on_folds(dataset, folds, seed,
                                            recommender_factory(cfg, stopwords, threads))});
  return rows;
}

std::string report_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "approach,rmse,ndcg,reach_pct,time_s\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << row.approach << ',';
    if (r.mean_rmse) out << csv::format_double(*r.mean_rmse, 4);
    out << ',' << csv::format_double(r.mean_ndcg, 4) << ','
        << csv::format_double(r.reach_pct, 2) << ','
        << csv::format_double(r.mean_seconds_per_recommendation, 6) << '\n';
  }
  return out.str();
}

CaseStudy case_study(const Dataset& dataset, const RecommenderConfig& config,
                     const std::string& student_id,
                     const std::vector<std::string>& hidden_course_ids, int top_n,
                     const StopwordSet& stopwords, int threads) {
  validate(config);
  const auto student = dataset.student_index(student_id);
  if (!student) throw NotFoundError("unknown student " + student_id);
  if (hidden_course_ids.empty())
    throw std::invalid_argument("case_study: no hidden courses given");

  std::vector<int> hidden_entries;
  std::vector<double> real_ratings;
  for (const auto& course_id : hidden_course_ids) {
    if (!dataset.course_index(course_id)) throw NotFoundError("unknown course " + course_id);
    bool found = false;
    for (size_t i = 0; i < dataset.entries().size(); ++i) {
      const auto& e = dataset.entries()[i];
      if (e.student_id != student_id || e.course_id != course_id) continue;
      if (!e.rating)
        throw std::invalid_argument("case_study: no rating to hide for (" + student_id +
                                    ", " + course_id + ")");
      hidden_entries.push_back(static_cast<int>(i));
      real_ratings.push_back(static_cast<double>(*e.rating));
      found = true;
      break;
    }
    if (!found)
      throw std::invalid_argument("case_study: student " + student_id + " has not rated " +
                                  course_id);
  }

  const Dataset reduced = hide_ratings(dataset, hidden_entries);
  const auto content = content_similarity_matrix(course_token_maps(reduced, stopwords), threads);
  const Recommender model(reduced, config, content, threads);

  CaseStudy cs;
  std::vector<std::pair<std::optional<double>, double>> rmse_pairs;
  for (size_t i = 0; i < hidden_course_ids.size(); ++i) {
    CaseStudyRow row;
    row.course_id = hidden_course_ids[i];
    row.real_rating = real_ratings[i];
    row.estimated = model.predict(*student, *dataset.course_index(row.course_id));
    row.relevant = row.real_rating > kRelevanceThreshold;
    row.recommended = row.estimated && *row.estimated > kRelevanceThreshold;
    rmse_pairs.emplace_back(row.estimated, row.real_rating);
    cs.rows.push_back(std::move(row));
  }
  cs.rmse_over_hidden = rmse(rmse_pairs).value;
  cs.topline = model.recommend(*student, top_n);
  return cs;
}

std::string case_study_csv(const CaseStudy& cs) {
  std::ostringstream out;
  out << "course_id,real_rating,estimated_rating,relevant,recommended\n";
  for (const auto& row : cs.rows) {
    out << row.course_id << ',' << csv::format_double(row.real_rating, 2) << ',';
    if (row.estimated) out << csv::format_double(*row.estimated, 2);
    out << ',' << (row.relevant ? "yes" : "no") << ',' << (row.recommended ? "yes" : "no")
        << '\n';
  }
  return out.str();
}

std::string format_recommendations(const std::vector<Recommendation>& recs) {
  std::string out = "[";
  for (size_t i = 0; i < recs.size(); ++i) {
    if (i) out += ", ";
    out += recs[i].course_id + "(" + csv::format_double(recs[i].estimate, 2) + ")";
  }
  out += "]";
  return out;
}

}  // namespace courserec

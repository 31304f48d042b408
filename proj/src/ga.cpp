#include "courserec/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "csv.hpp"
#include "parallel.hpp"

namespace courserec {

namespace {

// Weight-group boundaries in the gene array.
constexpr int kHybridBegin = 0, kHybridLen = 2;
constexpr int kCfBegin = 2, kCfLen = 3;
constexpr int kCbfBegin = 5, kCbfLen = 4;
constexpr int kTailBegin = 9;  // neighborhood + 4 metric genes

int coin(std::mt19937_64& rng) { return std::uniform_int_distribution<int>(0, 1)(rng); }

VectorMetric vector_metric_from_gene(int gene) {
  return static_cast<VectorMetric>(gene);
}

SetMetric set_metric_from_gene(int gene) { return static_cast<SetMetric>(gene); }

struct GroupHundredths {
  std::vector<int> hybrid, cf, cbf;
};

GroupHundredths decoded_groups(const Chromosome& c) {
  return {normalized_hundredths(c.genes.data() + kHybridBegin, kHybridLen),
          normalized_hundredths(c.genes.data() + kCfBegin, kCfLen),
          normalized_hundredths(c.genes.data() + kCbfBegin, kCbfLen)};
}

// Group contribution to the distance: zero when identical, otherwise the
// number of differing positions minus the one forced by the sum-to-1
// constraint.
int group_distance(const std::vector<int>& a, const std::vector<int>& b) {
  int differing = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++differing;
  return differing == 0 ? 0 : differing - 1;
}

}  // namespace

void validate(const GAParams& params) {
  if (params.generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (params.population_size < 1) throw std::invalid_argument("population_size must be >= 1");
  if (params.crossover_probability <= 0.0 || params.crossover_probability > 1.0)
    throw std::invalid_argument("crossover_probability must be in (0, 1]");
  if (params.initial_incest_threshold < 1)
    throw std::invalid_argument("initial_incest_threshold must be >= 1");
  // decode() pins the gene ranges at their defaults, so the search space
  // must stay within them.
  if (params.weight_gene_max < 1 || params.weight_gene_max > GAParams{}.weight_gene_max)
    throw std::invalid_argument("weight_gene_max outside [1, 50]");
  if (params.neighborhood_gene_max < 1 ||
      params.neighborhood_gene_max > GAParams{}.neighborhood_gene_max)
    throw std::invalid_argument("neighborhood_gene_max outside [1, 50]");
  if (params.threads < 1) throw std::invalid_argument("threads must be >= 1");
}

void validate_genes(const Chromosome& c, const GAParams& params) {
  for (int i = 0; i < 9; ++i)
    if (c.genes[i] < 0 || c.genes[i] > params.weight_gene_max)
      throw std::invalid_argument("weight gene " + std::to_string(i + 1) + " outside [0, " +
                                  std::to_string(params.weight_gene_max) + "]");
  if (c.genes[9] < 1 || c.genes[9] > params.neighborhood_gene_max)
    throw std::invalid_argument("neighborhood gene outside [1, " +
                                std::to_string(params.neighborhood_gene_max) + "]");
  for (int i = 10; i < 12; ++i)
    if (c.genes[i] < 0 || c.genes[i] > 3)
      throw std::invalid_argument("CF metric gene outside {0..3}");
  for (int i = 12; i < 14; ++i)
    if (c.genes[i] < 0 || c.genes[i] > 1)
      throw std::invalid_argument("CBF metric gene outside {0..1}");
}

std::vector<int> normalized_hundredths(const int* genes, int count) {
  long sum = 0;
  for (int i = 0; i < count; ++i) {
    if (genes[i] < 0) throw std::invalid_argument("weight gene must be non-negative");
    sum += genes[i];
  }
  std::vector<int> shares(count);
  if (sum == 0) {
    // All-zero group: uniform weights.
    for (int i = 0; i < count - 1; ++i) shares[i] = static_cast<int>(std::lround(100.0 / count));
  } else {
    for (int i = 0; i < count - 1; ++i)
      shares[i] = static_cast<int>(std::lround(100.0 * genes[i] / static_cast<double>(sum)));
  }
  int partial = std::accumulate(shares.begin(), shares.end() - 1, 0);
  shares[count - 1] = 100 - partial;
  // Rounding can overshoot 100 by a hundredth; take it back from the
  // largest share so every value stays non-negative.
  while (shares[count - 1] < 0) {
    auto largest = std::max_element(shares.begin(), shares.end() - 1);
    --*largest;
    ++shares[count - 1];
  }
  return shares;
}

RecommenderConfig decode(const Chromosome& c) {
  validate_genes(c, GAParams{});
  const auto groups = decoded_groups(c);
  RecommenderConfig config;
  config.weight_cf = groups.hybrid[0] / 100.0;
  config.weight_cbf = groups.hybrid[1] / 100.0;
  config.cf.weight_ratings = groups.cf[0] / 100.0;
  config.cf.weight_grades = groups.cf[1] / 100.0;
  config.cf.weight_branch = groups.cf[2] / 100.0;
  config.cbf.weight_professors = groups.cbf[0] / 100.0;
  config.cbf.weight_competences = groups.cbf[1] / 100.0;
  config.cbf.weight_area = groups.cbf[2] / 100.0;
  config.cbf.weight_contents = groups.cbf[3] / 100.0;
  config.cf.neighborhood_size = c.genes[9];
  config.cf.ratings_metric = vector_metric_from_gene(c.genes[10]);
  config.cf.grades_metric = vector_metric_from_gene(c.genes[11]);
  config.cbf.professors_metric = set_metric_from_gene(c.genes[12]);
  config.cbf.competences_metric = set_metric_from_gene(c.genes[13]);
  return config;
}

int chromosome_distance(const Chromosome& a, const Chromosome& b) {
  const auto ga = decoded_groups(a);
  const auto gb = decoded_groups(b);
  int distance = group_distance(ga.hybrid, gb.hybrid) + group_distance(ga.cf, gb.cf) +
                 group_distance(ga.cbf, gb.cbf);
  for (int i = kTailBegin; i < kChromosomeLength; ++i)
    if (a.genes[i] != b.genes[i]) ++distance;
  return distance;
}

std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a, const Chromosome& b,
                                                    std::mt19937_64& rng) {
  Chromosome child1 = a;
  Chromosome child2 = b;
  const auto swap_range = [&](int begin, int len) {
    for (int i = begin; i < begin + len; ++i) std::swap(child1.genes[i], child2.genes[i]);
  };
  if (coin(rng)) swap_range(kHybridBegin, kHybridLen);
  if (coin(rng)) swap_range(kCfBegin, kCfLen);
  if (coin(rng)) swap_range(kCbfBegin, kCbfLen);
  for (int i = kTailBegin; i < kChromosomeLength; ++i)
    if (coin(rng)) std::swap(child1.genes[i], child2.genes[i]);
  return {child1, child2};
}

Chromosome random_chromosome(const GAParams& params, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> weight(0, params.weight_gene_max);
  std::uniform_int_distribution<int> neighborhood(1, params.neighborhood_gene_max);
  std::uniform_int_distribution<int> vector_metric(0, 3);
  std::uniform_int_distribution<int> set_metric(0, 1);
  Chromosome c;
  for (int i = 0; i < 9; ++i) c.genes[i] = weight(rng);
  c.genes[9] = neighborhood(rng);
  c.genes[10] = vector_metric(rng);
  c.genes[11] = vector_metric(rng);
  c.genes[12] = set_metric(rng);
  c.genes[13] = set_metric(rng);
  return c;
}

Chromosome equal_weights_chromosome() {
  Chromosome c;
  for (int i = 0; i < 9; ++i) c.genes[i] = 25;
  c.genes[9] = 10;
  return c;
}

void restart_population(std::vector<Individual>& population, const GAParams& params,
                        std::mt19937_64& rng) {
  if (population.empty()) throw std::invalid_argument("restart_population: empty population");
  std::sort(population.begin(), population.end(), [](const Individual& a, const Individual& b) {
    const double fa = a.fitness.value_or(std::numeric_limits<double>::infinity());
    const double fb = b.fitness.value_or(std::numeric_limits<double>::infinity());
    return fa < fb || (fa == fb && a.chromosome < b.chromosome);
  });
  const size_t survivors =
      static_cast<size_t>(std::ceil(0.10 * static_cast<double>(population.size())));
  for (size_t i = survivors; i < population.size(); ++i)
    population[i] = Individual{random_chromosome(params, rng), std::nullopt};
}

std::pair<int, bool> update_incest_threshold(int current, bool any_couple_reached_bar,
                                             int initial_value) {
  int next = any_couple_reached_bar ? current : current - 1;
  if (next <= 0) return {initial_value, true};
  return {next, false};
}

// ---------------------------------------------------------------------------
// Fitness

FitnessEvaluator::FitnessEvaluator(const Dataset& train, uint64_t holdout_seed,
                                   const StopwordSet& stopwords, int threads)
    : FitnessEvaluator(split_holdout(train, 0.20, holdout_seed), holdout_seed, stopwords,
                       threads) {}

FitnessEvaluator::FitnessEvaluator(HoldoutSplit split, uint64_t holdout_seed,
                                   const StopwordSet& stopwords, int threads)
    : holdout_seed_(holdout_seed), train_(std::move(split.train)) {
  if (split.test.empty()) throw std::invalid_argument("fitness hold-out is empty");
  heldout_.reserve(split.test.size());
  for (const auto& h : split.test)
    heldout_.push_back({*train_.student_index(h.student_id),
                        *train_.course_index(h.course_id), static_cast<double>(h.rating)});

  view_ = RatingView::build(train_);

  const int s = train_.num_students();
  for (int metric = 0; metric < 4; ++metric) {
    const auto kind = static_cast<VectorMetric>(metric);
    SimilarityMatrix ratings(s), grades(s);
    parallel_for(s, threads, [&](int i) {
      for (int j = i + 1; j < s; ++j) {
        ratings.set(i, j, vector_similarity(kind, view_.ratings[i], view_.ratings[j]));
        grades.set(i, j, vector_similarity(kind, view_.grades[i], view_.grades[j]));
      }
    });
    ratings_tables_[metric] = std::move(ratings);
    grades_tables_[metric] = std::move(grades);
  }
  branch_table_ = SimilarityMatrix(s);
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      branch_table_.set(i, j, exact_match_similarity(train_.students()[i].branch,
                                                     train_.students()[j].branch));

  const int c = train_.num_courses();
  const auto& universes = train_.universes();
  for (int metric = 0; metric < 2; ++metric) {
    const auto kind = static_cast<SetMetric>(metric);
    SimilarityMatrix professors(c), competences(c);
    parallel_for(c, threads, [&](int i) {
      for (int j = i + 1; j < c; ++j) {
        professors.set(i, j, binary_set_similarity(kind, train_.courses()[i].professors,
                                                   train_.courses()[j].professors,
                                                   universes.num_professors));
        competences.set(i, j, binary_set_similarity(kind, train_.courses()[i].competences,
                                                    train_.courses()[j].competences,
                                                    universes.num_competences));
      }
    });
    professors_tables_[metric] = std::move(professors);
    competences_tables_[metric] = std::move(competences);
  }
  area_table_ = SimilarityMatrix(c);
  for (int i = 0; i < c; ++i)
    for (int j = i + 1; j < c; ++j)
      area_table_.set(i, j, exact_match_similarity(train_.courses()[i].knowledge_area,
                                                   train_.courses()[j].knowledge_area));
  content_table_ = content_similarity_matrix(course_token_maps(train_, stopwords), threads);
}

double FitnessEvaluator::evaluate(const Chromosome& c) const {
  const RecommenderConfig config = decode(c);

  const int s = train_.num_students();
  SimilarityMatrix student_sims(s);
  const auto& ratings = ratings_tables_[static_cast<int>(config.cf.ratings_metric)];
  const auto& grades = grades_tables_[static_cast<int>(config.cf.grades_metric)];
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      student_sims.set(i, j,
                       combine_student_criteria(ratings.at(i, j), grades.at(i, j),
                                                *branch_table_.at(i, j), config.cf));

  const int n = train_.num_courses();
  SimilarityMatrix course_sims(n);
  const auto& professors = professors_tables_[static_cast<int>(config.cbf.professors_metric)];
  const auto& competences =
      competences_tables_[static_cast<int>(config.cbf.competences_metric)];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      course_sims.set(i, j, config.cbf.weight_professors * *professors.at(i, j) +
                                config.cbf.weight_competences * *competences.at(i, j) +
                                config.cbf.weight_area * *area_table_.at(i, j) +
                                config.cbf.weight_contents * *content_table_.at(i, j));

  // Pairs the recommender cannot predict contribute the full scale width.
  constexpr double kAbstainError = 4.0;
  double sum_sq = 0.0;
  for (const auto& pair : heldout_) {
    const auto cf_pred = predict_cf(view_, config.cf, student_sims, pair.student, pair.course);
    const auto cbf_pred = predict_cbf(view_, course_sims, pair.student, pair.course);
    const auto pred = predict_hybrid(config, cf_pred, cbf_pred);
    const double err = pred ? *pred - pair.rating : kAbstainError;
    sum_sq += err * err;
  }
  return std::sqrt(sum_sq / static_cast<double>(heldout_.size()));
}

double evaluate_fitness(const Chromosome& c, const Dataset& train, uint64_t holdout_seed,
                        const StopwordSet& stopwords) {
  return FitnessEvaluator(train, holdout_seed, stopwords).evaluate(c);
}

// ---------------------------------------------------------------------------
// Search loop

uint64_t derive_holdout_seed(uint64_t ga_seed) {
  // splitmix64 step keeps the fitness split decoupled from the GA stream.
  uint64_t z = ga_seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

void evaluate_pending(std::vector<Individual>& population, const FitnessEvaluator& evaluator,
                      int threads) {
  std::vector<int> pending;
  for (size_t i = 0; i < population.size(); ++i)
    if (!population[i].fitness) pending.push_back(static_cast<int>(i));
  parallel_for(static_cast<int>(pending.size()), threads, [&](int i) {
    auto& individual = population[pending[i]];
    individual.fitness = evaluator.evaluate(individual.chromosome);
  });
}

void sort_by_fitness(std::vector<Individual>& population) {
  std::sort(population.begin(), population.end(), [](const Individual& a, const Individual& b) {
    return *a.fitness < *b.fitness || (*a.fitness == *b.fitness && a.chromosome < b.chromosome);
  });
}

}  // namespace

GAResult run_ga(const GAParams& params, const Dataset& train, const StopwordSet& stopwords) {
  validate(params);
  std::mt19937_64 rng(params.seed);
  const uint64_t holdout_seed = derive_holdout_seed(params.seed);
  const FitnessEvaluator evaluator(train, holdout_seed, stopwords, params.threads);

  std::vector<Individual> population;
  population.reserve(params.population_size);
  population.push_back({equal_weights_chromosome(), std::nullopt});
  for (int i = 1; i < params.population_size; ++i)
    population.push_back({random_chromosome(params, rng), std::nullopt});
  evaluate_pending(population, evaluator, params.threads);
  sort_by_fitness(population);

  GAResult result;
  result.seed = params.seed;
  result.holdout_seed = holdout_seed;
  result.best_chromosome = population.front().chromosome;
  result.best_fitness = *population.front().fitness;

  int threshold = params.initial_incest_threshold;
  std::bernoulli_distribution do_cross(params.crossover_probability);
  std::vector<int> order(population.size());
  std::iota(order.begin(), order.end(), 0);

  for (int gen = 1; gen <= params.generations; ++gen) {
    std::shuffle(order.begin(), order.end(), rng);
    bool any_couple_reached_bar = false;
    std::vector<Individual> offspring;
    for (size_t pair = 0; pair + 1 < order.size(); pair += 2) {
      const auto& a = population[order[pair]].chromosome;
      const auto& b = population[order[pair + 1]].chromosome;
      if (chromosome_distance(a, b) < threshold) continue;
      any_couple_reached_bar = true;
      if (!do_cross(rng)) continue;
      auto [child1, child2] = uniform_crossover(a, b, rng);
      offspring.push_back({child1, std::nullopt});
      offspring.push_back({child2, std::nullopt});
    }
    evaluate_pending(offspring, evaluator, params.threads);

    // Elitist update: parents and offspring compete for the fixed size.
    population.insert(population.end(), offspring.begin(), offspring.end());
    sort_by_fitness(population);
    population.resize(params.population_size);

    const auto [next_threshold, restart] =
        update_incest_threshold(threshold, any_couple_reached_bar,
                                params.initial_incest_threshold);
    threshold = next_threshold;
    if (restart) {
      restart_population(population, params, rng);
      evaluate_pending(population, evaluator, params.threads);
      sort_by_fitness(population);
    }

    if (*population.front().fitness < result.best_fitness) {
      result.best_fitness = *population.front().fitness;
      result.best_chromosome = population.front().chromosome;
    }

    GenerationStats stats;
    stats.generation = gen;
    stats.best_fitness = result.best_fitness;
    double total = 0.0;
    for (const auto& ind : population) total += *ind.fitness;
    stats.mean_fitness = total / static_cast<double>(population.size());
    stats.incest_threshold = threshold;
    stats.restarted = restart;
    stats.best_config = decode(result.best_chromosome);
    result.trace.push_back(std::move(stats));
  }

  result.best_config = decode(result.best_chromosome);
  return result;
}

std::string trace_csv(const GAResult& result) {
  std::ostringstream out;
  out << "generation,best_fitness,mean_fitness,incest_threshold,restarted\n";
  for (const auto& g : result.trace)
    out << g.generation << ',' << csv::format_double(g.best_fitness, 6) << ','
        << csv::format_double(g.mean_fitness, 6) << ',' << g.incest_threshold << ','
        << (g.restarted ? 1 : 0) << '\n';
  return out.str();
}

std::string phenotype_trace_csv(const GAResult& result) {
  std::ostringstream out;
  out << "generation,cf_weight,cbf_weight,ratings_weight,grades_weight,branch_weight,"
         "professors_weight,competences_weight,knowledge_area_weight,contents_weight,"
         "neighborhood_size,ratings_metric,grades_metric,professors_metric,"
         "competences_metric\n";
  for (const auto& g : result.trace) {
    const auto& c = g.best_config;
    out << g.generation << ',' << csv::format_double(c.weight_cf, 2) << ','
        << csv::format_double(c.weight_cbf, 2) << ','
        << csv::format_double(c.cf.weight_ratings, 2) << ','
        << csv::format_double(c.cf.weight_grades, 2) << ','
        << csv::format_double(c.cf.weight_branch, 2) << ','
        << csv::format_double(c.cbf.weight_professors, 2) << ','
        << csv::format_double(c.cbf.weight_competences, 2) << ','
        << csv::format_double(c.cbf.weight_area, 2) << ','
        << csv::format_double(c.cbf.weight_contents, 2) << ',' << c.cf.neighborhood_size
        << ',' << to_string(c.cf.ratings_metric) << ',' << to_string(c.cf.grades_metric)
        << ',' << to_string(c.cbf.professors_metric) << ','
        << to_string(c.cbf.competences_metric) << '\n';
  }
  return out.str();
}

}  // namespace courserec

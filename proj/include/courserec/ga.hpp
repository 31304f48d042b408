#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "courserec/config.hpp"
#include "courserec/content.hpp"
#include "courserec/dataset.hpp"
#include "courserec/recommender.hpp"

namespace courserec {

inline constexpr int kChromosomeLength = 14;

/// Integer genotype of a recommender configuration.
/// Layout: [0,1] hybrid weights; [2..4] CF criterion weights (ratings,
/// grades, branch); [5..8] CBF criterion weights (professors, competences,
/// area, contents); [9] neighborhood size; [10,11] CF metric ids for ratings
/// and grades (0 euclidean, 1 taxicab, 2 pearson, 3 spearman); [12,13] CBF
/// metric ids for professors and competences (0 jaccard, 1 log_likelihood).
struct Chromosome {
  std::array<int, kChromosomeLength> genes{};
  auto operator<=>(const Chromosome&) const = default;
};

struct GAParams {
  int generations = 1000;
  int population_size = 50;
  double crossover_probability = 0.9;
  int initial_incest_threshold = 4;
  int weight_gene_max = 50;        // weight genes in [0, weight_gene_max]
  int neighborhood_gene_max = 50;  // gene 9 in [1, neighborhood_gene_max]
  uint64_t seed = 1;
  int threads = 1;
};

void validate(const GAParams& params);
void validate_genes(const Chromosome& c, const GAParams& params);

/// Normalizes one weight group to integer hundredths summing to exactly
/// 100: each value is rounded to the nearest hundredth of its share, the
/// last carries the remainder. An all-zero group yields uniform shares.
std::vector<int> normalized_hundredths(const int* genes, int count);

/// Genotype -> phenotype. Weight groups are normalized by their group sum
/// and rounded to 2 decimals with the last group member adjusted so each
/// group sums to exactly 1.00. Throws std::invalid_argument on gene values
/// outside the default ranges.
RecommenderConfig decode(const Chromosome& c);

/// Hamming-style distance: the three weight groups are compared on decoded
/// 2-decimal values and contribute (#differing positions - 1) when they
/// differ at all (the sum-to-1 constraint forces at least two positions to
/// move together); the remaining five genes contribute 1 each when unequal.
/// Range 0..11.
int chromosome_distance(const Chromosome& a, const Chromosome& b);

/// Uniform crossover adapted to the related-gene groups: each weight group
/// is swapped atomically between the children with probability 1/2, each of
/// the five tail genes independently.
std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a,
                                                    const Chromosome& b,
                                                    std::mt19937_64& rng);

Chromosome random_chromosome(const GAParams& params, std::mt19937_64& rng);

/// Baseline individual: every weight gene equal, neighborhood 10, metric
/// genes 0. Seeded into the initial population so the optimized result can
/// never be worse than it.
Chromosome equal_weights_chromosome();

struct Individual {
  Chromosome chromosome;
  std::optional<double> fitness;
};

/// Keeps the ceil(10%) fittest unchanged (ties by lexicographically lower
/// genes) and replaces the remainder with fresh random, unevaluated
/// chromosomes. Population size is preserved.
void restart_population(std::vector<Individual>& population, const GAParams& params,
                        std::mt19937_64& rng);

/// End-of-generation threshold transition: decrements when no couple
/// reached the distance bar, then resets to the initial value when it hits
/// zero. Returns the new threshold and whether a restart fires.
std::pair<int, bool> update_incest_threshold(int current, bool any_couple_reached_bar,
                                             int initial_value);

/// Precomputes the fixed 80/20 hold-out split of a GA run and every
/// metric-level criterion table, so that evaluating a chromosome only
/// combines tables and predicts. evaluate() is a pure read and thread-safe.
class FitnessEvaluator {
 public:
  FitnessEvaluator(const Dataset& train, uint64_t holdout_seed,
                   const StopwordSet& stopwords = {}, int threads = 1);

  /// RMSE over the hold-out pairs; a pair the recommender cannot predict
  /// contributes the full scale width (4.0) as its error term.
  double evaluate(const Chromosome& c) const;

  uint64_t holdout_seed() const { return holdout_seed_; }
  int holdout_size() const { return static_cast<int>(heldout_.size()); }

 private:
  FitnessEvaluator(HoldoutSplit split, uint64_t holdout_seed, const StopwordSet& stopwords,
                   int threads);

  struct HeldOutPair {
    int student = 0;
    int course = 0;
    double rating = 0.0;
  };

  uint64_t holdout_seed_;
  Dataset train_;  // the 80% side
  std::vector<HeldOutPair> heldout_;
  RatingView view_;
  std::array<SimilarityMatrix, 4> ratings_tables_;  // one per VectorMetric
  std::array<SimilarityMatrix, 4> grades_tables_;
  SimilarityMatrix branch_table_;
  std::array<SimilarityMatrix, 2> professors_tables_;  // one per SetMetric
  std::array<SimilarityMatrix, 2> competences_tables_;
  SimilarityMatrix area_table_;
  SimilarityMatrix content_table_;
};

/// One-shot fitness of a chromosome on train with an internal 80/20 split.
double evaluate_fitness(const Chromosome& c, const Dataset& train, uint64_t holdout_seed,
                        const StopwordSet& stopwords = {});

struct GenerationStats {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  int incest_threshold = 0;  // value after this generation's updates
  bool restarted = false;
  RecommenderConfig best_config;
};

struct GAResult {
  Chromosome best_chromosome;
  RecommenderConfig best_config;
  double best_fitness = 0.0;
  std::vector<GenerationStats> trace;
  uint64_t seed = 0;
  uint64_t holdout_seed = 0;
};

/// CHC-style search: random couples, incest prevention with a decaying
/// distance threshold, group-aware uniform crossover, elitist merge of
/// parents and offspring, and a keep-10% restart when the threshold decays
/// to zero. Fully deterministic for a fixed (params, train).
GAResult run_ga(const GAParams& params, const Dataset& train,
                const StopwordSet& stopwords = {});

uint64_t derive_holdout_seed(uint64_t ga_seed);

/// CSV `generation,best_fitness,mean_fitness,incest_threshold,restarted`.
std::string trace_csv(const GAResult& result);

/// CSV of the decoded best configuration per generation.
std::string phenotype_trace_csv(const GAResult& result);

}  // namespace courserec

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "courserec/similarity.hpp"

namespace courserec {

struct StudentRecord {
  std::string student_id;
  int branch = 1;  // 1-based category
  bool operator==(const StudentRecord&) const = default;
};

struct CourseRecord {
  std::string course_id;
  BinarySet professors;      // 0-based indices, sorted, at least one entry
  BinarySet competences;     // 0-based indices, sorted, may be empty
  int knowledge_area = 1;    // 1-based category
  std::string content_file;  // name relative to the content directory
  std::string content_text;
  bool operator==(const CourseRecord&) const = default;
};

struct RatingEntry {
  std::string student_id;
  std::string course_id;
  std::optional<int> rating;    // 1..5
  std::optional<double> grade;  // [0, 10]
  bool operator==(const RatingEntry&) const = default;
};

struct Universes {
  int num_professors = 0;
  int num_competences = 0;
  int num_branches = 0;
  int num_areas = 0;
  bool operator==(const Universes&) const = default;
};

/// Immutable after construction; the constructor enforces every referential
/// and range invariant (throws std::invalid_argument on violation).
class Dataset {
 public:
  Dataset(std::vector<StudentRecord> students, std::vector<CourseRecord> courses,
          std::vector<RatingEntry> entries, Universes universes);

  const std::vector<StudentRecord>& students() const { return students_; }
  const std::vector<CourseRecord>& courses() const { return courses_; }
  const std::vector<RatingEntry>& entries() const { return entries_; }
  const Universes& universes() const { return universes_; }

  int num_students() const { return static_cast<int>(students_.size()); }
  int num_courses() const { return static_cast<int>(courses_.size()); }

  std::optional<int> student_index(const std::string& id) const;
  std::optional<int> course_index(const std::string& id) const;

  /// Indices into entries() of entries that carry a rating.
  std::vector<int> rated_entry_indices() const;

  bool operator==(const Dataset& other) const;

 private:
  std::vector<StudentRecord> students_;
  std::vector<CourseRecord> courses_;
  std::vector<RatingEntry> entries_;
  Universes universes_;
  std::unordered_map<std::string, int> student_index_;
  std::unordered_map<std::string, int> course_index_;
};

struct SyntheticSpec {
  int students = 95;
  int courses = 63;
  int professors = 50;
  int competences = 30;
  int branches = 3;
  int areas = 8;
  int min_ratings_per_student = 20;
  int max_ratings_per_student = 40;
  int vocab_size = 500;
};

/// Seeded synthetic dataset with the same schema as loaded data. Rating and
/// grade of an entry are drawn from a shared latent preference, so the two
/// criteria correlate; content docs are keyword bags drawn from per-area
/// topic pools, so same-area courses are textually closer on average. Every
/// student rates at least one course. Deterministic for a fixed (spec, seed).
Dataset generate_synthetic(const SyntheticSpec& spec, uint64_t seed);

Dataset load_dataset(const std::string& students_csv, const std::string& courses_csv,
                     const std::string& ratings_csv, const std::string& universes_csv,
                     const std::string& content_dir);

/// load_dataset with the standard file names under one directory
/// (students.csv, courses.csv, ratings.csv, universes.csv, content/).
Dataset load_dataset_dir(const std::string& dir);

/// Writes the five CSV files plus one content doc per course under dir.
void save_dataset(const Dataset& dataset, const std::string& dir);

struct HeldOutRating {
  std::string student_id;
  std::string course_id;
  int rating = 0;
};

struct HoldoutSplit {
  Dataset train;
  std::vector<HeldOutRating> test;
};

/// Hides ceil(test_fraction * #rated) ratings, stratified by course: each
/// course's test count differs from test_fraction * (its rating count) by
/// less than one. A course with a single rating keeps it in train. Grades
/// and all side information stay in train. Deterministic for a fixed seed.
HoldoutSplit split_holdout(const Dataset& dataset, double test_fraction, uint64_t seed);

/// k disjoint sets of rated-entry indices partitioning the rated entries;
/// per course the fold counts differ by at most one. A course with fewer
/// ratings than k contributes its (seed-shuffled) ratings to the first
/// folds. Deterministic for a fixed seed.
std::vector<std::vector<int>> stratified_folds(const Dataset& dataset, int k, uint64_t seed);

/// Copy of the dataset with the given entries' ratings removed; grades (and
/// all side information) are kept. Entries left with neither rating nor
/// grade are dropped.
Dataset hide_ratings(const Dataset& dataset, const std::vector<int>& entry_indices);

}  // namespace courserec

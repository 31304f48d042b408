#include "courserec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "courserec/errors.hpp"
#include "csv.hpp"

namespace fs = std::filesystem;

namespace courserec {

namespace {

void check(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read content doc " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return out.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error while writing " + path.string());
}

BinarySet parse_index_set(const std::string& field, int universe, const csv::Location& loc,
                          const char* what) {
  BinarySet indices;
  if (csv::strip(field).empty()) return indices;
  for (const auto& part : csv::split(field, ';')) {
    const long v = csv::parse_int(part, loc, what);
    if (v < 0 || v >= universe)
      csv::fail(loc, std::string(what) + " index " + std::to_string(v) +
                         " outside universe [0, " + std::to_string(universe) + ")");
    indices.push_back(static_cast<int>(v));
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return indices;
}

std::string format_index_set(const BinarySet& set) {
  std::string out;
  for (size_t i = 0; i < set.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(set[i]);
  }
  return out;
}

}  // namespace

Dataset::Dataset(std::vector<StudentRecord> students, std::vector<CourseRecord> courses,
                 std::vector<RatingEntry> entries, Universes universes)
    : students_(std::move(students)),
      courses_(std::move(courses)),
      entries_(std::move(entries)),
      universes_(universes) {
  check(!students_.empty(), "dataset needs at least one student");
  check(!courses_.empty(), "dataset needs at least one course");
  check(universes_.num_professors > 0 && universes_.num_competences > 0 &&
            universes_.num_branches > 0 && universes_.num_areas > 0,
        "universe sizes must be positive");

  for (size_t i = 0; i < students_.size(); ++i) {
    const auto& s = students_[i];
    check(!s.student_id.empty(), "empty student id");
    check(s.branch >= 1 && s.branch <= universes_.num_branches,
          "student " + s.student_id + ": branch " + std::to_string(s.branch) +
              " outside [1, " + std::to_string(universes_.num_branches) + "]");
    check(student_index_.emplace(s.student_id, static_cast<int>(i)).second,
          "duplicate student id " + s.student_id);
  }
  for (size_t i = 0; i < courses_.size(); ++i) {
    const auto& c = courses_[i];
    check(!c.course_id.empty(), "empty course id");
    check(!c.professors.empty(), "course " + c.course_id + " has no professors");
    check(c.professors.back() < universes_.num_professors &&
              (c.competences.empty() || c.competences.back() < universes_.num_competences),
          "course " + c.course_id + ": membership index outside its universe");
    check(std::is_sorted(c.professors.begin(), c.professors.end()) &&
              std::is_sorted(c.competences.begin(), c.competences.end()),
          "course " + c.course_id + ": membership vectors must be sorted");
    check(c.professors.front() >= 0 && (c.competences.empty() || c.competences.front() >= 0),
          "course " + c.course_id + ": negative membership index");
    check(c.knowledge_area >= 1 && c.knowledge_area <= universes_.num_areas,
          "course " + c.course_id + ": knowledge area outside [1, " +
              std::to_string(universes_.num_areas) + "]");
    check(course_index_.emplace(c.course_id, static_cast<int>(i)).second,
          "duplicate course id " + c.course_id);
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& e : entries_) {
    const auto s = student_index(e.student_id);
    const auto c = course_index(e.course_id);
    check(s.has_value(), "rating references unknown student " + e.student_id);
    check(c.has_value(), "rating references unknown course " + e.course_id);
    check(!e.rating || (*e.rating >= 1 && *e.rating <= 5),
          "rating for (" + e.student_id + ", " + e.course_id + ") outside {1..5}");
    check(!e.grade || (*e.grade >= 0.0 && *e.grade <= 10.0),
          "grade for (" + e.student_id + ", " + e.course_id + ") outside [0, 10]");
    check(seen.emplace(*s, *c).second,
          "duplicate entry for (" + e.student_id + ", " + e.course_id + ")");
  }
}

std::optional<int> Dataset::student_index(const std::string& id) const {
  auto it = student_index_.find(id);
  if (it == student_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Dataset::course_index(const std::string& id) const {
  auto it = course_index_.find(id);
  if (it == course_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Dataset::rated_entry_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].rating) out.push_back(static_cast<int>(i));
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  return students_ == other.students_ && courses_ == other.courses_ &&
         entries_ == other.entries_ && universes_ == other.universes_;
}

// ---------------------------------------------------------------------------
// Loading / saving

Dataset load_dataset(const std::string& students_csv, const std::string& courses_csv,
                     const std::string& ratings_csv, const std::string& universes_csv,
                     const std::string& content_dir) {
  Universes universes;
  bool have_universes = false;
  csv::for_each_row(universes_csv, "num_professors,num_competences,num_branches,num_areas",
                    [&](const std::vector<std::string>& f, const csv::Location& loc) {
                      if (f.size() != 4) csv::fail(loc, "expected 4 fields");
                      if (have_universes) csv::fail(loc, "more than one universes row");
                      universes.num_professors =
                          static_cast<int>(csv::parse_int(f[0], loc, "num_professors"));
                      universes.num_competences =
                          static_cast<int>(csv::parse_int(f[1], loc, "num_competences"));
                      universes.num_branches =
                          static_cast<int>(csv::parse_int(f[2], loc, "num_branches"));
                      universes.num_areas =
                          static_cast<int>(csv::parse_int(f[3], loc, "num_areas"));
                      have_universes = true;
                    });
  if (!have_universes) throw ParseError(universes_csv + ": missing universes row");

  std::vector<StudentRecord> students;
  csv::for_each_row(students_csv, "student_id,branch",
                    [&](const std::vector<std::string>& f, const csv::Location& loc) {
                      if (f.size() != 2) csv::fail(loc, "expected 2 fields");
                      StudentRecord s;
                      s.student_id = csv::strip(f[0]);
                      s.branch = static_cast<int>(csv::parse_int(f[1], loc, "branch"));
                      if (s.branch < 1 || s.branch > universes.num_branches)
                        csv::fail(loc, "branch " + std::to_string(s.branch) + " outside [1, " +
                                           std::to_string(universes.num_branches) + "]");
                      students.push_back(std::move(s));
                    });

  std::vector<CourseRecord> courses;
  csv::for_each_row(
      courses_csv, "course_id,knowledge_area,professors,competences,content_file",
      [&](const std::vector<std::string>& f, const csv::Location& loc) {
        if (f.size() != 5) csv::fail(loc, "expected 5 fields");
        CourseRecord c;
        c.course_id = csv::strip(f[0]);
        c.knowledge_area = static_cast<int>(csv::parse_int(f[1], loc, "knowledge_area"));
        if (c.knowledge_area < 1 || c.knowledge_area > universes.num_areas)
          csv::fail(loc, "knowledge_area outside [1, " + std::to_string(universes.num_areas) +
                             "]");
        c.professors = parse_index_set(f[2], universes.num_professors, loc, "professor");
        if (c.professors.empty()) csv::fail(loc, "course " + c.course_id + " has no professors");
        c.competences = parse_index_set(f[3], universes.num_competences, loc, "competence");
        c.content_file = csv::strip(f[4]);
        if (c.content_file.empty()) csv::fail(loc, "missing content_file");
        c.content_text = read_file(fs::path(content_dir) / c.content_file);
        courses.push_back(std::move(c));
      });

  std::set<std::string> student_ids, course_ids;
  for (const auto& s : students) student_ids.insert(s.student_id);
  for (const auto& c : courses) course_ids.insert(c.course_id);

  std::vector<RatingEntry> entries;
  std::set<std::pair<std::string, std::string>> seen;
  csv::for_each_row(
      ratings_csv, "student_id,course_id,rating,grade",
      [&](const std::vector<std::string>& f, const csv::Location& loc) {
        if (f.size() != 4) csv::fail(loc, "expected 4 fields");
        RatingEntry e;
        e.student_id = csv::strip(f[0]);
        e.course_id = csv::strip(f[1]);
        if (!student_ids.contains(e.student_id))
          csv::fail(loc, "unknown student '" + e.student_id + "'");
        if (!course_ids.contains(e.course_id))
          csv::fail(loc, "unknown course '" + e.course_id + "'");
        if (!seen.emplace(e.student_id, e.course_id).second)
          csv::fail(loc, "duplicate entry for (" + e.student_id + ", " + e.course_id + ")");
        if (!csv::strip(f[2]).empty()) {
          const long r = csv::parse_int(f[2], loc, "rating");
          if (r < 1 || r > 5)
            csv::fail(loc, "rating " + std::to_string(r) + " outside {1..5}");
          e.rating = static_cast<int>(r);
        }
        if (!csv::strip(f[3]).empty()) {
          const double g = csv::parse_double(f[3], loc, "grade");
          if (g < 0.0 || g > 10.0)
            csv::fail(loc, "grade " + csv::strip(f[3]) + " outside [0, 10]");
          e.grade = g;
        }
        entries.push_back(std::move(e));
      });

  return Dataset(std::move(students), std::move(courses), std::move(entries), universes);
}

Dataset load_dataset_dir(const std::string& dir) {
  const fs::path base(dir);
  return load_dataset((base / "students.csv").string(), (base / "courses.csv").string(),
                      (base / "ratings.csv").string(), (base / "universes.csv").string(),
                      (base / "content").string());
}

void save_dataset(const Dataset& dataset, const std::string& dir) {
  const fs::path base(dir);
  std::error_code ec;
  fs::create_directories(base / "content", ec);
  if (ec) throw IoError("cannot create " + (base / "content").string() + ": " + ec.message());

  {
    std::ostringstream out;
    const auto& u = dataset.universes();
    out << "num_professors,num_competences,num_branches,num_areas\n"
        << u.num_professors << ',' << u.num_competences << ',' << u.num_branches << ','
        << u.num_areas << '\n';
    write_file(base / "universes.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "student_id,branch\n";
    for (const auto& s : dataset.students()) out << s.student_id << ',' << s.branch << '\n';
    write_file(base / "students.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "course_id,knowledge_area,professors,competences,content_file\n";
    for (const auto& c : dataset.courses()) {
      out << c.course_id << ',' << c.knowledge_area << ',' << format_index_set(c.professors)
          << ',' << format_index_set(c.competences) << ',' << c.content_file << '\n';
      write_file(base / "content" / c.content_file, c.content_text);
    }
    write_file(base / "courses.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "student_id,course_id,rating,grade\n";
    for (const auto& e : dataset.entries()) {
      out << e.student_id << ',' << e.course_id << ',';
      if (e.rating) out << *e.rating;
      out << ',';
      if (e.grade) out << csv::format_double(*e.grade, 2);
      out << '\n';
    }
    write_file(base / "ratings.csv", out.str());
  }
}

// ---------------------------------------------------------------------------
// Synthetic generation

Dataset generate_synthetic(const SyntheticSpec& spec, uint64_t seed) {
  check(spec.students > 0 && spec.courses > 0 && spec.professors > 0 &&
            spec.competences > 0 && spec.branches > 0 && spec.areas > 0 &&
            spec.vocab_size > 0,
        "synthetic spec: all counts must be positive");
  check(spec.min_ratings_per_student >= 0 &&
            spec.min_ratings_per_student <= spec.max_ratings_per_student,
        "synthetic spec: bad ratings_per_student range");
  check(spec.max_ratings_per_student <= spec.courses,
        "synthetic spec: ratings_per_student upper bound exceeds course count");

  std::mt19937_64 rng(seed);
  const auto pad = [](int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
  };
  const int swidth = static_cast<int>(std::to_string(spec.students).size());
  const int cwidth = static_cast<int>(std::to_string(spec.courses).size());

  std::vector<StudentRecord> students(spec.students);
  std::uniform_int_distribution<int> branch_dist(1, spec.branches);
  for (int i = 0; i < spec.students; ++i) {
    students[i].student_id = "s" + pad(i + 1, swidth);
    students[i].branch = branch_dist(rng);
  }

  std::vector<CourseRecord> courses(spec.courses);
  std::uniform_int_distribution<int> area_dist(1, spec.areas);
  std::uniform_int_distribution<int> prof_count_dist(1, std::min(3, spec.professors));
  std::uniform_int_distribution<int> prof_dist(0, spec.professors - 1);
  std::uniform_int_distribution<int> comp_count_dist(0, std::min(5, spec.competences));
  std::uniform_int_distribution<int> comp_dist(0, spec.competences - 1);
  std::uniform_int_distribution<int> doc_len_dist(60, 120);
  std::uniform_int_distribution<int> vocab_dist(0, spec.vocab_size - 1);
  std::bernoulli_distribution from_topic(0.65);

  for (int i = 0; i < spec.courses; ++i) {
    auto& c = courses[i];
    c.course_id = "c" + pad(i + 1, cwidth);
    c.knowledge_area = area_dist(rng);

    std::set<int> profs;
    const int nprofs = prof_count_dist(rng);
    while (static_cast<int>(profs.size()) < nprofs) profs.insert(prof_dist(rng));
    c.professors.assign(profs.begin(), profs.end());

    std::set<int> comps;
    const int ncomps = comp_count_dist(rng);
    while (static_cast<int>(comps.size()) < ncomps) comps.insert(comp_dist(rng));
    c.competences.assign(comps.begin(), comps.end());

    // Keyword bag biased towards the area's slice of the vocabulary.
    const int slice = std::max(1, spec.vocab_size / spec.areas);
    const int lo = (c.knowledge_area - 1) * slice;
    const int hi = std::min(spec.vocab_size - 1, lo + slice - 1);
    std::uniform_int_distribution<int> topic_dist(lo, hi);
    std::string doc;
    const int len = doc_len_dist(rng);
    for (int w = 0; w < len; ++w) {
      const int term = from_topic(rng) ? topic_dist(rng) : vocab_dist(rng);
      doc += "kw" + std::to_string(term);
      doc += (w + 1) % 12 == 0 ? '\n' : ' ';
    }
    doc += '\n';
    c.content_text = std::move(doc);
    c.content_file = c.course_id + ".txt";
  }

  std::vector<RatingEntry> entries;
  std::uniform_int_distribution<int> count_dist(spec.min_ratings_per_student,
                                                spec.max_ratings_per_student);
  std::normal_distribution<double> bias_dist(0.0, 1.0);
  std::normal_distribution<double> noise_dist(0.0, 0.8);
  std::normal_distribution<double> grade_noise_dist(0.0, 1.0);

  std::vector<double> course_bias(spec.courses);
  for (auto& b : course_bias) b = bias_dist(rng);

  std::vector<int> all_courses(spec.courses);
  std::iota(all_courses.begin(), all_courses.end(), 0);

  for (int s = 0; s < spec.students; ++s) {
    const double student_bias = bias_dist(rng);
    const int count = std::max(1, count_dist(rng));
    std::vector<int> picked = all_courses;
    std::shuffle(picked.begin(), picked.end(), rng);
    picked.resize(count);
    std::sort(picked.begin(), picked.end());
    for (int c : picked) {
      // Shared latent preference drives both the rating and the grade.
      const double latent = std::clamp(
          3.0 + 0.7 * student_bias + 0.7 * course_bias[c] + noise_dist(rng), 1.0, 5.0);
      RatingEntry e;
      e.student_id = students[s].student_id;
      e.course_id = courses[c].course_id;
      e.rating = static_cast<int>(std::lround(latent));
      const double grade = std::clamp(2.0 * latent + grade_noise_dist(rng), 0.0, 10.0);
      e.grade = std::round(grade * 100.0) / 100.0;
      entries.push_back(std::move(e));
    }
  }

  Universes universes{spec.professors, spec.competences, spec.branches, spec.areas};
  return Dataset(std::move(students), std::move(courses), std::move(entries), universes);
}

// ---------------------------------------------------------------------------
// Splits

namespace {

// Rated-entry indices per course index, in entry order.
std::vector<std::vector<int>> ratings_by_course(const Dataset& dataset) {
  std::vector<std::vector<int>> by_course(dataset.num_courses());
  const auto& entries = dataset.entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].rating) continue;
    by_course[*dataset.course_index(entries[i].course_id)].push_back(static_cast<int>(i));
  }
  return by_course;
}

}  // namespace

Dataset hide_ratings(const Dataset& dataset, const std::vector<int>& entry_indices) {
  std::set<int> hidden(entry_indices.begin(), entry_indices.end());
  std::vector<RatingEntry> entries;
  entries.reserve(dataset.entries().size());
  for (size_t i = 0; i < dataset.entries().size(); ++i) {
    RatingEntry e = dataset.entries()[i];
    if (hidden.contains(static_cast<int>(i))) {
      e.rating.reset();
      if (!e.grade) continue;  // nothing left to keep
    }
    entries.push_back(std::move(e));
  }
  return Dataset(dataset.students(), dataset.courses(), std::move(entries),
                 dataset.universes());
}

HoldoutSplit split_holdout(const Dataset& dataset, double test_fraction, uint64_t seed) {
  check(test_fraction > 0.0 && test_fraction < 1.0, "test_fraction must be in (0, 1)");
  const auto rated = dataset.rated_entry_indices();
  check(rated.size() >= 2, "split_holdout needs at least 2 rated entries");

  std::mt19937_64 rng(seed);
  auto by_course = ratings_by_course(dataset);

  const int target = static_cast<int>(
      std::ceil(test_fraction * static_cast<double>(rated.size())));

  // Per-course base counts, then distribute the remainder by largest
  // fractional share. Single-rating courses never give their rating away.
  struct CourseShare {
    int course = 0;
    int base = 0;
    int cap = 0;
    double remainder = 0.0;
  };
  std::vector<CourseShare> shares;
  int assigned = 0;
  for (int c = 0; c < dataset.num_courses(); ++c) {
    const int n = static_cast<int>(by_course[c].size());
    if (n == 0) continue;
    CourseShare share;
    share.course = c;
    if (n == 1) {
      share.base = 0;
      share.cap = 0;
    } else {
      const double exact = test_fraction * n;
      share.base = static_cast<int>(std::floor(exact));
      share.cap = static_cast<int>(std::ceil(exact));
      share.remainder = exact - share.base;
    }
    assigned += share.base;
    shares.push_back(share);
  }
  std::stable_sort(shares.begin(), shares.end(), [](const CourseShare& a, const CourseShare& b) {
    return a.remainder > b.remainder;
  });
  for (auto& share : shares) {
    if (assigned >= target) break;
    if (share.base < share.cap) {
      ++share.base;
      ++assigned;
    }
  }

  std::vector<int> test_indices;
  for (const auto& share : shares) {
    auto pool = by_course[share.course];
    std::shuffle(pool.begin(), pool.end(), rng);
    test_indices.insert(test_indices.end(), pool.begin(), pool.begin() + share.base);
  }
  std::sort(test_indices.begin(), test_indices.end());

  std::vector<HeldOutRating> test;
  test.reserve(test_indices.size());
  for (int i : test_indices) {
    const auto& e = dataset.entries()[i];
    test.push_back({e.student_id, e.course_id, *e.rating});
  }
  return HoldoutSplit{hide_ratings(dataset, test_indices), std::move(test)};
}

std::vector<std::vector<int>> stratified_folds(const Dataset& dataset, int k, uint64_t seed) {
  check(k >= 2, "stratified_folds needs k >= 2");
  std::mt19937_64 rng(seed);
  auto by_course = ratings_by_course(dataset);

  std::vector<std::vector<int>> folds(k);
  for (auto& pool : by_course) {
    if (pool.empty()) continue;
    std::shuffle(pool.begin(), pool.end(), rng);
    // Deal round-robin; the first (count mod k) folds take the extras.
    for (size_t i = 0; i < pool.size(); ++i)
      folds[i % static_cast<size_t>(k)].push_back(pool[i]);
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

}  // namespace courserec

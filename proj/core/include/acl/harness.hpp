#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "acl/student.hpp"
#include "acl/teacher.hpp"

namespace acl {

enum class Challenge { MostlyUnfeasible, MostlyTrivial, Forgetting, Rugged, DiverseStudents, Parkour };

std::string_view to_string(Challenge challenge);
Challenge parse_challenge(std::string_view text);  // snake_case or kebab-case names
const std::vector<Challenge>& all_challenges();

/// Everything needed to run one challenge, independent of teacher and seed.
struct ChallengeConfig {
  Challenge challenge = Challenge::MostlyUnfeasible;
  BoxSpace space{{0.0, 9.0}, {0.0, 6.0}};
  // Space the Stump test set is laid out on.
  BoxSpace eval_space{{0.0, 3.0}, {0.0, 6.0}};
  // Easy-corner anchor for the High setup; absent when the challenge has none.
  std::optional<Task> anchor;
  std::size_t episodes = 20000;
  std::size_t eval_every = 500;
  std::size_t seeds = 32;
  std::size_t shuffle_tiles = 0;  // k of the rugged shuffle, 0 = none
  bool forgetting = false;
  double feasibility_cap = 2.4;
  HyperParams student_overrides;  // keys of StudentParams, e.g. "eta"

  static ChallengeConfig make(Challenge challenge);

  // Episodes where the student is reset: ceil(0.35 E) and ceil(0.7 E).
  std::vector<std::size_t> reset_episodes() const;
  // Episodes at which the test set is evaluated (0, eval_every, ..., E).
  std::vector<std::size_t> eval_points() const;
  // Curriculum monitoring period, E / 80 (at least 1).
  std::size_t monitor_every() const;
};

/// Per-seed instantiation of a challenge: difficulty models, learner and
/// test set.
struct RunSetup {
  DifficultyModel train_model;
  DifficultyModel eval_model;
  StudentParams student;
  std::vector<Task> test_set;
  std::string variant;  // e.g. "spider/ppo" or "swimmer_type"
};

RunSetup setup_run(const ChallengeConfig& config, std::uint64_t seed);

// Evenly spaced grid of cell centres; side = round(sqrt(n)) per dimension
// for 2D spaces.
std::vector<Task> make_test_set(const BoxSpace& space, std::size_t n = 100);

// Deterministic stratified set inside the niche of a parkour embodiment.
std::vector<Task> parkour_test_set(Embodiment embodiment, std::size_t n = 100);

// Teachers whose expert-knowledge requirements are met at `level`.
std::vector<std::string> permitted_teachers(EkLevel level);

// Expert knowledge handed to `teacher`: the level's knowledge, plus the
// random initial and default target distributions SPDL always receives.
ExpertKnowledge knowledge_for(const ChallengeConfig& config, EkLevel level, std::string_view teacher,
                              std::uint64_t seed);

struct EvalRecord {
  std::size_t episode = 0;
  double pct_mastered = 0.0;
  std::optional<double> avg_train_return;  // absent at episode 0
  double capability = 0.0;
  std::string teacher;
  std::string challenge;
  std::string ek;
  std::uint64_t seed = 0;
  std::string variant;

  nlohmann::json to_json() const;
  static EvalRecord from_json(const nlohmann::json& j);
};

struct CurriculumSnapshot {
  std::size_t episode = 0;
  std::vector<Task> tasks;

  nlohmann::json to_json() const;
};

struct RunResult {
  std::vector<EvalRecord> records;
  std::vector<CurriculumSnapshot> curriculum;
};

struct RunOptions {
  HyperParams teacher_params;
  bool monitor_curriculum = true;
};

// Full teacher-student loop for one seed. Factory errors propagate.
RunResult run_experiment(const ChallengeConfig& config, std::string_view teacher, EkLevel level,
                         std::uint64_t seed, const RunOptions& options = {});

// results/<challenge>/<ek>/<teacher>/
std::filesystem::path run_directory(const std::filesystem::path& root, const ChallengeConfig& config,
                                    EkLevel level, std::string_view teacher);

// Writes seed_<k>.jsonl (and seed_<k>.curriculum.jsonl when monitored).
void write_run(const std::filesystem::path& dir, std::uint64_t seed, const RunResult& result);
std::string records_jsonl(const std::vector<EvalRecord>& records);
std::vector<EvalRecord> read_records(const std::filesystem::path& file);

struct BatchSpec {
  ChallengeConfig config;
  std::vector<std::string> teachers;
  EkLevel level = EkLevel::None;
  std::uint64_t first_seed = 0;
  std::size_t seeds = 32;
  std::size_t threads = 0;  // 0 = hardware concurrency
  RunOptions options;
};

// Teacher name -> per-seed runs (seed order).
using RunGroups = std::map<std::string, std::vector<std::vector<EvalRecord>>>;

// Runs every (teacher, seed) pair on a thread pool. Writes results under
// `out_root` when given, plus summary.csv.
RunGroups run_batch(const BatchSpec& spec, const std::optional<std::filesystem::path>& out_root);

// Loads <dir>/<teacher>/seed_*.jsonl for every teacher sub-directory.
RunGroups load_groups(const std::filesystem::path& dir);

// Final pct_mastered per seed.
std::vector<double> final_scores(const std::vector<std::vector<EvalRecord>>& runs);
// pct_mastered of every seed at evaluation index i.
std::vector<double> scores_at(const std::vector<std::vector<EvalRecord>>& runs, std::size_t index);

std::string summary_csv(const RunGroups& groups);

struct ComparisonRow {
  std::size_t episode = 0;
  std::string teacher;
  double mean = 0.0;
  double stddev = 0.0;
  double p_value = 1.0;  // vs the baseline
  bool significant = false;
};

struct Comparison {
  std::string baseline;
  std::vector<ComparisonRow> per_eval;  // ordered by episode, then teacher
  std::vector<ComparisonRow> final;     // one row per teacher, alphabetical

  std::string to_csv() const;
  std::string final_table() const;  // "teacher  mean ± std" with stars
};

// Welch test of every teacher against `baseline` at each evaluation point.
// Throws StatisticsError for fewer than two seeds or mismatched grids, and
// ConfigError when the baseline is missing.
Comparison compare_runs(const RunGroups& groups, std::string_view baseline, double alpha = 0.05);

// Welch p-value with degenerate constant samples resolved: equal means give
// 1, different means give 0.
double comparison_p_value(const std::vector<double>& a, const std::vector<double>& b);

// Episodes after `reset_episode` until pct_mastered is back at its last
// pre-reset value; nullopt when it never recovers within the run.
std::optional<std::size_t> recovery_episodes(const std::vector<EvalRecord>& run, std::size_t reset_episode);

// Mastery-vs-episode curves with standard-error bands.
std::string plot_curves_svg(const RunGroups& groups, std::string_view title);

}  // namespace acl

#include "acl/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "acl/errors.hpp"
#include "acl/stats.hpp"

namespace acl {

namespace {

// Stream tags for mix_seed.
constexpr std::uint64_t kEkStream = 1;
constexpr std::uint64_t kTeacherStream = 2;
constexpr std::uint64_t kStudentStream = 3;
constexpr std::uint64_t kShuffleStream = 4;
constexpr std::uint64_t kMonitorStream = 1000;

constexpr std::size_t kMonitorSamples = 100;

struct ChallengeName {
  Challenge challenge;
  std::string_view name;
};

constexpr std::array<ChallengeName, 6> kChallengeNames{{
    {Challenge::MostlyUnfeasible, "mostly_unfeasible"},
    {Challenge::MostlyTrivial, "mostly_trivial"},
    {Challenge::Forgetting, "forgetting"},
    {Challenge::Rugged, "rugged"},
    {Challenge::DiverseStudents, "diverse_students"},
    {Challenge::Parkour, "parkour"},
}};

void apply_student_overrides(StudentParams& p, const HyperParams& overrides) {
  std::vector<std::string> used;
  detail::take(overrides, "c0", p.initial_capability, used);
  detail::take(overrides, "eta", p.learning_rate, used);
  detail::take(overrides, "w", p.zpd_width, used);
  detail::take(overrides, "sigma_r", p.reward_noise, used);
  detail::take(overrides, "b", p.margin, used);
  detail::take(overrides, "consolidation", p.consolidation, used);
  detail::reject_unknown(overrides, used, "student");
}

double halton(std::size_t index, std::size_t base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

std::string_view to_string(Challenge challenge) {
  for (const auto& c : kChallengeNames) {
    if (c.challenge == challenge) return c.name;
  }
  return "unknown";
}

Challenge parse_challenge(std::string_view text) {
  std::string norm(text);
  std::replace(norm.begin(), norm.end(), '-', '_');
  for (const auto& c : kChallengeNames) {
    if (c.name == norm) return c.challenge;
  }
  throw ConfigError("unknown challenge '" + std::string(text) + "'");
}

const std::vector<Challenge>& all_challenges() {
  static const std::vector<Challenge> all{Challenge::MostlyUnfeasible, Challenge::MostlyTrivial,
                                          Challenge::Forgetting,       Challenge::Rugged,
                                          Challenge::DiverseStudents,  Challenge::Parkour};
  return all;
}

ChallengeConfig ChallengeConfig::make(Challenge challenge) {
  ChallengeConfig c;
  c.challenge = challenge;
  c.space = BoxSpace{{0.0, 3.0}, {0.0, 6.0}};
  c.anchor = Task{0.0, 6.0};
  switch (challenge) {
    case Challenge::MostlyUnfeasible:
      c.space = BoxSpace{{0.0, 9.0}, {0.0, 6.0}};
      break;
    case Challenge::MostlyTrivial:
      c.space = BoxSpace{{-3.0, 3.0}, {0.0, 6.0}};
      break;
    case Challenge::Forgetting:
      c.forgetting = true;
      break;
    case Challenge::Rugged:
      c.shuffle_tiles = 2;
      break;
    case Challenge::DiverseStudents:
      break;
    case Challenge::Parkour:
      c.space = parkour_space(CppnSpace::Medium);
      c.eval_space = c.space;
      c.anchor.reset();
      c.seeds = 48;
      break;
  }
  return c;
}

std::vector<std::size_t> ChallengeConfig::reset_episodes() const {
  if (!forgetting) return {};
  return {(35 * episodes + 99) / 100, (70 * episodes + 99) / 100};
}

std::vector<std::size_t> ChallengeConfig::eval_points() const {
  if (eval_every == 0) throw ConfigError("eval_every must be positive");
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e <= episodes; e += eval_every) out.push_back(e);
  return out;
}

std::size_t ChallengeConfig::monitor_every() const { return std::max<std::size_t>(1, episodes / 80); }

std::vector<Task> make_test_set(const BoxSpace& space, std::size_t n) {
  if (n == 0) throw std::invalid_argument("test set needs at least one task");
  if (space.dims() != 2) throw std::invalid_argument("grid test sets are defined for 2D spaces");
  const auto side = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n)))));
  std::vector<Task> out;
  out.reserve(side * side);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double u0 = (static_cast<double>(i) + 0.5) / static_cast<double>(side);
      const double u1 = (static_cast<double>(j) + 0.5) / static_cast<double>(side);
      out.push_back(Task{space.lower(0) + u0 * (space.upper(0) - space.lower(0)),
                         space.lower(1) + u1 * (space.upper(1) - space.lower(1))});
    }
  }
  return out;
}

std::vector<Task> parkour_test_set(Embodiment embodiment, std::size_t n) {
  const BoxSpace full = parkour_space(CppnSpace::Medium);
  Vec lo = full.lower();
  Vec hi = full.upper();
  switch (embodiment) {
    case Embodiment::SwimmerType:
      lo[5] = 0.8;
      break;
    case Embodiment::ClimberType:
      hi[5] = 0.2;
      hi[4] = 2.5;
      break;
    case Embodiment::WalkerType:
      hi[5] = 0.2;
      break;
    default:
      throw std::invalid_argument("parkour test sets exist for walker, swimmer and climber types");
  }
  static constexpr std::array<std::size_t, 6> bases{2, 3, 5, 7, 11, 13};
  std::vector<Task> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    Vec t(6);
    for (Eigen::Index d = 0; d < 6; ++d) {
      t[d] = lo[d] + halton(i, bases[static_cast<std::size_t>(d)]) * (hi[d] - lo[d]);
    }
    out.emplace_back(std::move(t));
  }
  return out;
}

RunSetup setup_run(const ChallengeConfig& config, std::uint64_t seed) {
  RunSetup s;
  s.train_model.feasibility_cap = config.feasibility_cap;
  s.student = StudentParams::sac();
  switch (config.challenge) {
    case Challenge::DiverseStudents: {
      const std::size_t combo = seed % 4;
      s.train_model.embodiment = combo < 2 ? Embodiment::ShortWalker : Embodiment::Spider;
      s.student = combo % 2 == 0 ? StudentParams::sac() : StudentParams::ppo();
      s.variant = std::string(to_string(s.train_model.embodiment)) + (combo % 2 == 0 ? "/sac" : "/ppo");
      break;
    }
    case Challenge::Parkour: {
      static constexpr std::array<Embodiment, 3> types{Embodiment::WalkerType, Embodiment::SwimmerType,
                                                        Embodiment::ClimberType};
      s.train_model.kind = DifficultyKind::ParkourNiche;
      s.train_model.embodiment = types[seed % 3];
      s.variant = std::string(to_string(s.train_model.embodiment));
      break;
    }
    default:
      break;
  }
  s.eval_model = s.train_model;
  if (config.shuffle_tiles > 0) {
    Rng rng(mix_seed(seed, kShuffleStream));
    s.train_model.kind = DifficultyKind::StumpShuffled;
    s.train_model.shuffle = build_shuffle(config.space, config.shuffle_tiles, rng);
  }
  s.student.resets = config.reset_episodes();
  apply_student_overrides(s.student, config.student_overrides);
  s.test_set = config.challenge == Challenge::Parkour ? parkour_test_set(s.train_model.embodiment)
                                                       : make_test_set(config.eval_space);
  return s;
}

std::vector<std::string> permitted_teachers(EkLevel level) {
  std::vector<std::string> out;
  for (const auto& name : teacher_names()) {
    if (name == "adr" && level == EkLevel::None) continue;
    out.push_back(name);
  }
  return out;
}

ExpertKnowledge knowledge_for(const ChallengeConfig& config, EkLevel level, std::string_view teacher,
                              std::uint64_t seed) {
  if (level == EkLevel::High && !config.anchor) {
    throw ConfigError("challenge '" + std::string(to_string(config.challenge)) +
                      "' has no expert anchor; use the low or no expert knowledge setup");
  }
  Rng rng(mix_seed(seed, kEkStream));
  ExpertKnowledge ek = ek_setup(config.space, level, level == EkLevel::High ? config.anchor : std::nullopt, rng);
  if (teacher == "spdl") {
    if (!ek.initial) ek.initial = uninformed_initial(config.space, rng);
    if (!ek.target) ek.target = default_target(config.space);
  }
  return ek;
}

nlohmann::json EvalRecord::to_json() const {
  return {{"episode", episode},
          {"pct_mastered", pct_mastered},
          {"avg_train_return", avg_train_return ? nlohmann::json(*avg_train_return) : nlohmann::json(nullptr)},
          {"capability", capability},
          {"teacher", teacher},
          {"challenge", challenge},
          {"ek", ek},
          {"seed", seed},
          {"variant", variant}};
}

EvalRecord EvalRecord::from_json(const nlohmann::json& j) {
  EvalRecord r;
  r.episode = j.at("episode").get<std::size_t>();
  r.pct_mastered = j.at("pct_mastered").get<double>();
  if (j.contains("avg_train_return") && !j.at("avg_train_return").is_null()) {
    r.avg_train_return = j.at("avg_train_return").get<double>();
  }
  r.capability = j.value("capability", 0.0);
  r.teacher = j.at("teacher").get<std::string>();
  r.challenge = j.value("challenge", "");
  r.ek = j.value("ek", "");
  r.seed = j.value("seed", std::uint64_t{0});
  r.variant = j.value("variant", "");
  return r;
}

nlohmann::json CurriculumSnapshot::to_json() const {
  nlohmann::json ts = nlohmann::json::array();
  for (const auto& t : tasks) ts.push_back(std::vector<double>(t.coords.data(), t.coords.data() + t.coords.size()));
  return {{"episode", episode}, {"tasks", ts}};
}

RunResult run_experiment(const ChallengeConfig& config, std::string_view teacher_name, EkLevel level,
                         std::uint64_t seed, const RunOptions& options) {
  if (config.eval_every == 0) throw ConfigError("eval_every must be positive");
  const RunSetup setup = setup_run(config, seed);
  const ExpertKnowledge ek = knowledge_for(config, level, teacher_name, seed);
  auto teacher = make_teacher(teacher_name, config.space, ek, options.teacher_params, mix_seed(seed, kTeacherStream));
  SyntheticStudent student(setup.student, mix_seed(seed, kStudentStream));
  StudentEnv env(student, setup.train_model);
  teacher->bind_value_estimator(env.value_estimator());

  RunResult result;
  const std::string challenge(to_string(config.challenge));
  const std::string ek_name(to_string(level));
  const std::size_t monitor_every = config.monitor_every();

  auto evaluate = [&](std::size_t episode, std::optional<double> avg) {
    std::vector<double> returns;
    returns.reserve(setup.test_set.size());
    for (const auto& t : setup.test_set) returns.push_back(student.evaluate(setup.eval_model, t));
    EvalRecord r;
    r.episode = episode;
    r.pct_mastered = pct_mastered(returns, kMasteryThreshold);
    r.avg_train_return = avg;
    r.capability = student.capability();
    r.teacher = std::string(teacher->name());
    r.challenge = challenge;
    r.ek = ek_name;
    r.seed = seed;
    r.variant = setup.variant;
    result.records.push_back(std::move(r));
  };

  evaluate(0, std::nullopt);
  double window_sum = 0.0;
  std::size_t window_count = 0;
  for (std::size_t e = 1; e <= config.episodes; ++e) {
    const EpisodeFeedback fb = teacher_cycle(*teacher, env);
    window_sum += fb.episodic_return;
    ++window_count;
    if (e % config.eval_every == 0) {
      evaluate(e, window_sum / static_cast<double>(window_count));
      window_sum = 0.0;
      window_count = 0;
    }
    if (options.monitor_curriculum && e % monitor_every == 0) {
      result.curriculum.push_back({e, teacher->non_exploratory_sample(kMonitorSamples, mix_seed(seed, kMonitorStream + e))});
    }
  }
  return result;
}

std::filesystem::path run_directory(const std::filesystem::path& root, const ChallengeConfig& config,
                                    EkLevel level, std::string_view teacher) {
  return root / std::string(to_string(config.challenge)) / std::string(to_string(level)) / std::string(teacher);
}

std::string records_jsonl(const std::vector<EvalRecord>& records) {
  std::string out;
  for (const auto& r : records) out += r.to_json().dump() + "\n";
  return out;
}

void write_run(const std::filesystem::path& dir, std::uint64_t seed, const RunResult& result) {
  std::filesystem::create_directories(dir);
  const std::string stem = "seed_" + std::to_string(seed);
  {
    std::ofstream f(dir / (stem + ".jsonl"), std::ios::binary);
    if (!f) throw ConfigError("cannot write to " + dir.string());
    f << records_jsonl(result.records);
  }
  if (!result.curriculum.empty()) {
    std::ofstream f(dir / (stem + ".curriculum.jsonl"), std::ios::binary);
    for (const auto& c : result.curriculum) f << c.to_json().dump() << "\n";
  }
}

std::vector<EvalRecord> read_records(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw ConfigError("cannot read " + file.string());
  std::vector<EvalRecord> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(EvalRecord::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed record in " + file.string() + ": " + e.what());
    }
  }
  return out;
}

RunGroups run_batch(const BatchSpec& spec, const std::optional<std::filesystem::path>& out_root) {
  struct Job {
    std::size_t teacher;
    std::size_t seed_index;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < spec.teachers.size(); ++t) {
    for (std::size_t s = 0; s < spec.seeds; ++s) jobs.push_back({t, s});
  }
  // Validate every teacher once up front so configuration errors surface
  // before any thread starts.
  for (const auto& name : spec.teachers) {
    const ExpertKnowledge ek = knowledge_for(spec.config, spec.level, name, spec.first_seed);
    (void)make_teacher(name, spec.config.space, ek, spec.options.teacher_params, 0);
  }

  std::vector<std::vector<std::vector<EvalRecord>>> results(spec.teachers.size(),
                                                            std::vector<std::vector<EvalRecord>>(spec.seeds));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        const Job& job = jobs[i];
        const std::string& name = spec.teachers[job.teacher];
        const std::uint64_t seed = spec.first_seed + job.seed_index;
        RunResult r = run_experiment(spec.config, name, spec.level, seed, spec.options);
        if (out_root) write_run(run_directory(*out_root, spec.config, spec.level, name), seed, r);
        results[job.teacher][job.seed_index] = std::move(r.records);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  RunGroups groups;
  for (std::size_t t = 0; t < spec.teachers.size(); ++t) groups[spec.teachers[t]] = std::move(results[t]);
  if (out_root) {
    const auto dir = *out_root / std::string(to_string(spec.config.challenge)) / std::string(to_string(spec.level));
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "summary.csv", std::ios::binary) << summary_csv(groups);
  }
  return groups;
}

RunGroups load_groups(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("not a results directory: " + dir.string());
  RunGroups groups;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    std::vector<std::pair<std::uint64_t, std::filesystem::path>> files;
    for (const auto& f : std::filesystem::directory_iterator(entry.path())) {
      const std::string name = f.path().filename().string();
      if (name.rfind("seed_", 0) != 0 || f.path().extension() != ".jsonl" ||
          name.find(".curriculum.") != std::string::npos) {
        continue;
      }
      files.emplace_back(std::stoull(name.substr(5)), f.path());
    }
    if (files.empty()) continue;
    std::sort(files.begin(), files.end());
    auto& runs = groups[entry.path().filename().string()];
    for (const auto& [seed, path] : files) runs.push_back(read_records(path));
  }
  if (groups.empty()) throw ConfigError("no seed_*.jsonl files under " + dir.string());
  return groups;
}

std::vector<double> scores_at(const std::vector<std::vector<EvalRecord>>& runs, std::size_t index) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& run : runs) {
    if (index >= run.size()) throw StatisticsError("run has no evaluation at index " + std::to_string(index));
    out.push_back(run[index].pct_mastered);
  }
  return out;
}

std::vector<double> final_scores(const std::vector<std::vector<EvalRecord>>& runs) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& run : runs) {
    if (run.empty()) throw StatisticsError("run without evaluations");
    out.push_back(run.back().pct_mastered);
  }
  return out;
}

std::string summary_csv(const RunGroups& groups) {
  std::ostringstream os;
  os << "teacher,seed,variant,final_episode,final_pct_mastered,final_capability\n";
  for (const auto& [teacher, runs] : groups) {
    for (const auto& run : runs) {
      if (run.empty()) continue;
      const auto& last = run.back();
      os << teacher << ',' << last.seed << ',' << last.variant << ',' << last.episode << ',' << last.pct_mastered << ','
         << last.capability << '\n';
    }
  }
  return os.str();
}

double comparison_p_value(const std::vector<double>& a, const std::vector<double>& b) {
  if (sample_variance(a) + sample_variance(b) <= 0.0) return mean(a) == mean(b) ? 1.0 : 0.0;
  return welch_t_test(a, b).p;
}

Comparison compare_runs(const RunGroups& groups, std::string_view baseline, double alpha) {
  const auto base_it = groups.find(std::string(baseline));
  if (base_it == groups.end()) throw ConfigError("baseline teacher '" + std::string(baseline) + "' has no runs");
  std::vector<std::size_t> grid;
  for (const auto& [teacher, runs] : groups) {
    if (runs.size() < 2) throw StatisticsError("teacher '" + teacher + "' needs at least two seeds");
    for (const auto& run : runs) {
      std::vector<std::size_t> episodes;
      for (const auto& r : run) episodes.push_back(r.episode);
      if (grid.empty()) grid = episodes;
      if (episodes != grid || grid.empty()) throw StatisticsError("mismatched evaluation grids");
    }
  }

  Comparison cmp;
  cmp.baseline = std::string(baseline);
  auto row = [&](std::size_t index, const std::string& teacher, const std::vector<std::vector<EvalRecord>>& runs) {
    const auto scores = scores_at(runs, index);
    ComparisonRow r;
    r.episode = grid[index];
    r.teacher = teacher;
    r.mean = mean(scores);
    r.stddev = std::sqrt(sample_variance(scores));
    r.p_value = comparison_p_value(scores, scores_at(base_it->second, index));
    r.significant = teacher != baseline && r.p_value < alpha;
    return r;
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (const auto& [teacher, runs] : groups) cmp.per_eval.push_back(row(i, teacher, runs));
  }
  for (const auto& [teacher, runs] : groups) cmp.final.push_back(row(grid.size() - 1, teacher, runs));
  return cmp;
}

std::string Comparison::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "episode,teacher,mean,std,p_value,significant\n";
  for (const auto& r : per_eval) {
    os << r.episode << ',' << r.teacher << ',' << r.mean << ',' << r.stddev << ',' << r.p_value << ','
       << (r.significant ? "*" : "") << '\n';
  }
  return os.str();
}

std::string Comparison::final_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  std::size_t width = 8;
  for (const auto& r : final) width = std::max(width, r.teacher.size());
  os << std::left << std::setw(static_cast<int>(width)) << "teacher" << "  pct mastered (vs " << baseline << ")\n";
  for (const auto& r : final) {
    os << std::left << std::setw(static_cast<int>(width)) << r.teacher << "  " << r.mean << " ± " << r.stddev
       << (r.significant ? " *" : "") << '\n';
  }
  return os.str();
}

std::optional<std::size_t> recovery_episodes(const std::vector<EvalRecord>& run, std::size_t reset_episode) {
  const EvalRecord* before = nullptr;
  for (const auto& r : run) {
    if (r.episode <= reset_episode) before = &r;
  }
  if (!before) return std::nullopt;
  for (const auto& r : run) {
    if (r.episode > reset_episode && r.pct_mastered >= before->pct_mastered) return r.episode - reset_episode;
  }
  return std::nullopt;
}

}  // namespace acl

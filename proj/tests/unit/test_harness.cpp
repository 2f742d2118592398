#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "acl/errors.hpp"
#include "acl/harness.hpp"

using namespace acl;

namespace {

ChallengeConfig short_config(Challenge c, std::size_t episodes = 1000) {
  ChallengeConfig cfg = ChallengeConfig::make(c);
  cfg.episodes = episodes;
  cfg.eval_every = 250;
  return cfg;
}

EvalRecord rec(std::size_t episode, double pct) {
  EvalRecord r;
  r.episode = episode;
  r.pct_mastered = pct;
  return r;
}

std::vector<EvalRecord> run_of(std::initializer_list<double> pcts) {
  std::vector<EvalRecord> out;
  std::size_t e = 0;
  for (double p : pcts) {
    out.push_back(rec(e, p));
    e += 500;
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("challenge configurations") {
  const auto unf = ChallengeConfig::make(Challenge::MostlyUnfeasible);
  CHECK(unf.space.upper(0) == 9.0);
  CHECK(unf.eval_space.upper(0) == 3.0);
  CHECK(ChallengeConfig::make(Challenge::MostlyTrivial).space.lower(0) == -3.0);
  const auto forget = ChallengeConfig::make(Challenge::Forgetting);
  CHECK(forget.reset_episodes() == std::vector<std::size_t>{7000, 14000});
  CHECK(forget.eval_points().size() == 41);
  CHECK(forget.monitor_every() == 250);
  CHECK(ChallengeConfig::make(Challenge::Rugged).shuffle_tiles == 2);
  const auto parkour = ChallengeConfig::make(Challenge::Parkour);
  CHECK(parkour.space.dims() == 6);
  CHECK_FALSE(parkour.anchor.has_value());
  CHECK(parse_challenge("mostly-unfeasible") == Challenge::MostlyUnfeasible);
  CHECK(parse_challenge("mostly_trivial") == Challenge::MostlyTrivial);
  CHECK_THROWS_AS(parse_challenge("impossible"), ConfigError);
}

TEST_CASE("test sets") {
  const auto grid = make_test_set(BoxSpace{{0.0, 3.0}, {0.0, 6.0}});
  REQUIRE(grid.size() == 100);
  CHECK(grid.front()[0] == doctest::Approx(0.15));
  CHECK(grid.front()[1] == doctest::Approx(0.3));
  CHECK(grid.back()[0] == doctest::Approx(2.85));
  CHECK(grid.back()[1] == doctest::Approx(5.7));
  CHECK_THROWS_AS(make_test_set(BoxSpace{{0.0, 1.0}}), std::invalid_argument);
  const BoxSpace parkour = parkour_space(CppnSpace::Medium);
  for (const auto body : {Embodiment::WalkerType, Embodiment::SwimmerType, Embodiment::ClimberType}) {
    const auto set = parkour_test_set(body);
    CHECK(set.size() == 100);
    for (const auto& t : set) CHECK(parkour.contains(t));
    CHECK(set == parkour_test_set(body));
  }
}

TEST_CASE("no expert knowledge suite runs exactly the permitted teachers") {
  const std::vector<std::string> expected{"random", "riac", "covar-gmm", "alp-gmm", "spdl"};
  CHECK(permitted_teachers(EkLevel::None) == expected);
  CHECK(permitted_teachers(EkLevel::High).size() == 6);

  BatchSpec spec;
  spec.config = short_config(Challenge::MostlyUnfeasible, 200);
  spec.config.eval_every = 100;
  spec.teachers = permitted_teachers(EkLevel::None);
  spec.seeds = 1;
  spec.threads = 1;
  spec.options.monitor_curriculum = false;
  const RunGroups groups = run_batch(spec, std::nullopt);
  std::vector<std::string> ran;
  for (const auto& [name, runs] : groups) ran.push_back(name);
  auto sorted = expected;
  std::sort(sorted.begin(), sorted.end());
  CHECK(ran == sorted);
}

TEST_CASE("missing expert knowledge is a configuration error") {
  const auto cfg = short_config(Challenge::MostlyUnfeasible, 100);
  CHECK_THROWS_AS(run_experiment(cfg, "adr", EkLevel::None, 0), ConfigError);
  CHECK_THROWS_AS(make_teacher("adr", cfg.space, {}, {}, 0), ConfigError);
  CHECK_THROWS_AS(make_teacher("spdl", cfg.space, {}, {}, 0), ConfigError);
  for (const char* name : {"goal-gan", "goalgan", "setter-solver"}) {
    CHECK_THROWS_AS(run_experiment(cfg, name, EkLevel::High, 0), ConfigError);
  }
  const auto parkour = short_config(Challenge::Parkour, 100);
  CHECK_THROWS_AS(run_experiment(parkour, "adr", EkLevel::High, 0), ConfigError);
  CHECK_THROWS_AS(run_experiment(cfg, "random", EkLevel::None, 0, {{{"alpha", 1.0}}, false}), ConfigError);
}

TEST_CASE("runs reproduce byte for byte") {
  for (const auto& [challenge, teacher, level] :
       {std::tuple{Challenge::Forgetting, "alp-gmm", EkLevel::High}, std::tuple{Challenge::Rugged, "adr", EkLevel::High},
        std::tuple{Challenge::MostlyUnfeasible, "spdl", EkLevel::None},
        std::tuple{Challenge::Parkour, "riac", EkLevel::Low}}) {
    const auto cfg = short_config(challenge);
    const auto a = run_experiment(cfg, teacher, level, 3);
    const auto b = run_experiment(cfg, teacher, level, 3);
    CHECK(records_jsonl(a.records) == records_jsonl(b.records));
    CHECK(records_jsonl(a.records) != records_jsonl(run_experiment(cfg, teacher, level, 4).records));
  }
}

TEST_CASE("records round trip through disk") {
  const auto dir = std::filesystem::temp_directory_path() / "acl_harness_test";
  std::filesystem::remove_all(dir);
  const auto cfg = short_config(Challenge::Forgetting);
  const auto run = run_experiment(cfg, "random", EkLevel::High, 1);
  CHECK(run.records.size() == 5);
  CHECK_FALSE(run.records.front().avg_train_return.has_value());
  CHECK(run.records.back().avg_train_return.has_value());
  CHECK(run.curriculum.size() == cfg.episodes / cfg.monitor_every());
  const auto target = run_directory(dir, cfg, EkLevel::High, "random");
  CHECK(target == dir / "forgetting" / "high" / "random");
  write_run(target, 1, run);
  CHECK(std::filesystem::exists(target / "seed_1.curriculum.jsonl"));
  CHECK(slurp(target / "seed_1.jsonl") == records_jsonl(run.records));
  const auto back = read_records(target / "seed_1.jsonl");
  CHECK(records_jsonl(back) == records_jsonl(run.records));
  const auto groups = load_groups(dir / "forgetting" / "high");
  REQUIRE(groups.count("random") == 1);
  CHECK(groups.at("random").size() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("comparisons") {
  RunGroups groups;
  groups["random"] = {run_of({0, 10, 20}), run_of({0, 12, 22}), run_of({0, 11, 19})};
  groups["alp-gmm"] = {run_of({0, 30, 60}), run_of({0, 31, 62}), run_of({0, 29, 61})};
  const Comparison c = compare_runs(groups, "random");
  REQUIRE(c.per_eval.size() == 6);
  CHECK(c.per_eval[0].episode == 0);
  CHECK(c.per_eval[0].teacher == "alp-gmm");
  CHECK(c.per_eval[0].p_value == 1.0);
  CHECK(c.per_eval[5].episode == 1000);
  REQUIRE(c.final.size() == 2);
  CHECK(c.final[0].teacher == "alp-gmm");
  CHECK(c.final[0].mean == doctest::Approx(61.0));
  CHECK(c.final[0].significant);
  CHECK_FALSE(c.final[1].significant);
  CHECK(c.to_csv().rfind("episode,teacher,mean,std,p_value,significant\n", 0) == 0);
  CHECK(c.final_table().find("alp-gmm") != std::string::npos);
  CHECK(final_scores(groups["random"]) == std::vector<double>{20, 22, 19});
  CHECK(scores_at(groups["random"], 1) == std::vector<double>{10, 12, 11});

  CHECK_THROWS_AS(compare_runs(groups, "spdl"), ConfigError);
  auto one_seed = groups;
  one_seed["riac"] = {run_of({0, 1, 2})};
  CHECK_THROWS_AS(compare_runs(one_seed, "random"), StatisticsError);
  auto ragged = groups;
  ragged["riac"] = {run_of({0, 1}), run_of({0, 2})};
  CHECK_THROWS_AS(compare_runs(ragged, "random"), StatisticsError);

  CHECK(comparison_p_value({5, 5, 5}, {5, 5, 5}) == 1.0);
  CHECK(comparison_p_value({5, 5, 5}, {6, 6, 6}) == 0.0);
}

TEST_CASE("recovery episodes") {
  const auto run = run_of({0, 40, 50, 10, 30, 55, 60});
  CHECK(recovery_episodes(run, 1000) == 1500);
  CHECK(recovery_episodes(run, 1200) == 1300);
  CHECK_FALSE(recovery_episodes(run_of({0, 40, 50, 10, 20}), 1000).has_value());
}

TEST_CASE("summary and plot output") {
  RunGroups groups;
  auto a = run_of({0, 10});
  auto b = run_of({0, 30});
  for (auto& r : a) r.seed = 0;
  for (auto& r : b) r.seed = 1;
  groups["random"] = {a, b};
  CHECK(summary_csv(groups) ==
        "teacher,seed,variant,final_episode,final_pct_mastered,final_capability\n"
        "random,0,,500,10,0\nrandom,1,,500,30,0\n");
  const std::string svg = plot_curves_svg(groups, "demo");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("random") != std::string::npos);
  CHECK(svg == plot_curves_svg(groups, "demo"));
}

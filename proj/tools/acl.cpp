// acl: run curriculum experiments on synthetic students, compare teachers,
// render terrains and plots.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "acl/errors.hpp"
#include "acl/harness.hpp"
#include "acl/procgen.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonRunArgs {
  std::string challenge = "mostly_unfeasible";
  std::string ek = "no";
  std::size_t episodes = 20000;
  std::size_t eval_every = 500;
  std::vector<std::string> hp;
  std::string hp_json;
  std::vector<std::string> student;
  std::string out;
  bool no_monitor = false;
};

void add_common(CLI::App* cmd, CommonRunArgs& a) {
  cmd->add_option("--challenge", a.challenge,
                  "mostly_unfeasible | mostly_trivial | forgetting | rugged | diverse_students | parkour")
      ->capture_default_str();
  cmd->add_option("--ek", a.ek, "expert knowledge: no | low | high")->capture_default_str();
  cmd->add_option("--episodes", a.episodes, "training budget in episodes")->capture_default_str();
  cmd->add_option("--eval-every", a.eval_every, "episodes between test-set evaluations")->capture_default_str();
  cmd->add_option("--hp", a.hp, "teacher hyperparameter override key=value (repeatable)");
  cmd->add_option("--hp-json", a.hp_json, "JSON file {\"teacher\": {\"key\": value}}");
  cmd->add_option("--student", a.student, "student parameter override key=value (c0, eta, w, sigma_r, b)");
  cmd->add_option("--out", a.out, "output root (default $ACL_RESULTS_DIR or results/)");
  cmd->add_flag("--no-monitor", a.no_monitor, "skip curriculum monitoring snapshots");
}

fs::path output_root(const std::string& explicit_out) {
  if (!explicit_out.empty()) return explicit_out;
  if (const char* env = std::getenv("ACL_RESULTS_DIR"); env && *env) return env;
  return "results";
}

acl::HyperParams parse_assignments(const std::vector<std::string>& items) {
  acl::HyperParams out;
  for (const auto& item : items) {
    const auto [key, value] = acl::parse_hp_assignment(item);
    out[key] = value;
  }
  return out;
}

acl::HyperParams teacher_params(const CommonRunArgs& a, const std::string& teacher) {
  acl::HyperParams params;
  if (!a.hp_json.empty()) {
    std::ifstream f(a.hp_json);
    if (!f) throw acl::ConfigError("cannot read " + a.hp_json);
    nlohmann::json table;
    try {
      table = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw acl::ConfigError("malformed hyperparameter file: " + std::string(e.what()));
    }
    params = acl::hyperparams_for(table, teacher);
  }
  for (const auto& [k, v] : parse_assignments(a.hp)) params[k] = v;
  return params;
}

acl::ChallengeConfig make_config(const CommonRunArgs& a) {
  auto config = acl::ChallengeConfig::make(acl::parse_challenge(a.challenge));
  if (a.episodes == 0) throw acl::ConfigError("--episodes must be positive");
  if (a.eval_every == 0) throw acl::ConfigError("--eval-every must be positive");
  config.episodes = a.episodes;
  config.eval_every = a.eval_every;
  config.student_overrides = parse_assignments(a.student);
  return config;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw acl::ConfigError("cannot write " + path.string());
  f << text;
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw acl::ConfigError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != expected) {
    throw acl::ConfigError(std::string(what) + " needs " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic curriculum learning teachers on synthetic students"};
  app.require_subcommand(1);

  // run
  CommonRunArgs run_args;
  std::string run_teacher = "random";
  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "run one (teacher, challenge, ek, seed) experiment");
  run->add_option("--teacher", run_teacher, "random | adr | riac | covar-gmm | alp-gmm | spdl")->capture_default_str();
  run->add_option("--seed", run_seed, "run seed")->capture_default_str();
  add_common(run, run_args);

  // batch
  CommonRunArgs batch_args;
  std::vector<std::string> batch_teachers;
  std::size_t batch_seeds = 0;
  std::uint64_t batch_first_seed = 0;
  std::size_t batch_threads = 0;
  std::string batch_baseline = "random";
  auto* batch = app.add_subcommand("batch", "run several teachers over many seeds in parallel");
  batch->add_option("--teachers", batch_teachers, "teachers to run (default: all permitted at --ek)")->delimiter(',');
  batch->add_option("--seeds", batch_seeds, "number of seeds (default: the challenge's seed count)");
  batch->add_option("--first-seed", batch_first_seed, "first seed")->capture_default_str();
  batch->add_option("--threads", batch_threads, "worker threads (0 = all cores)")->capture_default_str();
  batch->add_option("--baseline", batch_baseline, "baseline teacher for the printed table")->capture_default_str();
  add_common(batch, batch_args);

  // compare
  std::string cmp_dir;
  std::string cmp_baseline = "random";
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "Welch t-test of every teacher against a baseline");
  compare->add_option("dir", cmp_dir, "results/<challenge>/<ek> directory")->required();
  compare->add_option("--baseline", cmp_baseline, "baseline teacher")->capture_default_str();
  compare->add_option("--out", cmp_out, "per-evaluation comparison CSV");

  // testset
  std::string ts_challenge = "mostly_unfeasible";
  std::uint64_t ts_seed = 0;
  std::string ts_out;
  auto* testset = app.add_subcommand("testset", "export the test set of a challenge");
  testset->add_option("--challenge", ts_challenge, "challenge name")->capture_default_str();
  testset->add_option("--seed", ts_seed, "seed (selects the parkour embodiment)")->capture_default_str();
  testset->add_option("--out", ts_out, "output JSON (default: stdout)");

  // plot
  std::string plot_in;
  std::string plot_svg = "curves.svg";
  std::string plot_title;
  auto* plot = app.add_subcommand("plot", "mastery curves with standard-error bands");
  plot->add_option("--in", plot_in, "results/<challenge>/<ek> directory")->required();
  plot->add_option("--svg", plot_svg, "output SVG")->capture_default_str();
  plot->add_option("--title", plot_title, "plot title (default: the directory)");

  // terrain
  std::string tr_theta = "0,0,0";
  std::string tr_creepers = "0,5";
  std::string tr_space;
  double tr_tau = 0.0;
  double tr_smoothing = 10.0;
  std::string tr_stumps;
  std::uint64_t tr_seed = 0;
  std::string tr_svg;
  std::string tr_json;
  std::string tr_weights;
  auto* terrain = app.add_subcommand("terrain", "generate a Parkour terrain or a Stump Tracks course");
  terrain->add_option("--theta", tr_theta, "CPPN input theta1,theta2,theta3")->capture_default_str();
  terrain->add_option("--creepers", tr_creepers, "creeper mean height and spacing mu_c,delta_c")->capture_default_str();
  terrain->add_option("--water", tr_tau, "water level in [0, 1]")->capture_default_str();
  terrain->add_option("--space", tr_space, "check theta against the easy|medium|hard bounds");
  terrain->add_option("--smoothing", tr_smoothing, "CPPN x stride divisor delta")->capture_default_str();
  terrain->add_option("--stumps", tr_stumps, "generate a stump course instead: mean_height,spacing");
  terrain->add_option("--seed", tr_seed, "obstacle noise seed")->capture_default_str();
  terrain->add_option("--weights", tr_weights, "CPPN weights file (default: generated from seed 42)");
  terrain->add_option("--svg", tr_svg, "write an SVG rendering");
  terrain->add_option("--json", tr_json, "write the geometry as JSON (default: stdout)");

  // cppn
  std::uint64_t cppn_seed = acl::kCanonicalCppnSeed;
  std::string cppn_out = "cppn.bin";
  auto* cppn = app.add_subcommand("cppn", "write CPPN weights generated from a seed");
  cppn->add_option("--seed", cppn_seed, "weight seed")->capture_default_str();
  cppn->add_option("--out", cppn_out, "output file")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto config = make_config(run_args);
      const auto level = acl::parse_ek_level(run_args.ek);
      acl::RunOptions options{teacher_params(run_args, run_teacher), !run_args.no_monitor};
      const auto result = acl::run_experiment(config, run_teacher, level, run_seed, options);
      const auto dir = acl::run_directory(output_root(run_args.out), config, level, run_teacher);
      acl::write_run(dir, run_seed, result);
      const auto& last = result.records.back();
      std::cout << run_teacher << " seed " << run_seed << ": " << last.pct_mastered << "% mastered after "
                << last.episode << " episodes -> " << (dir / ("seed_" + std::to_string(run_seed) + ".jsonl")).string()
                << "\n";
    } else if (*batch) {
      acl::BatchSpec spec;
      spec.config = make_config(batch_args);
      spec.level = acl::parse_ek_level(batch_args.ek);
      spec.teachers = batch_teachers.empty() ? acl::permitted_teachers(spec.level) : batch_teachers;
      spec.first_seed = batch_first_seed;
      spec.seeds = batch_seeds ? batch_seeds : spec.config.seeds;
      spec.threads = batch_threads;
      spec.options.monitor_curriculum = !batch_args.no_monitor;
      if (spec.teachers.size() > 1 && !batch_args.hp.empty()) {
        throw acl::ConfigError("--hp applies to a single teacher; use --hp-json for several");
      }
      // Each teacher runs as its own batch so it gets its own override table.
      const fs::path root = output_root(batch_args.out);
      const fs::path dir = root / std::string(acl::to_string(spec.config.challenge)) /
                           std::string(acl::to_string(spec.level));
      acl::RunGroups groups;
      for (const auto& t : spec.teachers) {
        acl::BatchSpec one = spec;
        one.teachers = {t};
        one.options.teacher_params = teacher_params(batch_args, t);
        auto g = acl::run_batch(one, root);
        groups[t] = std::move(g[t]);
      }
      write_text(dir / "summary.csv", acl::summary_csv(groups));
      if (groups.count(batch_baseline) && spec.seeds >= 2) {
        std::cout << acl::compare_runs(groups, batch_baseline).final_table();
      }
      std::cout << "results in " << dir.string() << "\n";
    } else if (*compare) {
      const auto groups = acl::load_groups(cmp_dir);
      const auto cmp = acl::compare_runs(groups, cmp_baseline);
      std::cout << cmp.final_table();
      if (!cmp_out.empty()) write_text(cmp_out, cmp.to_csv());
    } else if (*testset) {
      const auto config = acl::ChallengeConfig::make(acl::parse_challenge(ts_challenge));
      const auto setup = acl::setup_run(config, ts_seed);
      nlohmann::json tasks = nlohmann::json::array();
      for (const auto& t : setup.test_set) tasks.push_back(std::vector<double>(t.coords.data(), t.coords.data() + t.coords.size()));
      const nlohmann::json doc{{"challenge", ts_challenge}, {"variant", setup.variant}, {"tasks", tasks}};
      if (ts_out.empty()) {
        std::cout << doc.dump(2) << "\n";
      } else {
        write_text(ts_out, doc.dump(2) + "\n");
      }
    } else if (*plot) {
      const auto groups = acl::load_groups(plot_in);
      write_text(plot_svg, acl::plot_curves_svg(groups, plot_title.empty() ? plot_in : plot_title));
    } else if (*terrain) {
      acl::Rng rng(tr_seed);
      nlohmann::json geometry;
      std::string svg;
      if (!tr_stumps.empty()) {
        const auto v = parse_list(tr_stumps, 2, "--stumps");
        const auto track = acl::generate_stumps(v[0], v[1], true, rng);
        geometry = track.to_json();
        svg = acl::render_svg(track);
      } else {
        acl::TerrainSpec spec;
        const auto th = parse_list(tr_theta, 3, "--theta");
        spec.theta = {th[0], th[1], th[2]};
        const auto cr = parse_list(tr_creepers, 2, "--creepers");
        spec.creeper_height = cr[0];
        spec.creeper_spacing = cr[1];
        spec.water_level = tr_tau;
        spec.smoothing = tr_smoothing;
        spec.validate(tr_space.empty() ? acl::CppnSpace::Hard : acl::parse_cppn_space(tr_space));
        const acl::CppnWeights weights =
            tr_weights.empty() ? acl::canonical_cppn() : acl::CppnWeights::load(tr_weights);
        const auto t = acl::generate_terrain(spec, weights, rng);
        geometry = t.to_json();
        svg = acl::render_svg(t);
      }
      if (!tr_svg.empty()) write_text(tr_svg, svg);
      if (!tr_json.empty()) {
        write_text(tr_json, geometry.dump() + "\n");
      } else if (tr_svg.empty()) {
        std::cout << geometry.dump() << "\n";
      }
    } else if (*cppn) {
      acl::init_cppn_weights(cppn_seed).save(cppn_out);
    }
  } catch (const acl::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const acl::StatisticsError& e) {
    std::cerr << "statistics error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

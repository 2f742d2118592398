#include <benchmark/benchmark.h>

#include "acl/gmm.hpp"
#include "acl/harness.hpp"
#include "acl/procgen.hpp"

namespace {

void BM_EmFit(benchmark::State& state) {
  acl::Rng rng(1);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const acl::Mat pts = acl::Mat::NullaryExpr(n, 5, [&] { return rng.normal(); });
  for (auto _ : state) {
    acl::Rng fit_rng(2);
    benchmark::DoNotOptimize(acl::em_fit(pts, 4, fit_rng));
  }
}
BENCHMARK(BM_EmFit)->Arg(250)->Arg(1000);

void BM_CppnForward(benchmark::State& state) {
  const auto& w = acl::canonical_cppn();
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(acl::cppn_forward(w, x, {0.1, -0.2, 0.3}));
    x += 0.1;
  }
}
BENCHMARK(BM_CppnForward);

void BM_TerrainProfile(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(acl::terrain_profile(acl::canonical_cppn(), {-0.15, 0.8, 0.1}, 10.0, acl::kTrackColumns));
  }
}
BENCHMARK(BM_TerrainProfile);

// One sample/observe cycle against a fixed return, after a warm-up.
void BM_TeacherStep(benchmark::State& state, const char* name) {
  const acl::BoxSpace space{{0.0, 3.0}, {0.0, 6.0}};
  acl::Rng ek_rng(3);
  auto ek = acl::ek_setup(space, acl::EkLevel::High, acl::Task{0.0, 6.0}, ek_rng);
  ek.target = acl::default_target(space);
  auto teacher = acl::make_teacher(name, space, ek, {}, 4);
  acl::Rng rng(5);
  std::size_t e = 0;
  auto step = [&] {
    const acl::Task t = teacher->sample();
    const double r = rng.uniform(-100.0, 300.0);
    teacher->observe({t, r, r > 230.0, e++});
  };
  for (int i = 0; i < 2000; ++i) step();
  for (auto _ : state) step();
}
BENCHMARK_CAPTURE(BM_TeacherStep, random, "random");
BENCHMARK_CAPTURE(BM_TeacherStep, adr, "adr");
BENCHMARK_CAPTURE(BM_TeacherStep, riac, "riac");
BENCHMARK_CAPTURE(BM_TeacherStep, covar_gmm, "covar-gmm");
BENCHMARK_CAPTURE(BM_TeacherStep, alp_gmm, "alp-gmm");
BENCHMARK_CAPTURE(BM_TeacherStep, spdl, "spdl");

void BM_ShortRun(benchmark::State& state, const char* teacher) {
  auto cfg = acl::ChallengeConfig::make(acl::Challenge::Forgetting);
  cfg.episodes = 2000;
  acl::RunOptions options;
  options.monitor_curriculum = false;
  for (auto _ : state) benchmark::DoNotOptimize(acl::run_experiment(cfg, teacher, acl::EkLevel::High, 0, options));
}
BENCHMARK_CAPTURE(BM_ShortRun, random, "random")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ShortRun, alp_gmm, "alp-gmm")->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

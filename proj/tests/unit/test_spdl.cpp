#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "acl/errors.hpp"
#include "acl/spdl.hpp"

using namespace acl;

namespace {

const BoxSpace kSpace{{0.0, 3.0}, {0.0, 6.0}};

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

DiagGaussian diag(Vec mean, Vec var) { return {std::move(mean), std::move(var)}; }

double kl(const DiagGaussian& p, const DiagGaussian& q) { return kl_diagonal(p.mean, p.var, q.mean, q.var); }

double kl_1d_quadrature(double mp, double vp, double mq, double vq) {
  auto logpdf = [](double x, double m, double v) {
    return -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * (x - m) * (x - m) / v;
  };
  auto f = [&](double x) {
    const double lp = logpdf(x, mp, vp);
    return std::exp(lp) * (lp - logpdf(x, mq, vq));
  };
  const double sd = std::sqrt(vp);
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, mp - 40.0 * sd, mp + 40.0 * sd, 15, 1e-14);
}

// Four corner points whose plain moments reproduce the given Gaussian.
std::vector<Task> moment_points(const DiagGaussian& g) {
  const Vec s = g.var.cwiseSqrt();
  std::vector<Task> out;
  for (double a : {-1.0, 1.0}) {
    for (double b : {-1.0, 1.0}) out.push_back(Task{g.mean[0] + a * s[0], g.mean[1] + b * s[1]});
  }
  return out;
}

SpdlTeacher make(const HyperParams& hp, const DiagGaussian& init, const DiagGaussian& target, std::uint64_t seed) {
  return SpdlTeacher(kSpace, SpdlParams::from_table(hp), init.to_dist(), target.to_dist(), seed);
}

}  // namespace

TEST_CASE("parameter table") {
  const auto p = SpdlParams::from_table({{"offset", 10.0}, {"step", 5.0}, {"k_alpha", 2.0}, {"zeta", 0.1}});
  CHECK(p.offset == 10);
  CHECK(p.step == 5);
  CHECK(p.k_alpha == 2);
  CHECK(p.zeta == 0.1);
  CHECK_FALSE(p.fixed_alpha.has_value());
  CHECK(std::isinf(*SpdlParams::from_table({{"alpha", std::numeric_limits<double>::infinity()}}).fixed_alpha));
  CHECK_THROWS_AS(SpdlParams::from_table({{"alpha", -1.0}}), ConfigError);
  CHECK_THROWS_AS(SpdlParams::from_table({{"step", 0.0}}), ConfigError);
  CHECK_THROWS_AS(SpdlParams::from_table({{"epsilon", -0.1}}), ConfigError);
}

TEST_CASE("diagonal kl matches quadrature on marginals") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const DiagGaussian p = diag(v2(rng.uniform(-2, 2), rng.uniform(-2, 2)), v2(rng.uniform(0.1, 3), rng.uniform(0.1, 3)));
    const DiagGaussian q = diag(v2(rng.uniform(-2, 2), rng.uniform(-2, 2)), v2(rng.uniform(0.1, 3), rng.uniform(0.1, 3)));
    double numeric = 0.0;
    for (Eigen::Index d = 0; d < 2; ++d) numeric += kl_1d_quadrature(p.mean[d], p.var[d], q.mean[d], q.var[d]);
    CHECK(kl(p, q) == doctest::Approx(numeric).epsilon(1e-9));
    CHECK(kl_divergence(p.to_dist(), q.to_dist()) == doctest::Approx(kl(p, q)).epsilon(1e-12));
  }
}

TEST_CASE("point mass always yields its mean") {
  auto t = make({}, diag(v2(1.0, 4.0), v2(0.0, 0.0)), diag(v2(1.5, 3.0), v2(1.0, 1.0)), 2);
  for (int i = 0; i < 50; ++i) {
    const Task s = t.sample();
    CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(s[1] == doctest::Approx(4.0).epsilon(1e-3));
  }
}

TEST_CASE("sample mean within three standard errors") {
  const DiagGaussian g = diag(v2(1.5, 3.0), v2(0.04, 0.09));
  auto t = make({}, g, g, 3);
  const int n = 100000;
  Vec sum = Vec::Zero(2);
  for (int i = 0; i < n; ++i) {
    const Task s = t.sample();
    CHECK(kSpace.contains(s));
    sum += s.coords;
  }
  const Vec m = sum / n;
  CHECK(std::abs(m[0] - 1.5) < 3.0 * 0.2 / std::sqrt(n));
  CHECK(std::abs(m[1] - 3.0) < 3.0 * 0.3 / std::sqrt(n));
}

TEST_CASE("clipped samples stay in the space") {
  auto t = make({}, diag(v2(0.0, 6.0), v2(4.0, 4.0)), diag(v2(1.5, 3.0), v2(1.0, 1.0)), 4);
  for (int i = 0; i < 2000; ++i) CHECK(kSpace.contains(t.sample()));
}

TEST_CASE("equal values give the plain moment fit") {
  Rng rng(5);
  std::vector<Vec> tasks;
  std::vector<double> values;
  for (int i = 0; i < 64; ++i) {
    tasks.push_back(v2(rng.uniform(0, 3), rng.uniform(0, 6)));
    values.push_back(120.0);
  }
  const DiagGaussian fit = tilted_moment_fit(tasks, values);
  Vec mean = Vec::Zero(2);
  for (const auto& x : tasks) mean += x;
  mean /= 64.0;
  Vec var = Vec::Zero(2);
  for (const auto& x : tasks) var += (x - mean).cwiseAbs2();
  var /= 64.0;
  CHECK((fit.mean - mean).norm() < 1e-12);
  CHECK((fit.var - var).norm() < 1e-12);
}

TEST_CASE("tilting keeps half the effective sample size and favours high values") {
  Rng rng(6);
  std::vector<Vec> tasks;
  std::vector<double> values;
  for (int i = 0; i < 100; ++i) {
    tasks.push_back(v2(rng.uniform(0, 3), rng.uniform(0, 6)));
    values.push_back(100.0 * tasks.back()[0]);
  }
  const DiagGaussian fit = tilted_moment_fit(tasks, values);
  CHECK(fit.mean[0] > 1.7);
  CHECK_THROWS_AS(tilted_moment_fit({}, {}), std::invalid_argument);
}

TEST_CASE("infinite alpha jumps to the target") {
  const DiagGaussian target = diag(v2(1.5, 3.0), v2(0.5625, 2.25));
  auto t = make({{"alpha", std::numeric_limits<double>::infinity()}, {"epsilon", 1e9}},
                diag(v2(0.0, 6.0), v2(0.09, 0.36)), target, 7);
  t.push_pending(Task{0.1, 5.9}, 200.0);
  t.update();
  CHECK(t.current().mean == target.mean);
  CHECK(t.current().var == target.var);
}

TEST_CASE("zero epsilon never moves") {
  const DiagGaussian init = diag(v2(0.5, 5.0), v2(0.09, 0.36));
  auto t = make({{"epsilon", 0.0}}, init, diag(v2(1.5, 3.0), v2(0.5625, 2.25)), 8);
  Rng rng(9);
  for (int u = 0; u < 5; ++u) {
    for (int i = 0; i < 20; ++i) t.push_pending(Task{rng.uniform(0, 3), rng.uniform(0, 6)}, rng.uniform(0, 300));
    t.update();
  }
  CHECK(t.current().mean == init.mean);
  CHECK(t.current().var == init.var);
}

TEST_CASE("empty pending skips the update") {
  auto t = make({}, diag(v2(0.5, 5.0), v2(0.09, 0.36)), diag(v2(1.5, 3.0), v2(0.5625, 2.25)), 10);
  t.update();
  CHECK(t.update_count() == 0);
}

TEST_CASE("update schedule follows offset and step") {
  auto t = make({{"offset", 20.0}, {"step", 10.0}}, diag(v2(0.5, 5.0), v2(0.09, 0.36)),
                diag(v2(1.5, 3.0), v2(0.5625, 2.25)), 11);
  for (int e = 1; e <= 55; ++e) {
    t.observe({t.sample(), 100.0, false, static_cast<std::size_t>(e - 1)});
    const std::size_t expected = e < 20 ? 0 : 1 + static_cast<std::size_t>((e - 20) / 10);
    CHECK(t.update_count() == expected);
  }
  CHECK(t.pending_count() == 5);
}

TEST_CASE("k_alpha holds alpha at zero") {
  auto t = make({{"k_alpha", 2.0}}, diag(v2(0.5, 5.0), v2(0.09, 0.36)), diag(v2(1.5, 3.0), v2(0.5625, 2.25)), 12);
  for (int u = 0; u < 4; ++u) {
    for (const Task& x : moment_points(t.current())) t.push_pending(x, 150.0);
    t.update();
  }
  CHECK(t.history()[0].alpha == 0.0);
  CHECK(t.history()[1].alpha == 0.0);
  CHECK(t.history()[2].alpha > 0.0);
}

TEST_CASE("value estimator overrides observed returns") {
  auto t = make({}, diag(v2(0.5, 5.0), v2(0.09, 0.36)), diag(v2(1.5, 3.0), v2(0.5625, 2.25)), 13);
  t.bind_value_estimator([](const Task&) { return 42.0; });
  t.push_pending(Task{0.5, 5.0}, -100.0);
  t.update();
  CHECK(t.history().back().mean_value == 42.0);
}

TEST_CASE("trust region holds on randomized updates") {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    const double eps = rng.uniform(0.01, 2.0);
    const DiagGaussian init = diag(v2(rng.uniform(0, 3), rng.uniform(0, 6)), v2(rng.uniform(0.01, 1), rng.uniform(0.01, 4)));
    const DiagGaussian target = diag(v2(rng.uniform(0, 3), rng.uniform(0, 6)), v2(rng.uniform(0.01, 1), rng.uniform(0.01, 4)));
    auto t = make({{"epsilon", eps}, {"zeta", rng.uniform(0.0, 1.0)}}, init, target, rng.next_u64());
    const int n = 2 + static_cast<int>(rng.index(60));
    for (int k = 0; k < n; ++k) t.push_pending(Task{rng.uniform(0, 3), rng.uniform(0, 6)}, rng.uniform(-100, 300));
    const DiagGaussian old = t.current();
    t.update();
    CHECK(kl(t.current(), old) <= eps + 1e-6);
    CHECK(t.current().var.minCoeff() >= 1e-8);
  }
}

TEST_CASE("constant values move monotonically toward the target") {
  const DiagGaussian target = diag(v2(1.5, 3.0), v2(0.5625, 2.25));
  auto t = make({{"zeta", 0.5}}, diag(v2(0.2, 5.5), v2(0.01, 0.04)), target, 15);
  double prev = kl(t.current(), target);
  for (int u = 0; u < 40; ++u) {
    for (const Task& x : moment_points(t.current())) t.push_pending(x, 150.0);
    t.update();
    const double now = kl(t.current(), target);
    CHECK(now <= prev + 1e-12);
    prev = now;
  }
  CHECK(prev < 0.1 * kl(diag(v2(0.2, 5.5), v2(0.01, 0.04)), target));
}

#include <doctest.h>

#include <cmath>

#include "acl/errors.hpp"
#include "acl/rng.hpp"
#include "acl/stats.hpp"
#include "welch_oracle.hpp"

using namespace acl;

namespace {

std::vector<double> normal_sample(Rng& rng, std::size_t n, double mean, double sd) {
  std::vector<double> out(n);
  for (auto& x : out) x = rng.normal(mean, sd);
  return out;
}

}  // namespace

TEST_CASE("incomplete beta matches the high precision oracle") {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform(0.1, 40.0);
    const double b = rng.uniform(0.1, 40.0);
    const double x = rng.uniform();
    CHECK(std::abs(regularized_incomplete_beta(a, b, x) - oracle::ibeta(a, b, x)) <= 1e-10);
  }
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("welch test matches the high precision oracle on random pairs") {
  Rng rng(2);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto a = normal_sample(rng, 2 + rng.index(40), rng.uniform(0, 100), rng.uniform(0.5, 30));
    const auto b = normal_sample(rng, 2 + rng.index(40), rng.uniform(0, 100), rng.uniform(0.5, 30));
    const WelchResult got = welch_t_test(a, b);
    const oracle::Welch want = oracle::welch(a, b);
    CHECK(got.t == doctest::Approx(want.t).epsilon(1e-10));
    CHECK(got.df == doctest::Approx(want.df).epsilon(1e-10));
    worst = std::max(worst, std::abs(got.p - want.p));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("shifted integer fixture") {
  const WelchResult r = welch_t_test({1, 2, 3, 4, 5}, {2, 3, 4, 5, 6});
  CHECK(r.t == -1.0);
  CHECK(r.df == 8.0);
  CHECK(r.p == doctest::Approx(0.34659350708733416).epsilon(1e-10));
}

TEST_CASE("disjoint samples give a tiny p") {
  std::vector<double> a;
  std::vector<double> b;
  for (int i = 0; i < 32; ++i) {
    a.push_back(10.0 + 0.1 * i);
    b.push_back(90.0 + 0.1 * i);
  }
  CHECK(welch_t_test(a, b).p < 1e-10);
}

TEST_CASE("degenerate samples raise") {
  CHECK_THROWS_AS(welch_t_test({1.0}, {1.0, 2.0}), StatisticsError);
  CHECK_THROWS_AS(welch_t_test({3.0, 3.0}, {4.0, 4.0}), StatisticsError);
  CHECK_NOTHROW(welch_t_test({3.0, 3.0}, {4.0, 5.0}));
}

TEST_CASE("descriptive statistics") {
  CHECK(pct_mastered({100.0, 230.0, 231.0, 300.0}) == 50.0);
  CHECK(pct_mastered({10.0}, 5.0) == 100.0);
  CHECK_THROWS_AS(pct_mastered({}), StatisticsError);
  CHECK(mean({1, 2, 3, 4}) == 2.5);
  CHECK(sample_variance({1, 2, 3, 4}) == doctest::Approx(5.0 / 3.0));
  CHECK(sample_variance({7}) == 0.0);
  CHECK(standard_error({1, 2, 3, 4}) == doctest::Approx(std::sqrt(5.0 / 12.0)));
}

TEST_CASE("t tail") {
  CHECK(student_t_two_sided(0.0, 5.0) == doctest::Approx(1.0));
  CHECK(student_t_two_sided(2.0, 1e6) == doctest::Approx(0.04550026).epsilon(1e-5));
  CHECK(student_t_two_sided(-3.0, 4.0) == doctest::Approx(student_t_two_sided(3.0, 4.0)));
}

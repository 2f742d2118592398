#include <doctest.h>

#include "acl/adr.hpp"
#include "acl/errors.hpp"
#include "adr_oracle.hpp"

using namespace acl;

namespace {

const BoxSpace kSpace{{0.0, 3.0}, {0.0, 6.0}};

EpisodeFeedback feedback(const Task& t, double r) { return {t, r, r > 230.0, 0}; }

oracle::AdrBoundaries oracle_for(const AdrParams& p, std::vector<double> anchor) {
  return {{0.0, 0.0}, {3.0, 6.0}, std::move(anchor), p.low_threshold, p.high_threshold, p.step, p.buffer_size};
}

// Steps teacher and oracle through a scripted return sequence and checks the
// boundaries after every episode.
void run_script(AdrTeacher& t, oracle::AdrBoundaries& o, const std::vector<double>& script) {
  for (double r : script) {
    t.sample();
    const auto probe = t.pending_probe();
    t.observe(feedback(Task{0.0, 0.0}, r));
    if (probe) o.feed(probe->dim, probe->side == BoundarySide::High, r);
    for (std::size_t d = 0; d < 2; ++d) {
      const auto i = static_cast<Eigen::Index>(d);
      REQUIRE(t.phi_low()[i] == o.phi_low[d]);
      REQUIRE(t.phi_high()[i] == o.phi_high[d]);
    }
  }
}

}  // namespace

TEST_CASE("parameter table") {
  const auto p = AdrParams::from_table({{"t_L", -10.0}, {"t_H", 200.0}, {"p_b", 0.5}, {"m", 4.0}, {"delta", 0.2}});
  CHECK(p.low_threshold == -10.0);
  CHECK(p.high_threshold == 200.0);
  CHECK(p.boundary_prob == 0.5);
  CHECK(p.buffer_size == 4);
  CHECK(p.step == 0.2);
  CHECK_THROWS_AS(AdrParams::from_table({{"p_b", 1.2}}), ConfigError);
  CHECK_THROWS_AS(AdrParams::from_table({{"m", 0.0}}), ConfigError);
  CHECK_THROWS_AS(AdrParams::from_table({{"t_H", -5.0}}), ConfigError);
}

TEST_CASE("fresh teacher samples the anchor") {
  AdrTeacher t(kSpace, {}, Task{0.0, 6.0}, 1);
  for (int i = 0; i < 100; ++i) CHECK(t.sample() == Task{0.0, 6.0});
}

TEST_CASE("p_b controls probing") {
  AdrTeacher box(kSpace, AdrParams::from_table({{"p_b", 1.0}}), Task{1.0, 3.0}, 2);
  const_cast<Vec&>(box.phi_low()) << 0.5, 1.0;
  const_cast<Vec&>(box.phi_high()) << 2.5, 5.0;
  for (int i = 0; i < 1000; ++i) {
    const Task s = box.sample();
    REQUIRE(box.pending_probe());
    int pinned = 0;
    for (Eigen::Index d = 0; d < 2; ++d) pinned += s.coords[d] == box.phi_low()[d] || s.coords[d] == box.phi_high()[d];
    CHECK(pinned == 1);
  }
  AdrTeacher none(kSpace, AdrParams::from_table({{"p_b", 0.0}}), Task{1.0, 3.0}, 3);
  for (int i = 0; i < 1000; ++i) {
    none.sample();
    CHECK_FALSE(none.pending_probe());
  }
}

TEST_CASE("probe frequency matches p_b") {
  AdrTeacher t(kSpace, {}, Task{1.0, 3.0}, 4);
  int probes = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    t.sample();
    probes += t.pending_probe().has_value();
    t.observe(feedback(Task{1.0, 3.0}, 100.0));
  }
  CHECK(std::abs(probes / static_cast<double>(n) - 0.7) <= 0.02);
}

TEST_CASE("upper boundary rules") {
  const AdrParams p{};
  SUBCASE("mean above t_H expands") {
    AdrTeacher t(kSpace, AdrParams::from_table({{"p_b", 1.0}}), Task{1.0, 3.0}, 5);
    std::size_t fed = 0;
    while (fed < p.buffer_size) {
      t.sample();
      const auto probe = *t.pending_probe();
      const bool target = probe.dim == 0 && probe.side == BoundarySide::High;
      t.observe(feedback(Task{1.0, 3.0}, target ? 250.0 : 100.0));
      fed += target;
    }
    CHECK(t.phi_high()[0] == doctest::Approx(1.1));
  }
  SUBCASE("mean below t_L shrinks") {
    AdrTeacher t(kSpace, AdrParams::from_table({{"p_b", 1.0}}), Task{1.0, 3.0}, 6);
    const_cast<Vec&>(t.phi_high()) << 2.0, 3.0;
    std::size_t fed = 0;
    while (fed < p.buffer_size) {
      t.sample();
      const auto probe = *t.pending_probe();
      const bool target = probe.dim == 0 && probe.side == BoundarySide::High;
      t.observe(feedback(Task{1.0, 3.0}, target ? -50.0 : 100.0));
      fed += target;
    }
    CHECK(t.phi_high()[0] == doctest::Approx(1.9));
  }
}

TEST_CASE("expansion stops at the space bounds") {
  AdrTeacher t(kSpace, AdrParams::from_table({{"p_b", 1.0}, {"m", 1.0}}), Task{0.0, 6.0}, 7);
  for (int i = 0; i < 2000; ++i) {
    t.sample();
    t.observe(feedback(Task{0.0, 6.0}, 300.0));
  }
  CHECK(t.phi_low()[0] == 0.0);
  CHECK(t.phi_low()[1] == 0.0);
  CHECK(t.phi_high()[0] == 3.0);
  CHECK(t.phi_high()[1] == 6.0);
  bool clamped = false;
  for (const auto& e : t.events()) clamped |= e.clamped;
  CHECK(clamped);
}

TEST_CASE("scripted sequence matches the hand-stepped oracle") {
  const AdrParams p = AdrParams::from_table({{"m", 2.0}, {"p_b", 0.9}});
  AdrTeacher t(kSpace, p, Task{1.5, 3.0}, 8);
  auto o = oracle_for(p, {1.5, 3.0});
  std::vector<double> script;
  for (int i = 0; i < 50; ++i) script.push_back(i % 7 == 3 ? -60.0 : (i % 3 == 0 ? 250.0 : 90.0 + i));
  run_script(t, o, script);
  CHECK(!t.events().empty());
}

TEST_CASE("all-high returns expand monotonically and all-low returns contract") {
  const AdrParams p = AdrParams::from_table({{"m", 3.0}});
  AdrTeacher grow(kSpace, p, Task{1.5, 3.0}, 9);
  Vec lo = grow.phi_low();
  Vec hi = grow.phi_high();
  for (int i = 0; i < 3000; ++i) {
    grow.sample();
    grow.observe(feedback(Task{1.5, 3.0}, 300.0));
    CHECK((grow.phi_low().array() <= lo.array()).all());
    CHECK((grow.phi_high().array() >= hi.array()).all());
    lo = grow.phi_low();
    hi = grow.phi_high();
  }
  CHECK(grow.phi_low() == kSpace.lower());
  CHECK(grow.phi_high() == kSpace.upper());

  AdrTeacher shrink(kSpace, p, Task{1.5, 3.0}, 10);
  const_cast<Vec&>(shrink.phi_low()) = kSpace.lower();
  const_cast<Vec&>(shrink.phi_high()) = kSpace.upper();
  auto o = oracle_for(p, {0.0, 0.0});
  o.phi_high = {3.0, 6.0};
  Vec width = shrink.phi_high() - shrink.phi_low();
  for (int i = 0; i < 3000; ++i) {
    shrink.sample();
    const auto probe = shrink.pending_probe();
    shrink.observe(feedback(Task{1.5, 3.0}, -80.0));
    if (probe) o.feed(probe->dim, probe->side == BoundarySide::High, -80.0);
    const Vec w = shrink.phi_high() - shrink.phi_low();
    CHECK((w.array() <= width.array()).all());
    CHECK((w.array() >= 0.0).all());
    width = w;
  }
  CHECK(width.maxCoeff() < 0.1 + 1e-9);
  CHECK(shrink.phi_low()[0] == o.phi_low[0]);
  CHECK(shrink.phi_high()[1] == o.phi_high[1]);
}

TEST_CASE("middle band leaves boundaries unchanged") {
  AdrTeacher t(kSpace, AdrParams::from_table({{"p_b", 1.0}, {"m", 1.0}}), Task{1.5, 3.0}, 11);
  for (int i = 0; i < 200; ++i) {
    t.sample();
    const auto probe = *t.pending_probe();
    t.observe(feedback(Task{1.5, 3.0}, probe.side == BoundarySide::High ? 100.0 : 0.0));
  }
  CHECK(t.phi_low() == t.phi_high());
  CHECK(t.phi_low()[0] == 1.5);
}

TEST_CASE("non-exploratory samples stay inside the box without probing") {
  AdrTeacher t(kSpace, {}, Task{1.0, 3.0}, 12);
  const_cast<Vec&>(t.phi_low()) << 0.5, 2.0;
  const_cast<Vec&>(t.phi_high()) << 1.5, 4.0;
  const auto before = t.snapshot().dump();
  for (const Task& s : t.non_exploratory_sample(500, 13)) {
    CHECK(s[0] >= 0.5);
    CHECK(s[0] <= 1.5);
    CHECK(s[1] >= 2.0);
    CHECK(s[1] <= 4.0);
  }
  CHECK(t.snapshot().dump() == before);
  CHECK_FALSE(t.pending_probe());
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "aaw/examples.hpp"
#include "aaw/model.hpp"

using namespace aaw;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_SUITE_BEGIN("model");

TEST_CASE("switch value follows the wait/act pattern") {
  const SwitchingSchedule base{1, 1, 1};
  CHECK(switch_value(base, 0.5, 1.0) == 0);
  CHECK(switch_value(base, 1.5, 1.0) == 1);
  CHECK(switch_value(base, 0.0, 1.0) == 0);

  const SwitchingSchedule ghat{1, 2, 1};
  CHECK(switch_value(ghat, 2.5, 1.0) == 1);
  CHECK(switch_value(ghat, 0.0, 1.0) == 0);
  CHECK(switch_value(ghat, 3.0, 1.0) == 0);  // next cycle starts waiting

  // right-continuity at the jump
  CHECK(switch_value(base, 1.0, 1.0) == 1);
  CHECK(switch_value(base, 2.0, 1.0) == 0);
}

TEST_CASE("switch value rejects bad arguments") {
  const SwitchingSchedule base{1, 1, 1};
  CHECK_THROWS_AS(switch_value(base, -0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(switch_value(base, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(switch_value(base, 1.0, -2.0), std::domain_error);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(validate(SwitchingSchedule{0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SwitchingSchedule{1, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SwitchingSchedule{1, 1, 0}), std::invalid_argument);
  // delay longer than the wait span breaks the cycle structure
  CHECK_THROWS_AS(validate(SwitchingSchedule{1, 2, 2}), std::invalid_argument);
  CHECK_NOTHROW(validate(SwitchingSchedule{2, 2, 2}));
}

TEST_CASE("switch value is constant on whole periods and has duty a/(w+a)") {
  const double T = 0.7;
  for (const auto& s : {SwitchingSchedule{1, 1, 1}, SwitchingSchedule{1, 2, 1},
                        SwitchingSchedule{2, 2, 2}, SwitchingSchedule{3, 1, 2}}) {
    int on_count = 0;
    for (int j = 0; j < 3 * s.cycle_periods(); ++j) {
      const int at_start = switch_value(s, j * T, T);
      for (double frac : {0.1, 0.5, 0.93}) {
        CHECK(switch_value(s, (j + frac) * T, T) == at_start);
      }
      if (j < s.cycle_periods()) on_count += at_start;
    }
    CHECK(on_count == s.act_periods);
  }
}

TEST_CASE("control input vanishes while waiting and on matched samples") {
  Matrix gain(1, 2);
  gain << 4.5, 0.6;
  const FeedbackLaw law{gain, SwitchingSchedule{1, 1, 1}};
  Vector x(2), z(2);
  x << 2.0, -1.0;
  z << 0.5, 0.5;

  CHECK(control_input(law, 1.0, 0.25, x, z).norm() == 0.0);  // wait block
  CHECK(control_input(law, 1.0, 1.25, x, x).norm() == 0.0);  // x == delayed
  CHECK(control_input(law, 1.0, 1.25, x, z).norm() > 0.0);
}

TEST_CASE("feedback law is zero along the periodic solution") {
  const auto& entry = get_example("ex41");
  for (double t : {1.0, 1.3, 1.75}) {
    const Vector x = entry.orbit.x_star(t);
    const Vector z = entry.orbit.x_star(t - 1.0);
    CHECK(control_input(entry.law, 1.0, t, x, z).norm() <= 1e-12);
  }
}

TEST_CASE("built-in coefficients are periodic and finite") {
  const auto& entry = get_example("ex41");
  const auto& sys = std::get<LinearPeriodicSystem>(entry.system);
  CHECK(max_coefficient_period_residual(sys) <= 1e-12);
  for (int i = 0; i < 50; ++i) {
    const double t = 2.0 * i / 50.0;
    CHECK(sys.A_of(t).allFinite());
    CHECK(sys.B_of(t).allFinite());
  }
}

TEST_CASE("stored periodic solutions satisfy their defining identities") {
  const auto& ex41 = get_example("ex41");
  CHECK(max_orbit_period_residual(ex41.orbit) <= 1e-10);
  CHECK((ex41.orbit.x_star_dot(1.0) - ex41.orbit.x_star_dot(0.0)).norm() <=
        1e-8);

  // ex41's orbit solves the uncontrolled linear dynamics
  const auto& sys = std::get<LinearPeriodicSystem>(ex41.system);
  for (int i = 0; i < 16; ++i) {
    const double t = i / 16.0;
    CHECK((sys.A_of(t) * ex41.orbit.x_star(t) - ex41.orbit.x_star_dot(t))
              .norm() <= 1e-8);
  }

  const auto& ex42 = get_example("ex42");
  const auto& nl = std::get<NonlinearAutonomousSystem>(ex42.system);
  CHECK(max_orbit_period_residual(nl.periodic_solution) <= 1e-10);
  CHECK(max_orbit_residual(nl) <= 1e-8);
}

TEST_CASE("analytic Jacobian matches finite differences at random states") {
  const auto& nl =
      std::get<NonlinearAutonomousSystem>(get_example("ex42").system);
  std::vector<Vector> probes;
  std::mt19937_64 rng(7u);
  for (int i = 0; i < 12; ++i) {
    Vector x(2);
    x << 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0,
        2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
    probes.push_back(x);
  }
  CHECK(max_jacobian_gap(nl, probes) <= 1e-5);
}

TEST_CASE("finite-difference derivative of a stored path") {
  auto sol = with_fd_derivative(1.0, [](double t) -> Vector {
    Vector v(2);
    v << std::cos(kTwoPi * t), std::sin(kTwoPi * t);
    return v;
  });
  for (double t : {0.0, 0.3, 0.81}) {
    Vector expected(2);
    expected << -kTwoPi * std::sin(kTwoPi * t), kTwoPi * std::cos(kTwoPi * t);
    CHECK((sol.x_star_dot(t) - expected).norm() <= 1e-8);
  }
}

TEST_SUITE_END();

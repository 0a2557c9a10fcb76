#include "aaw/model.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace aaw {

void validate(const SwitchingSchedule& schedule) {
  if (schedule.wait_periods < 1 || schedule.act_periods < 1 ||
      schedule.delay_periods < 1) {
    throw std::invalid_argument(
        "schedule: wait, act and delay spans must be positive period counts");
  }
  if (schedule.delay_periods > schedule.wait_periods) {
    throw std::invalid_argument(
        "schedule: delay must not exceed the wait span (delayed samples must "
        "stay within the current cycle)");
  }
}

int switch_value(const SwitchingSchedule& schedule, double t, double T) {
  validate(schedule);
  if (!(t >= 0.0)) throw std::domain_error("switch_value: negative time");
  if (!(T > 0.0)) throw std::domain_error("switch_value: nonpositive period");
  const double q = t / T;
  auto block = static_cast<long long>(std::floor(q));
  // snap to the boundary when rounding in t/T lands an ulp short of it, so
  // times built as multiples of T classify right-continuously
  if (q - static_cast<double>(block) > 1.0 - 1e-9 * std::max(1.0, q)) ++block;
  const long long r = block % schedule.cycle_periods();
  return r < schedule.wait_periods ? 0 : 1;
}

Vector control_input(const FeedbackLaw& law, double T, double t,
                     const Vector& x, const Vector& x_delayed) {
  if (switch_value(law.schedule, t, T) == 0)
    return Vector::Zero(law.gain.rows());
  return -law.gain * (x - x_delayed);
}

Matrix fd_jacobian(const VectorFieldFn& f, const Vector& x) {
  const auto n = x.size();
  const double h = 1e-6 * (1.0 + x.norm());
  Matrix jac(n, n);
  Vector xp = x, xm = x;
  for (Eigen::Index k = 0; k < n; ++k) {
    xp(k) = x(k) + h;
    xm(k) = x(k) - h;
    jac.col(k) = (f(xp) - f(xm)) / (2.0 * h);
    xp(k) = x(k);
    xm(k) = x(k);
  }
  return jac;
}

PeriodicSolution with_fd_derivative(double period, PathFn x_star,
                                    int steps_per_period) {
  if (!(period > 0.0))
    throw std::invalid_argument("periodic solution: period must be positive");
  if (steps_per_period < 1)
    throw std::invalid_argument("periodic solution: steps must be positive");
  const double h = period / steps_per_period;
  PathFn dot = [x_star, h](double t) -> Vector {
    // 4th-order central difference
    return (-x_star(t + 2 * h) + 8.0 * x_star(t + h) - 8.0 * x_star(t - h) +
            x_star(t - 2 * h)) /
           (12.0 * h);
  };
  return PeriodicSolution{period, std::move(x_star), std::move(dot)};
}

double max_coefficient_period_residual(const LinearPeriodicSystem& sys,
                                       int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = sys.period * i / samples;
    worst = std::max(worst, (sys.A_of(t + sys.period) - sys.A_of(t))
                                .cwiseAbs()
                                .maxCoeff());
    worst = std::max(worst, (sys.B_of(t + sys.period) - sys.B_of(t))
                                .cwiseAbs()
                                .maxCoeff());
  }
  return worst;
}

double max_orbit_period_residual(const PeriodicSolution& sol, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = sol.period * i / samples;
    worst = std::max(
        worst, (sol.x_star(t + sol.period) - sol.x_star(t)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double max_orbit_residual(const NonlinearAutonomousSystem& sys, int samples) {
  const auto& sol = sys.periodic_solution;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = sol.period * i / samples;
    worst = std::max(worst,
                     (sol.x_star_dot(t) - sys.f(sol.x_star(t))).norm());
  }
  return worst;
}

double max_jacobian_gap(const NonlinearAutonomousSystem& sys,
                        const std::vector<Vector>& states) {
  if (!sys.jacobian) return 0.0;
  double worst = 0.0;
  for (const auto& x : states) {
    const Matrix analytic = (*sys.jacobian)(x);
    const Matrix numeric = fd_jacobian(sys.f, x);
    worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff() /
                                (1.0 + analytic.cwiseAbs().maxCoeff()));
  }
  return worst;
}

}  // namespace aaw

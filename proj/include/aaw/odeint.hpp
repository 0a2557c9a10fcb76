#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "aaw/model.hpp"
#include "aaw/types.hpp"

namespace aaw {

/// Fixed-step integration setup. The grid step is period / steps_per_period,
/// so every whole period lands exactly on a grid node and switching instants
/// never fall inside a step. The step count must be even so that the same
/// grid also carries composite Simpson quadrature.
struct IntegratorConfig {
  int steps_per_period = 4000;

  static constexpr const char* method = "rk4";  // classical 4th order, fixed step
};

void validate(const IntegratorConfig& cfg);

/// Grid step for a system of the given period.
double grid_step(double period, const IntegratorConfig& cfg);

/// State-transition matrix sample Phi(to_time, from_time).
struct TransitionMatrix {
  Matrix value;
  double from_time = 0;
  double to_time = 0;
};

/// One classical Runge-Kutta step for X' = rhs(t, X); X may be a vector or a
/// matrix (matrix ODEs advance all columns in one pass).
template <typename State, typename Rhs>
State rk4_step(Rhs&& rhs, double t, const State& x, double h) {
  const State k1 = rhs(t, x);
  const State k2 = rhs(t + 0.5 * h, State(x + (0.5 * h) * k1));
  const State k3 = rhs(t + 0.5 * h, State(x + (0.5 * h) * k2));
  const State k4 = rhs(t + h, State(x + h * k3));
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

using OdeRhs = std::function<Vector(double, const Vector&)>;

/// States at every grid node of [t0, t1].
struct SampledOde {
  std::vector<double> times;
  std::vector<Vector> states;
};

/// Fixed-step RK4 over [t0, t1]; the window must be an integer number of
/// steps. Throws DivergenceError at the first non-finite state.
SampledOde integrate_ode(const OdeRhs& rhs, const Vector& x0, double t0,
                         double t1, double step);

/// Transition matrix of x' = A(t) x (no gain) or x' = (A(t) - B(t) F) x
/// (gain supplied), integrated columnwise from the identity.
TransitionMatrix transition_matrix(const LinearPeriodicSystem& sys,
                                   const std::optional<Matrix>& gain,
                                   double t0, double t1,
                                   const IntegratorConfig& cfg);

}  // namespace aaw

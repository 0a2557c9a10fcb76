#include "aaw/odeint.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "aaw/errors.hpp"

namespace aaw {

namespace {

long long step_count(double t0, double t1, double step) {
  if (!(t1 >= t0)) throw std::invalid_argument("integration window reversed");
  if (!(step > 0.0)) throw std::invalid_argument("nonpositive step");
  const double span = t1 - t0;
  const auto n = static_cast<long long>(std::llround(span / step));
  if (std::abs(static_cast<double>(n) * step - span) >
      1e-9 * std::max(1.0, span)) {
    throw std::invalid_argument(
        "integration window is not an integer number of grid steps");
  }
  return n;
}

}  // namespace

void validate(const IntegratorConfig& cfg) {
  if (cfg.steps_per_period < 2 || cfg.steps_per_period % 2 != 0) {
    throw std::invalid_argument(
        "integrator: steps_per_period must be even and at least 2");
  }
}

double grid_step(double period, const IntegratorConfig& cfg) {
  validate(cfg);
  if (!(period > 0.0)) throw std::invalid_argument("nonpositive period");
  return period / cfg.steps_per_period;
}

SampledOde integrate_ode(const OdeRhs& rhs, const Vector& x0, double t0,
                         double t1, double step) {
  const long long n = step_count(t0, t1, step);
  SampledOde out;
  out.times.reserve(static_cast<size_t>(n) + 1);
  out.states.reserve(static_cast<size_t>(n) + 1);
  out.times.push_back(t0);
  out.states.push_back(x0);
  Vector x = x0;
  for (long long i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * step;
    x = rk4_step(rhs, t, x, step);
    const double tn = t0 + static_cast<double>(i + 1) * step;
    if (!x.allFinite()) {
      throw DivergenceError(tn, "integrate_ode: non-finite state at t=" +
                                    std::to_string(tn));
    }
    out.times.push_back(tn);
    out.states.push_back(x);
  }
  return out;
}

TransitionMatrix transition_matrix(const LinearPeriodicSystem& sys,
                                   const std::optional<Matrix>& gain,
                                   double t0, double t1,
                                   const IntegratorConfig& cfg) {
  const double h = grid_step(sys.period, cfg);
  if (gain && (gain->rows() != sys.input_dim || gain->cols() != sys.dim)) {
    throw std::invalid_argument("transition_matrix: gain shape mismatch");
  }
  const long long n = step_count(t0, t1, h);

  auto rhs = [&](double t, const Matrix& m) -> Matrix {
    if (gain) return (sys.A_of(t) - sys.B_of(t) * (*gain)) * m;
    return sys.A_of(t) * m;
  };

  Matrix phi = Matrix::Identity(sys.dim, sys.dim);
  for (long long i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    phi = rk4_step(rhs, t, phi, h);
    if (!phi.allFinite()) {
      throw DivergenceError(t + h, "transition_matrix: non-finite entries");
    }
  }
  return TransitionMatrix{std::move(phi), t0, t1};
}

}  // namespace aaw

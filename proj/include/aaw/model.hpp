#pragma once

#include <functional>
#include <optional>

#include "aaw/types.hpp"

namespace aaw {

using MatrixFn = std::function<Matrix(double)>;
using PathFn = std::function<Vector(double)>;
using VectorFieldFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

/// Linear system x' = A(t) x + B(t) u with T-periodic coefficient matrices.
struct LinearPeriodicSystem {
  int dim = 0;        ///< state dimension n
  int input_dim = 0;  ///< input dimension m
  double period = 0;  ///< coefficient period T
  MatrixFn A_of;      ///< t -> n x n
  MatrixFn B_of;      ///< t -> n x m
};

/// Known T-periodic solution x*(t) together with its time derivative.
struct PeriodicSolution {
  double period = 0;
  PathFn x_star;
  PathFn x_star_dot;
};

/// Autonomous system x' = f(x) + u carrying a known periodic solution.
/// The Jacobian is optional; finite differences substitute when absent.
struct NonlinearAutonomousSystem {
  int dim = 0;
  VectorFieldFn f;
  std::optional<JacobianFn> jacobian;
  PeriodicSolution periodic_solution;
};

/// On/off pattern of the delayed feedback controller, in whole periods of
/// the underlying system. Each cycle starts with `wait_periods` periods with
/// the controller off, followed by `act_periods` periods with it on. The
/// feedback compares the current state against the sample `delay_periods`
/// periods earlier. Requiring delay <= wait keeps the closed loop
/// finite-dimensional over one cycle: delayed samples never reach back
/// before the cycle start.
struct SwitchingSchedule {
  int wait_periods = 1;
  int act_periods = 1;
  int delay_periods = 1;

  int cycle_periods() const noexcept { return wait_periods + act_periods; }
  bool is_base() const noexcept {
    return wait_periods == 1 && act_periods == 1 && delay_periods == 1;
  }
};

/// Delayed feedback u(t) = -switch(t) * F * (x(t) - x(t - d*T)).
struct FeedbackLaw {
  Matrix gain;  ///< m x n
  SwitchingSchedule schedule;
};

/// Throws std::invalid_argument unless wait, act, delay are positive and
/// delay <= wait.
void validate(const SwitchingSchedule& schedule);

/// Controller on/off value at time t for a system of period T.
/// Right-continuous: at a switching instant the new block's value applies.
/// Throws std::domain_error for t < 0 or T <= 0.
int switch_value(const SwitchingSchedule& schedule, double t, double T);

/// Feedback input for a given current and delayed state sample; zero during
/// wait blocks and identically zero whenever x == x_delayed.
Vector control_input(const FeedbackLaw& law, double T, double t,
                     const Vector& x, const Vector& x_delayed);

/// Central-difference Jacobian of f at x, step 1e-6 * (1 + |x|).
Matrix fd_jacobian(const VectorFieldFn& f, const Vector& x);

/// Periodic solution whose derivative is a 4th-order central difference of
/// x_star with step period / steps_per_period.
PeriodicSolution with_fd_derivative(double period, PathFn x_star,
                                    int steps_per_period = 4000);

// --- residual probes used by tests and by the built-in system registry ---

/// max over a sample grid of |A(t+T)-A(t)| and |B(t+T)-B(t)| entries.
double max_coefficient_period_residual(const LinearPeriodicSystem& sys,
                                       int samples = 97);

/// max over a sample grid of |x*(t+T) - x*(t)| entries.
double max_orbit_period_residual(const PeriodicSolution& sol,
                                 int samples = 97);

/// max over a sample grid of |x*'(t) - f(x*(t))| entries.
double max_orbit_residual(const NonlinearAutonomousSystem& sys,
                          int samples = 97);

/// max relative gap between the analytic Jacobian and finite differences at
/// the given states; zero when no analytic Jacobian is stored.
double max_jacobian_gap(const NonlinearAutonomousSystem& sys,
                        const std::vector<Vector>& states);

}  // namespace aaw

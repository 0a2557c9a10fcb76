#include "aaw/simulate.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aaw/errors.hpp"

namespace aaw {

namespace {

constexpr double kOverflowGuard = 1e12;

/// States of one schedule period at step h / 2^level, both endpoints stored.
struct PeriodTrace {
  double t0 = 0;
  double step = 0;
  std::vector<Vector> states;

  const Vector& at(double t) const {
    const double idx_f = (t - t0) / step;
    const auto idx = static_cast<long long>(std::llround(idx_f));
    if (std::abs(idx_f - static_cast<double>(idx)) > 1e-6 || idx < 0 ||
        idx >= static_cast<long long>(states.size())) {
      throw std::logic_error("delay buffer lookup off the stored grid");
    }
    return states[static_cast<size_t>(idx)];
  }
};

// Storage level per period of one cycle. An act period marched at step r
// reads delayed samples at the RK4 stage times t, t+r/2, t+r, so its source
// period (delay_periods earlier) must be stored at step r/2 or finer; wait
// periods are delay-free and can be marched at any level. Delayed samples
// never reach back before the cycle start (delay <= wait), so levels are a
// per-cycle property.
std::vector<int> refinement_levels(const SwitchingSchedule& s) {
  const int cycle = s.cycle_periods();
  std::vector<int> levels(static_cast<size_t>(cycle), 0);
  for (int j = cycle - 1; j >= 0; --j) {
    if (j >= s.wait_periods) {
      auto& src = levels[static_cast<size_t>(j - s.delay_periods)];
      src = std::max(src, levels[static_cast<size_t>(j)] + 1);
    }
  }
  return levels;
}

/// Closed-loop right-hand sides. The feedback is u = -F (x - x_delayed);
/// act_rhs already includes the injection of u into the dynamics.
struct Plant {
  int n = 0;
  int m = 0;
  std::function<Vector(double, const Vector&)> drift;
  std::function<Vector(double, const Vector&, const Vector&)> act_rhs;
};

void record_period(Trajectory& traj, const FeedbackLaw& law, double T, int N,
                   int period_index, const std::vector<PeriodTrace>& traces,
                   double delay) {
  const auto& sched = law.schedule;
  const int cycle = sched.cycle_periods();
  const auto& tr = traces[static_cast<size_t>(period_index)];
  const double h = T / N;
  const auto stride = static_cast<long>(std::llround(h / tr.step));
  for (int i = 1; i <= N; ++i) {
    const double t = tr.t0 + i * h;
    const Vector& xi = tr.states[static_cast<size_t>(i) * stride];
    // The input column holds the value used on the step leaving the node,
    // so the node at i == N already belongs to the next period.
    const int step_period = (i < N) ? period_index : period_index + 1;
    Vector u;
    if (step_period >= cycle || step_period < sched.wait_periods) {
      u = Vector::Zero(law.gain.rows());
    } else {
      const auto& src =
          traces[static_cast<size_t>(step_period - sched.delay_periods)];
      u = -law.gain * (xi - src.at(t - delay));
    }
    traj.times.push_back(t);
    traj.states.push_back(xi);
    traj.inputs.push_back(std::move(u));
  }
}

SimulationResult run_engine(const Plant& plant, const FeedbackLaw& law,
                            double T, const Vector& x0, int cycles,
                            const IntegratorConfig& cfg, bool record) {
  validate(cfg);
  validate(law.schedule);
  if (!(T > 0.0)) throw std::invalid_argument("closed loop: nonpositive period");
  if (law.gain.rows() != plant.m || law.gain.cols() != plant.n) {
    throw std::invalid_argument("closed loop: gain shape mismatch");
  }
  if (x0.size() != plant.n) {
    throw std::invalid_argument("closed loop: initial state dimension mismatch");
  }
  if (cycles < 1) {
    throw std::invalid_argument("closed loop: horizon must be at least one cycle");
  }

  const auto& sched = law.schedule;
  const int cycle_periods = sched.cycle_periods();
  const int N = cfg.steps_per_period;
  const double delay = sched.delay_periods * T;
  const auto levels = refinement_levels(sched);

  SimulationResult out;
  Trajectory& traj = out.trajectory;
  traj.schedule = sched;
  traj.gain = law.gain;
  traj.period = T;
  if (record) {
    const size_t nodes =
        static_cast<size_t>(cycles) * cycle_periods * static_cast<size_t>(N) + 1;
    traj.times.reserve(nodes);
    traj.states.reserve(nodes);
    traj.inputs.reserve(nodes);
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    traj.inputs.push_back(Vector::Zero(plant.m));  // cycles start waiting
  }

  Vector x = x0;
  out.final_state = x0;
  std::vector<PeriodTrace> traces;

  for (int k = 0; k < cycles; ++k) {
    const double cycle_start = static_cast<double>(k) * cycle_periods * T;
    traces.clear();
    traces.reserve(static_cast<size_t>(cycle_periods));

    for (int j = 0; j < cycle_periods; ++j) {
      const bool acting = j >= sched.wait_periods;
      const auto nsteps = static_cast<long>(N) << levels[static_cast<size_t>(j)];
      PeriodTrace tr;
      tr.t0 = cycle_start + j * T;
      tr.step = T / static_cast<double>(nsteps);
      tr.states.reserve(static_cast<size_t>(nsteps) + 1);
      tr.states.push_back(x);

      const PeriodTrace* src =
          acting ? &traces[static_cast<size_t>(j - sched.delay_periods)]
                 : nullptr;
      const double r = tr.step;

      for (long i = 0; i < nsteps; ++i) {
        const double t = tr.t0 + static_cast<double>(i) * r;
        if (!acting) {
          x = rk4_step(plant.drift, t, x, r);
        } else {
          const Vector& z0 = src->at(t - delay);
          const Vector& zh = src->at(t + 0.5 * r - delay);
          const Vector& z1 = src->at(t + r - delay);
          const Vector k1 = plant.act_rhs(t, x, z0);
          const Vector k2 = plant.act_rhs(t + 0.5 * r, x + (0.5 * r) * k1, zh);
          const Vector k3 = plant.act_rhs(t + 0.5 * r, x + (0.5 * r) * k2, zh);
          const Vector k4 = plant.act_rhs(t + r, x + r * k3, z1);
          x += (r / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kOverflowGuard) {
          out.divergence = DivergenceInfo{
              t + r, x.allFinite() ? x.cwiseAbs().maxCoeff()
                                   : std::numeric_limits<double>::quiet_NaN()};
          return out;
        }
        tr.states.push_back(x);
      }
      traces.push_back(std::move(tr));
      out.final_state = x;
      if (record) record_period(traj, law, T, N, j, traces, delay);
    }
  }
  return out;
}

Plant make_plant(const LinearPeriodicSystem& sys, const Matrix& gain) {
  Plant p;
  p.n = sys.dim;
  p.m = sys.input_dim;
  p.drift = [&sys](double t, const Vector& x) -> Vector {
    return sys.A_of(t) * x;
  };
  p.act_rhs = [&sys, &gain](double t, const Vector& x,
                            const Vector& z) -> Vector {
    return sys.A_of(t) * x - sys.B_of(t) * (gain * (x - z));
  };
  return p;
}

Plant make_plant(const NonlinearAutonomousSystem& sys, const Matrix& gain) {
  Plant p;
  p.n = sys.dim;
  p.m = sys.dim;  // control enters additively, one channel per state
  p.drift = [&sys](double, const Vector& x) -> Vector { return sys.f(x); };
  p.act_rhs = [&sys, &gain](double, const Vector& x,
                            const Vector& z) -> Vector {
    return sys.f(x) - gain * (x - z);
  };
  return p;
}

Trajectory throw_on_divergence(SimulationResult&& result) {
  if (result.divergence) {
    throw DivergenceError(result.divergence->time,
                          "closed-loop state exceeded the overflow guard at t=" +
                              std::to_string(result.divergence->time));
  }
  return std::move(result.trajectory);
}

}  // namespace

SimulationResult run_closed_loop(const LinearPeriodicSystem& sys,
                                 const FeedbackLaw& law, const Vector& x0,
                                 int horizon_cycles,
                                 const IntegratorConfig& cfg,
                                 bool record_trajectory) {
  return run_engine(make_plant(sys, law.gain), law, sys.period, x0,
                    horizon_cycles, cfg, record_trajectory);
}

SimulationResult run_closed_loop(const NonlinearAutonomousSystem& sys,
                                 const FeedbackLaw& law, const Vector& x0,
                                 int horizon_cycles,
                                 const IntegratorConfig& cfg,
                                 bool record_trajectory) {
  return run_engine(make_plant(sys, law.gain), law,
                    sys.periodic_solution.period, x0, horizon_cycles, cfg,
                    record_trajectory);
}

Trajectory simulate_closed_loop(const LinearPeriodicSystem& sys,
                                const FeedbackLaw& law, const Vector& x0,
                                int horizon_cycles,
                                const IntegratorConfig& cfg) {
  return throw_on_divergence(run_closed_loop(sys, law, x0, horizon_cycles, cfg));
}

Trajectory simulate_closed_loop(const NonlinearAutonomousSystem& sys,
                                const FeedbackLaw& law, const Vector& x0,
                                int horizon_cycles,
                                const IntegratorConfig& cfg) {
  return throw_on_divergence(run_closed_loop(sys, law, x0, horizon_cycles, cfg));
}

LimitPrediction predict_limit(const Matrix& lambda, const Vector& x0,
                              const SpectralTolerances& tol) {
  if (lambda.rows() != lambda.cols() || x0.size() != lambda.rows()) {
    throw std::invalid_argument("predict_limit: dimension mismatch");
  }
  const MonodromyReport report = stability_verdict(lambda, 0.0, tol);
  if (report.verdict != Verdict::ConvergesToPeriodic) {
    throw PreconditionError(
        std::string("predict_limit: spectrum verdict is ") +
        to_string(report.verdict) +
        "; a semisimple unit eigenvalue with all other multipliers inside "
        "the unit circle is required");
  }

  const ComplexMatrix& basis = report.eigenvectors;
  Eigen::JacobiSVD<ComplexMatrix> svd(basis);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0
                          ? sv(0) / sv(sv.size() - 1)
                          : std::numeric_limits<double>::infinity();

  LimitPrediction out;
  out.alphas = basis.partialPivLu().solve(x0.cast<Complex>());
  ComplexVector limit = ComplexVector::Zero(x0.size());
  for (Eigen::Index k = 0; k < report.eigenvalues.size(); ++k) {
    if (std::abs(report.eigenvalues(k) - Complex(1.0, 0.0)) <= tol.tol_unit) {
      limit += out.alphas(k) * basis.col(k);
      ++out.kappa;
    }
  }
  out.limit_point = limit.real();
  out.ill_conditioned = cond > 1e10;
  return out;
}

ConvergenceDiagnostics convergence_diagnostics(const Trajectory& trajectory,
                                               const LimitPrediction& prediction,
                                               double cycle_time) {
  if (trajectory.times.size() < 2) {
    throw PreconditionError("convergence_diagnostics: empty trajectory");
  }
  const double h = trajectory.times[1] - trajectory.times[0];
  const auto stride = static_cast<size_t>(std::llround(cycle_time / h));
  if (stride == 0 ||
      std::abs(static_cast<double>(stride) * h - cycle_time) > 1e-9 * cycle_time) {
    throw std::invalid_argument(
        "convergence_diagnostics: cycle time is not a whole number of grid steps");
  }
  const size_t nodes = trajectory.times.size();
  if (nodes - 1 < 3 * stride) {
    throw PreconditionError(
        "convergence_diagnostics: need at least 3 simulated cycles");
  }

  ConvergenceDiagnostics out;
  for (size_t k = 0; k * stride < nodes; ++k) {
    out.cycle_distances.push_back(
        (trajectory.states[k * stride] - prediction.limit_point).norm());
  }

  const size_t window = std::min<size_t>(5, out.cycle_distances.size());
  out.monotone_tail = true;
  for (size_t i = out.cycle_distances.size() - window;
       i + 1 < out.cycle_distances.size(); ++i) {
    const double next = out.cycle_distances[i + 1];
    if (next > std::max(1.1 * out.cycle_distances[i], 1e-8)) {
      out.monotone_tail = false;
      break;
    }
  }
  return out;
}

}  // namespace aaw

#include "aaw/gainsearch.hpp"

#include <cmath>
#include <stdexcept>

#include "aaw/errors.hpp"
#include "aaw/parallel.hpp"

namespace aaw {

namespace {

constexpr long kGridGuard = 10'000'000;

struct GridAxes {
  std::vector<std::vector<double>> values;  // per flattened gain entry
  long total = 1;
};

GridAxes build_axes(const GainSearchSpec& spec) {
  const auto entries = spec.lower.size();
  GridAxes axes;
  axes.values.resize(static_cast<size_t>(entries));
  for (Eigen::Index e = 0; e < entries; ++e) {
    const double lo = spec.lower(e / spec.lower.cols(), e % spec.lower.cols());
    const double hi = spec.upper(e / spec.upper.cols(), e % spec.upper.cols());
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("gain search: malformed box bounds");
    }
    auto& axis = axes.values[static_cast<size_t>(e)];
    if (lo == hi || spec.grid_points == 1) {
      axis.push_back(lo);
    } else {
      for (int j = 0; j < spec.grid_points; ++j) {
        axis.push_back(lo + (hi - lo) * j / (spec.grid_points - 1));
      }
    }
    axes.total *= static_cast<long>(axis.size());
    if (axes.total > kGridGuard) {
      throw std::invalid_argument("gain search: grid size exceeds 1e7 guard");
    }
  }
  return axes;
}

// flat index -> gain matrix; entry 0 is the most significant digit so flat
// order is lexicographic in the row-major gain entries
Matrix gain_at(const GridAxes& axes, long flat, Eigen::Index rows,
               Eigen::Index cols) {
  Matrix gain(rows, cols);
  long rest = flat;
  for (Eigen::Index e = gain.size() - 1; e >= 0; --e) {
    const auto& axis = axes.values[static_cast<size_t>(e)];
    const long j = rest % static_cast<long>(axis.size());
    rest /= static_cast<long>(axis.size());
    gain(e / cols, e % cols) = axis[static_cast<size_t>(j)];
  }
  return gain;
}

}  // namespace

ObjectiveValue objective(const LinearPeriodicSystem& sys,
                         const SwitchingSchedule& schedule, const Matrix& gain,
                         const IntegratorConfig& cfg,
                         const SpectralTolerances& tol) {
  if (gain.rows() != sys.input_dim || gain.cols() != sys.dim) {
    throw std::invalid_argument("objective: gain shape mismatch");
  }
  Matrix lambda;
  try {
    lambda = monodromy_propagate(sys, FeedbackLaw{gain, schedule}, cfg);
  } catch (const DivergenceError&) {
    return ObjectiveValue{};  // +inf sentinel, worst possible
  }

  const auto eig = eigendecompose(lambda);
  Eigen::Index closest = 0;
  double gap = std::numeric_limits<double>::infinity();
  int near_unit = 0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double d = std::abs(eig.values(k) - Complex(1.0, 0.0));
    if (d <= tol.tol_unit) ++near_unit;
    if (d < gap) {
      gap = d;
      closest = k;
    }
  }

  ObjectiveValue out;
  out.multiple_unit = near_unit > 1;
  out.unit_missing = gap > tol.tol_unit;
  out.value = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (!out.unit_missing && k == closest) continue;  // drop the structural 1
    out.value = std::max(out.value, std::abs(eig.values(k)));
  }
  return out;
}

GainSearchResult search(const LinearPeriodicSystem& sys,
                        const SwitchingSchedule& schedule,
                        const GainSearchSpec& spec, const IntegratorConfig& cfg,
                        const SpectralTolerances& tol) {
  if (spec.lower.rows() != sys.input_dim || spec.lower.cols() != sys.dim ||
      spec.upper.rows() != sys.input_dim || spec.upper.cols() != sys.dim) {
    throw std::invalid_argument("gain search: box shape mismatch");
  }
  if (spec.grid_points < 1) {
    throw std::invalid_argument("gain search: grid_points must be positive");
  }

  const auto axes = build_axes(spec);
  const Eigen::Index rows = spec.lower.rows(), cols = spec.lower.cols();

  std::vector<double> values(static_cast<size_t>(axes.total));
  parallel_for(axes.total, [&](long flat) {
    values[static_cast<size_t>(flat)] =
        objective(sys, schedule, gain_at(axes, flat, rows, cols), cfg, tol).value;
  });

  GainSearchResult result;
  result.evaluation_count = axes.total;

  long best_flat = 0;
  for (long flat = 0; flat < axes.total; ++flat) {
    if (values[static_cast<size_t>(flat)] < values[static_cast<size_t>(best_flat)]) {
      best_flat = flat;  // strict '<': ties keep the lexicographically first gain
    }
  }
  result.best_gain = gain_at(axes, best_flat, rows, cols);
  result.best_objective = values[static_cast<size_t>(best_flat)];

  for (long flat = 0; flat < axes.total; ++flat) {
    if (values[static_cast<size_t>(flat)] >= 1.0) continue;
    const Matrix gain = gain_at(axes, flat, rows, cols);
    const Matrix lambda = monodromy_propagate(sys, FeedbackLaw{gain, schedule}, cfg);
    const auto report = stability_verdict(
        lambda, schedule.cycle_periods() * sys.period, tol);
    if (report.verdict == Verdict::ConvergesToPeriodic) {
      result.stable.push_back(GainCandidate{gain, values[static_cast<size_t>(flat)]});
    }
  }

  // Nelder-Mead polish in the free (non-degenerate) box dimensions, rejecting
  // iterates outside the box with an infinite objective.
  std::vector<Eigen::Index> free_dims;
  for (Eigen::Index e = 0; e < spec.lower.size(); ++e) {
    if (axes.values[static_cast<size_t>(e)].size() > 1) free_dims.push_back(e);
  }
  if (spec.refine && !free_dims.empty() &&
      std::isfinite(result.best_objective)) {
    long refine_evals = 0;
    auto embedded = [&](const Vector& theta) -> Matrix {
      Matrix gain = result.best_gain;
      for (size_t i = 0; i < free_dims.size(); ++i) {
        gain(free_dims[i] / cols, free_dims[i] % cols) = theta(static_cast<Eigen::Index>(i));
      }
      return gain;
    };
    auto boxed = [&](const Vector& theta) -> double {
      for (size_t i = 0; i < free_dims.size(); ++i) {
        const Eigen::Index e = free_dims[i];
        const double v = theta(static_cast<Eigen::Index>(i));
        if (v < spec.lower(e / cols, e % cols) || v > spec.upper(e / cols, e % cols)) {
          return std::numeric_limits<double>::infinity();
        }
      }
      ++refine_evals;
      return objective(sys, schedule, embedded(theta), cfg, tol).value;
    };

    Vector start(static_cast<Eigen::Index>(free_dims.size()));
    Vector steps(start.size());
    for (size_t i = 0; i < free_dims.size(); ++i) {
      const Eigen::Index e = free_dims[i];
      const double lo = spec.lower(e / cols, e % cols);
      const double hi = spec.upper(e / cols, e % cols);
      const double cell = (hi - lo) / (spec.grid_points - 1);
      const double v = result.best_gain(e / cols, e % cols);
      start(static_cast<Eigen::Index>(i)) = v;
      steps(static_cast<Eigen::Index>(i)) = (v + cell <= hi) ? cell : -cell;
    }

    const auto [theta, value] = nelder_mead(boxed, start, steps, 200, 1e-6);
    result.evaluation_count += refine_evals;
    if (value < result.best_objective) {
      result.best_objective = value;
      result.best_gain = embedded(theta);
    }
  }

  try {
    const Matrix lambda_best =
        monodromy_propagate(sys, FeedbackLaw{result.best_gain, schedule}, cfg);
    result.verdict = stability_verdict(
                         lambda_best, schedule.cycle_periods() * sys.period, tol)
                         .verdict;
  } catch (const DivergenceError&) {
    result.verdict = Verdict::Unstable;  // even the best gain blows up
  }
  return result;
}

}  // namespace aaw

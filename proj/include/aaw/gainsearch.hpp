#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "aaw/floquet.hpp"
#include "aaw/model.hpp"
#include "aaw/types.hpp"

namespace aaw {

/// Per-entry box for the gain matrix, grid resolution, and whether the best
/// grid cell gets a derivative-free polish. Entries with lower == upper are
/// frozen (single grid point, excluded from refinement).
struct GainSearchSpec {
  Matrix lower;  ///< m x n lower bounds
  Matrix upper;  ///< m x n upper bounds
  int grid_points = 21;
  bool refine = true;
};

/// Largest Floquet-multiplier modulus after removing the structural unit
/// eigenvalue once. `unit_missing` flags the anomaly of no eigenvalue near 1
/// (the value then covers the whole spectrum); `multiple_unit` flags a unit
/// cluster of multiplicity above one (only the closest is removed).
/// Divergence during propagation yields +infinity.
struct ObjectiveValue {
  double value = std::numeric_limits<double>::infinity();
  bool unit_missing = false;
  bool multiple_unit = false;
};

ObjectiveValue objective(const LinearPeriodicSystem& sys,
                         const SwitchingSchedule& schedule, const Matrix& gain,
                         const IntegratorConfig& cfg,
                         const SpectralTolerances& tol = {});

struct GainCandidate {
  Matrix gain;
  double objective = 0;
};

struct GainSearchResult {
  Matrix best_gain;
  double best_objective = std::numeric_limits<double>::infinity();
  Verdict verdict = Verdict::Inconclusive;
  long evaluation_count = 0;
  std::vector<GainCandidate> stable;  ///< grid points whose verdict converges
};

/// Exhaustive grid scan over the box (lexicographic tie-break on the gain
/// entries), optionally followed by a Nelder-Mead polish constrained to the
/// box. Deterministic for a fixed spec regardless of worker count.
GainSearchResult search(const LinearPeriodicSystem& sys,
                        const SwitchingSchedule& schedule,
                        const GainSearchSpec& spec, const IntegratorConfig& cfg,
                        const SpectralTolerances& tol = {});

/// Classic Nelder-Mead (reflection 1, expansion 2, contraction 0.5, shrink
/// 0.5). Stops after max_iter iterations or when the simplex diameter drops
/// below diam_tol; returns the best vertex and its value.
template <typename Scalar, typename F>
std::pair<VecX<Scalar>, Scalar> nelder_mead(F&& f, const VecX<Scalar>& start,
                                            const VecX<Scalar>& steps,
                                            int max_iter, Scalar diam_tol) {
  using Vec = VecX<Scalar>;
  const Eigen::Index n = start.size();
  std::vector<Vec> x(static_cast<size_t>(n) + 1, start);
  for (Eigen::Index i = 0; i < n; ++i) x[static_cast<size_t>(i) + 1](i) += steps(i);
  std::vector<Scalar> fx(x.size());
  for (size_t i = 0; i < x.size(); ++i) fx[i] = f(x[i]);

  auto order = [&] {
    for (size_t i = 1; i < x.size(); ++i) {  // insertion sort keeps ties stable
      Vec xi = x[i];
      Scalar fi = fx[i];
      size_t j = i;
      while (j > 0 && fx[j - 1] > fi) {
        x[j] = x[j - 1];
        fx[j] = fx[j - 1];
        --j;
      }
      x[j] = std::move(xi);
      fx[j] = fi;
    }
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    Scalar diam = 0;
    for (size_t i = 1; i < x.size(); ++i)
      diam = std::max(diam, (x[i] - x[0]).template lpNorm<Eigen::Infinity>());
    if (diam < diam_tol) break;

    Vec centroid = Vec::Zero(n);
    for (size_t i = 0; i + 1 < x.size(); ++i) centroid += x[i];
    centroid /= static_cast<Scalar>(n);

    const Vec& worst = x.back();
    const Vec reflected = centroid + (centroid - worst);
    const Scalar fr = f(reflected);
    if (fr < fx[0]) {
      const Vec expanded = centroid + Scalar(2) * (centroid - worst);
      const Scalar fe = f(expanded);
      if (fe < fr) {
        x.back() = expanded;
        fx.back() = fe;
      } else {
        x.back() = reflected;
        fx.back() = fr;
      }
    } else if (fr < fx[x.size() - 2]) {
      x.back() = reflected;
      fx.back() = fr;
    } else {
      const Vec contracted = centroid + Scalar(0.5) * ((fr < fx.back() ? reflected : worst) - centroid);
      const Scalar fc = f(contracted);
      if (fc < std::min(fr, fx.back())) {
        x.back() = contracted;
        fx.back() = fc;
      } else {
        for (size_t i = 1; i < x.size(); ++i) {  // shrink toward the best
          x[i] = x[0] + Scalar(0.5) * (x[i] - x[0]);
          fx[i] = f(x[i]);
        }
      }
    }
  }
  order();
  return {x[0], fx[0]};
}

}  // namespace aaw

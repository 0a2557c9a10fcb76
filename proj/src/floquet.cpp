#include "aaw/floquet.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "aaw/errors.hpp"
#include "aaw/parallel.hpp"
#include "aaw/simulate.hpp"

namespace aaw {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ConvergesToPeriodic:
      return "ConvergesToPeriodic";
    case Verdict::Unstable:
      return "Unstable";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

EigenDecomposition eigendecompose(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigendecompose: square matrix required");
  if (m.rows() > 64) throw std::invalid_argument("eigendecompose: dimension cap is 64");
  if (!m.allFinite()) throw std::invalid_argument("eigendecompose: non-finite entries");

  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecompose: QR iteration did not converge");
  }

  const ComplexVector values = solver.eigenvalues();
  const ComplexMatrix vectors = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(values(a)), mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    if (values(a).real() != values(b).real())
      return values(a).real() > values(b).real();
    return values(a).imag() > values(b).imag();
  });

  EigenDecomposition out;
  out.values.resize(values.size());
  out.vectors.resize(vectors.rows(), vectors.cols());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    out.values(k) = values(order[static_cast<size_t>(k)]);
    ComplexVector v = vectors.col(order[static_cast<size_t>(k)]);
    v.normalize();
    // rotate so the first component of largest modulus is real-nonnegative
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > best + 1e-15) {
        best = std::abs(v(i));
        pivot = i;
      }
    }
    if (best > 0.0) v *= std::conj(v(pivot)) / std::abs(v(pivot));
    out.vectors.col(k) = v;
  }
  return out;
}

UnitEigenAnalysis unit_eigen_analysis(const Matrix& lambda, double tol_unit) {
  if (!(tol_unit > 0.0)) throw std::invalid_argument("tol_unit must be positive");
  const auto eig = eigendecompose(lambda);
  UnitEigenAnalysis out;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (std::abs(eig.values(k) - Complex(1.0, 0.0)) <= tol_unit) ++out.multiplicity;
  }
  const Matrix shifted = lambda - Matrix::Identity(lambda.rows(), lambda.cols());
  Eigen::JacobiSVD<Matrix> svd(shifted);
  const double threshold = tol_unit * lambda.norm();
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > threshold) ++rank;
  }
  out.semisimple = (lambda.rows() - rank) == out.multiplicity;
  return out;
}

MonodromyReport stability_verdict(const Matrix& lambda, double cycle_time,
                                  const SpectralTolerances& tol) {
  MonodromyReport report;
  report.lambda = lambda;
  report.cycle_time = cycle_time;

  const auto eig = eigendecompose(lambda);
  report.eigenvalues = eig.values;
  report.eigenvectors = eig.vectors;

  const auto unit = unit_eigen_analysis(lambda, tol.tol_unit);
  report.unit_multiplicity = unit.multiplicity;
  report.unit_semisimple = unit.semisimple;

  double radius_excl = 0.0;
  double radius_all = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double mod = std::abs(eig.values(k));
    radius_all = std::max(radius_all, mod);
    if (std::abs(eig.values(k) - Complex(1.0, 0.0)) > tol.tol_unit) {
      radius_excl = std::max(radius_excl, mod);
    }
  }
  report.spectral_radius_excl_unit = radius_excl;

  if (report.unit_multiplicity >= 1) {
    if (std::abs(radius_excl - 1.0) <= tol.tol_margin) {
      report.verdict = Verdict::Inconclusive;
    } else if (report.unit_semisimple && radius_excl < 1.0 - tol.tol_margin) {
      report.verdict = Verdict::ConvergesToPeriodic;
    } else {
      report.verdict = Verdict::Unstable;
    }
  } else {
    report.verdict = std::abs(radius_all - 1.0) <= tol.tol_margin
                         ? Verdict::Inconclusive
                         : Verdict::Unstable;
  }
  return report;
}

Matrix monodromy_integral(const LinearPeriodicSystem& sys, const Matrix& gain,
                          const IntegratorConfig& cfg) {
  validate(cfg);
  if (gain.rows() != sys.input_dim || gain.cols() != sys.dim) {
    throw std::invalid_argument("monodromy_integral: gain shape mismatch");
  }
  const int n = sys.dim;
  const int N = cfg.steps_per_period;
  const double T = sys.period;
  const double h = T / N;

  auto open_rhs = [&](double t, const Matrix& m) -> Matrix {
    return sys.A_of(t) * m;
  };
  auto closed_rhs = [&](double t, const Matrix& m) -> Matrix {
    return (sys.A_of(t) - sys.B_of(t) * gain) * m;
  };

  // Backward accumulation of Y(T, s_j) from one-step transitions:
  // Y(T, s_j) = Y(T, s_{j+1}) * Y(s_{j+1}, s_j).
  std::vector<Matrix> y(static_cast<size_t>(N) + 1);
  y[static_cast<size_t>(N)] = Matrix::Identity(n, n);
  const Matrix eye = Matrix::Identity(n, n);
  for (int j = N - 1; j >= 0; --j) {
    const Matrix step = rk4_step(closed_rhs, j * h, eye, h);
    y[static_cast<size_t>(j)] = y[static_cast<size_t>(j) + 1] * step;
  }

  // Forward sweep of Phi(s_j, 0), streaming the Simpson sum.
  Matrix phi = Matrix::Identity(n, n);
  Matrix integral = Matrix::Zero(n, n);
  for (int j = 0; j <= N; ++j) {
    const double weight = (j == 0 || j == N) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    integral.noalias() +=
        weight * (y[static_cast<size_t>(j)] * (sys.B_of(j * h) * gain) * phi);
    if (j < N) phi = rk4_step(open_rhs, j * h, phi, h);
  }
  integral *= h / 3.0;

  if (!integral.allFinite() || !phi.allFinite()) {
    throw DivergenceError(T, "monodromy_integral: non-finite entries");
  }
  return y[0] * phi + integral;
}

Matrix monodromy_propagate(const LinearPeriodicSystem& sys,
                           const FeedbackLaw& law,
                           const IntegratorConfig& cfg) {
  const int n = sys.dim;
  Matrix lambda(n, n);
  parallel_for(n, [&](long i) {
    Vector e = Vector::Zero(n);
    e(i) = 1.0;
    const auto run = run_closed_loop(sys, law, e, 1, cfg,
                                     /*record_trajectory=*/false);
    if (run.divergence) {
      throw DivergenceError(
          run.divergence->time,
          "monodromy_propagate: basis column " + std::to_string(i) +
              " diverged at t=" + std::to_string(run.divergence->time));
    }
    lambda.col(i) = run.final_state;
  });
  return lambda;
}

MonodromyAnalysis analyze_monodromy(const LinearPeriodicSystem& sys,
                                    const FeedbackLaw& law,
                                    const IntegratorConfig& cfg,
                                    const SpectralTolerances& tol) {
  const Matrix propagated = monodromy_propagate(sys, law, cfg);
  Matrix lambda = propagated;
  std::optional<double> agreement;
  if (law.schedule.is_base()) {
    const Matrix integral = monodromy_integral(sys, law.gain, cfg);
    agreement = (integral - propagated).cwiseAbs().maxCoeff();
    lambda = integral;
  }
  const double cycle_time = law.schedule.cycle_periods() * sys.period;
  return MonodromyAnalysis{stability_verdict(lambda, cycle_time, tol),
                           agreement};
}

}  // namespace aaw

#include "aaw/variational.hpp"

#include <cmath>
#include <stdexcept>

#include "aaw/errors.hpp"

namespace aaw {

VariationalSystem build_variational(const NonlinearAutonomousSystem& nl) {
  if (nl.dim < 1) throw std::invalid_argument("build_variational: empty system");
  if (!nl.f) throw std::invalid_argument("build_variational: missing vector field");
  if (!nl.periodic_solution.x_star || !nl.periodic_solution.x_star_dot) {
    throw std::invalid_argument("build_variational: missing periodic solution");
  }

  if (nl.jacobian) {
    // consistency check against central differences on a coarse grid
    const double T = nl.periodic_solution.period;
    for (int i = 0; i < 16; ++i) {
      const Vector x = nl.periodic_solution.x_star(T * i / 16.0);
      const Matrix analytic = (*nl.jacobian)(x);
      const Matrix numeric = fd_jacobian(nl.f, x);
      const double gap = (analytic - numeric).cwiseAbs().maxCoeff() /
                         (1.0 + analytic.cwiseAbs().maxCoeff());
      if (gap > 1e-4) {
        throw NumericalError(
            "build_variational: analytic Jacobian disagrees with finite "
            "differences (relative gap " +
            std::to_string(gap) + ")");
      }
    }
  }

  VariationalSystem vs;
  vs.source = nl;
  vs.xstar_dot0 = nl.periodic_solution.x_star_dot(0.0);

  const int n = nl.dim;
  LinearPeriodicSystem base;
  base.dim = n;
  base.input_dim = n;
  base.period = nl.periodic_solution.period;
  // capture the source by value; entries stay pure and shareable
  NonlinearAutonomousSystem src = nl;
  base.A_of = [src](double t) -> Matrix {
    const Vector x = src.periodic_solution.x_star(t);
    if (src.jacobian) return (*src.jacobian)(x);
    return fd_jacobian(src.f, x);
  };
  base.B_of = [n](double) -> Matrix { return Matrix::Identity(n, n); };
  vs.base = std::move(base);
  return vs;
}

double verify_unit_eigenvector(const VariationalSystem& vs,
                               const Matrix& lambda) {
  const Vector& v = vs.xstar_dot0;
  const double norm = v.norm();
  if (!(norm > 0.0)) {
    throw PreconditionError(
        "verify_unit_eigenvector: x*'(0) vanishes; the stored solution is an "
        "equilibrium, not an orbit");
  }
  if (lambda.rows() != v.size() || lambda.cols() != v.size()) {
    throw std::invalid_argument("verify_unit_eigenvector: dimension mismatch");
  }
  return (lambda * v - v).norm() / norm;
}

}  // namespace aaw

#pragma once

#include "aaw/model.hpp"
#include "aaw/types.hpp"

namespace aaw {

/// Linear periodic system governing small deviations from the periodic
/// solution of a nonlinear autonomous system: A(t) is the Jacobian of f
/// along the orbit and B(t) is the identity (control enters additively).
/// xstar_dot0 spans the structurally forced unit eigenspace of any cycle
/// map built from this system.
struct VariationalSystem {
  LinearPeriodicSystem base;
  NonlinearAutonomousSystem source;
  Vector xstar_dot0;
};

/// Builds the deviation dynamics around the stored periodic solution. Uses
/// the analytic Jacobian when present (after checking it against central
/// finite differences; disagreement beyond 1e-4 raises NumericalError),
/// finite differences otherwise.
VariationalSystem build_variational(const NonlinearAutonomousSystem& nl);

/// Relative residual |Lambda x*'(0) - x*'(0)| / |x*'(0)| of the forced unit
/// eigenpair. Throws PreconditionError when x*'(0) vanishes (an equilibrium,
/// not an orbit).
double verify_unit_eigenvector(const VariationalSystem& vs,
                               const Matrix& lambda);

}  // namespace aaw

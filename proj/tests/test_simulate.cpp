#include <doctest.h>

#include <cmath>

#include "aaw/errors.hpp"
#include "aaw/examples.hpp"
#include "aaw/floquet.hpp"
#include "aaw/simulate.hpp"
#include "aaw/variational.hpp"

using namespace aaw;

namespace {

const LinearPeriodicSystem& sys41() {
  return std::get<LinearPeriodicSystem>(get_example("ex41").system);
}

const NonlinearAutonomousSystem& nl42() {
  return std::get<NonlinearAutonomousSystem>(get_example("ex42").system);
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("trajectory stays on the orbit with zero input") {
  const IntegratorConfig cfg{2000};
  const auto& entry = get_example("ex41");
  const Vector x0 = entry.orbit.x_star(0.0);
  const auto traj = simulate_closed_loop(sys41(), entry.law, x0, 3, cfg);

  REQUIRE(traj.times.size() == 3 * 2 * 2000 + 1);
  double max_u = 0, max_dev = 0;
  for (size_t j = 0; j < traj.times.size(); ++j) {
    max_u = std::max(max_u, traj.inputs[j].norm());
    max_dev = std::max(
        max_dev, (traj.states[j] - entry.orbit.x_star(traj.times[j])).norm());
  }
  CHECK(max_u <= 1e-9);
  CHECK(max_dev <= 1e-6);
}

TEST_CASE("inputs vanish at every wait node") {
  const IntegratorConfig cfg{64};
  const auto& entry = get_example("ex41");
  const auto traj =
      simulate_closed_loop(sys41(), entry.law, vec2(-1.9, 0.9), 2, cfg);
  for (size_t j = 0; j < traj.times.size(); ++j) {
    if (switch_value(traj.schedule, traj.times[j], traj.period) == 0) {
      CHECK(traj.inputs[j].norm() == 0.0);
    }
  }
  // final node leaves into the next cycle's wait block
  CHECK(traj.inputs.back().norm() == 0.0);
}

TEST_CASE("state is continuous across the switching instant") {
  const IntegratorConfig cfg{2000};
  const auto& entry = get_example("ex41");
  const Vector x0 = vec2(-1.9, 0.9);
  const auto traj = simulate_closed_loop(sys41(), entry.law, x0, 1, cfg);
  const Matrix phi =
      transition_matrix(sys41(), std::nullopt, 0.0, 1.0, cfg).value;
  // the state at the switch-on node is the open-loop image of x0
  CHECK((traj.states[2000] - phi * x0).norm() <= 1e-8);
}

TEST_CASE("propagated columns equal basis-vector simulations exactly") {
  const IntegratorConfig cfg{512};
  const auto& entry = get_example("ex41");
  const Matrix lambda = monodromy_propagate(sys41(), entry.law, cfg);
  for (int i = 0; i < 2; ++i) {
    Vector e = Vector::Zero(2);
    e(i) = 1.0;
    const auto traj = simulate_closed_loop(sys41(), entry.law, e, 1, cfg);
    CHECK((traj.states.back() - lambda.col(i)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("linear closed loops superpose") {
  const IntegratorConfig cfg{1000};
  const auto& entry = get_example("ex41");
  const double a = -1.9, b = 0.9;
  const auto ta = simulate_closed_loop(sys41(), entry.law, vec2(1, 0), 2, cfg);
  const auto tb = simulate_closed_loop(sys41(), entry.law, vec2(0, 1), 2, cfg);
  const auto tc =
      simulate_closed_loop(sys41(), entry.law, vec2(a, b), 2, cfg);
  double worst = 0, scale = 0;
  for (size_t j = 0; j < tc.states.size(); ++j) {
    const Vector combo = a * ta.states[j] + b * tb.states[j];
    worst = std::max(worst, (tc.states[j] - combo).cwiseAbs().maxCoeff());
    scale = std::max(scale, tc.states[j].cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-7 * (1.0 + scale));
}

TEST_CASE("cycle boundaries follow the cycle map") {
  const IntegratorConfig cfg{2000};
  const auto& entry = get_example("ex41");
  const Matrix lambda = monodromy_propagate(sys41(), entry.law, cfg);
  const auto traj =
      simulate_closed_loop(sys41(), entry.law, vec2(-1.9, 0.9), 5, cfg);
  const size_t stride = 2 * 2000;
  for (size_t k = 0; (k + 1) * stride < traj.states.size(); ++k) {
    CHECK((traj.states[(k + 1) * stride] - lambda * traj.states[k * stride])
              .norm() <= 1e-6);
  }
}

TEST_CASE("divergence yields a partial trajectory and the first bad time") {
  const IntegratorConfig cfg{128};
  // without feedback the first component grows like e^(t/2)
  const FeedbackLaw open{Matrix::Zero(1, 2), SwitchingSchedule{1, 1, 1}};
  const auto result = run_closed_loop(sys41(), open, vec2(1e6, 1e6), 40, cfg);
  REQUIRE(result.divergence.has_value());
  CHECK(result.divergence->time > 0.0);
  CHECK(result.divergence->time < 80.0);
  CHECK(result.trajectory.states.size() >= 2);
  CHECK(result.trajectory.times.back() <= result.divergence->time);
  CHECK_THROWS_AS(
      simulate_closed_loop(sys41(), open, vec2(1e6, 1e6), 40, cfg),
      DivergenceError);
}

TEST_CASE("limit prediction reproduces the reference coefficients") {
  const IntegratorConfig cfg;
  const auto& entry = get_example("ex41");
  const Matrix lambda = monodromy_integral(sys41(), entry.law.gain, cfg);
  const auto pred = predict_limit(lambda, vec2(-1.9, 0.9), {});

  CHECK(pred.kappa == 1);
  CHECK_FALSE(pred.ill_conditioned);

  const Vector xs0 = entry.orbit.x_star(0.0);
  const double alpha1 = pred.limit_point.dot(xs0) / xs0.squaredNorm();
  CHECK(std::abs(alpha1 - 0.9907) <= 2e-3);
  CHECK(std::abs(pred.alphas(1) - Complex(-0.1178, 0.0)) <= 2e-3);

  // brute-force oracle: the limit is where repeated cycle maps settle
  Matrix power = Matrix::Identity(2, 2);
  for (int k = 0; k < 60; ++k) power = Matrix(lambda * power);
  CHECK((pred.limit_point - power * vec2(-1.9, 0.9)).norm() <= 1e-8);
}

TEST_CASE("limit prediction respects the eigenvector basis") {
  const IntegratorConfig cfg;
  const auto& entry = get_example("ex41");
  const Matrix lambda = monodromy_integral(sys41(), entry.law.gain, cfg);
  const auto eig = eigendecompose(lambda);

  const Vector v1 = eig.vectors.col(0).real();
  const auto on_axis = predict_limit(lambda, v1, {});
  CHECK((on_axis.limit_point - v1).norm() <= 1e-8);
  CHECK(std::abs(on_axis.alphas(0) - Complex(1.0, 0.0)) <= 1e-8);
  CHECK(std::abs(on_axis.alphas(1)) <= 1e-8);

  const Vector v2 = eig.vectors.col(1).real();
  const auto stable_axis = predict_limit(lambda, v2, {});
  CHECK(stable_axis.limit_point.norm() <= 1e-8);

  // reconstruction from the solved coefficients
  const auto pred = predict_limit(lambda, vec2(-1.9, 0.9), {});
  const ComplexVector recon = eig.vectors * pred.alphas;
  CHECK((recon - vec2(-1.9, 0.9).cast<Complex>()).norm() <= 1e-8);
}

TEST_CASE("limit prediction with a multiple unit eigenvalue") {
  // kappa = 2 synthetic map; oracle: powers settle on the unit eigenspace
  Matrix basis(3, 3);
  basis << 1, 1, 0, 0, 1, 1, 1, 0, 1;
  Matrix diag = Matrix::Zero(3, 3);
  diag(0, 0) = 1.0;
  diag(1, 1) = 1.0;
  diag(2, 2) = 0.4;
  const Matrix lambda = basis * diag * basis.inverse();
  Vector x0(3);
  x0 << 0.3, -1.2, 0.7;

  const auto pred = predict_limit(lambda, x0, {});
  CHECK(pred.kappa == 2);
  Matrix power = Matrix::Identity(3, 3);
  for (int k = 0; k < 80; ++k) power = Matrix(lambda * power);
  CHECK((pred.limit_point - power * x0).norm() <= 1e-8);
}

TEST_CASE("conjugate eigenvalue pairs keep the limit real") {
  // unit eigenvalue plus a contracting rotation pair 0.3 +- 0.4i
  Matrix lambda = Matrix::Zero(3, 3);
  lambda(0, 0) = 1.0;
  lambda(1, 1) = 0.3;
  lambda(1, 2) = -0.4;
  lambda(2, 1) = 0.4;
  lambda(2, 2) = 0.3;
  Vector x0(3);
  x0 << 0.7, -0.2, 1.1;

  const auto pred = predict_limit(lambda, x0, {});
  CHECK(pred.kappa == 1);

  // the solved coefficients reconstruct x0 and the kappa-block sum is real
  const auto eig = eigendecompose(lambda);
  CHECK((eig.vectors * pred.alphas - x0.cast<Complex>()).norm() <= 1e-8);
  ComplexVector unit_sum = ComplexVector::Zero(3);
  for (Eigen::Index k = 0; k < 3; ++k) {
    if (std::abs(eig.values(k) - Complex(1.0, 0.0)) <= 1e-6) {
      unit_sum += pred.alphas(k) * eig.vectors.col(k);
    }
  }
  CHECK(unit_sum.imag().cwiseAbs().maxCoeff() <= 1e-8);

  Matrix power = Matrix::Identity(3, 3);
  for (int k = 0; k < 80; ++k) power = Matrix(lambda * power);
  CHECK((pred.limit_point - power * x0).norm() <= 1e-8);
}

TEST_CASE("limit prediction refuses non-convergent spectra") {
  Matrix growing = Matrix::Identity(2, 2);
  growing(1, 1) = 1.7;
  CHECK_THROWS_AS(predict_limit(growing, vec2(1, 1), {}), PreconditionError);

  // defective unit eigenvalue
  CHECK_THROWS_AS(
      predict_limit((Matrix(2, 2) << 1, 1, 0, 1).finished(), vec2(1, 1), {}),
      PreconditionError);
}

TEST_CASE("nearly parallel eigenvectors set the conditioning flag") {
  Matrix lambda = Matrix::Zero(3, 3);
  lambda(0, 0) = 1.0;
  lambda(1, 1) = 0.5;
  lambda(1, 2) = 1.0;
  lambda(2, 2) = 0.5 + 1e-12;
  const auto pred = predict_limit(lambda, Vector::Ones(3), {});
  CHECK(pred.ill_conditioned);
}

TEST_CASE("per-cycle distances contract at the stable-multiplier rate") {
  const IntegratorConfig cfg{2000};
  const auto& entry = get_example("ex41");
  const Matrix lambda = monodromy_integral(sys41(), entry.law.gain, cfg);
  const Vector x0 = vec2(-1.9, 0.9);
  const auto pred = predict_limit(lambda, x0, {});
  const auto traj = simulate_closed_loop(sys41(), entry.law, x0, 12, cfg);
  const auto diag = convergence_diagnostics(traj, pred, 2.0);

  REQUIRE(diag.cycle_distances.size() == 13);
  // contraction is ~0.0362 per cycle, so ten cycles cut the distance by
  // far more than the asserted 1e-4
  CHECK(diag.cycle_distances[10] <= 1e-4 * diag.cycle_distances[1]);
  CHECK(diag.monotone_tail);
}

TEST_CASE("diagnostics on the orbit are flat") {
  const IntegratorConfig cfg{1000};
  const auto& entry = get_example("ex41");
  const Vector x0 = entry.orbit.x_star(0.0);
  const Matrix lambda = monodromy_integral(sys41(), entry.law.gain, cfg);
  const auto pred = predict_limit(lambda, x0, {});
  const auto traj = simulate_closed_loop(sys41(), entry.law, x0, 4, cfg);
  const auto diag = convergence_diagnostics(traj, pred, 2.0);
  for (double d : diag.cycle_distances) CHECK(d <= 1e-6);
}

TEST_CASE("diagnostics flag growth under the destabilizing schedule") {
  const IntegratorConfig cfg{1000};
  const auto& ghat = get_example("ex42-ghat");
  const Vector x0 = ghat.orbit.x_star(0.0) + 1e-6 * vec2(1, 0);
  const auto traj = simulate_closed_loop(nl42(), ghat.law, x0, 3, cfg);

  LimitPrediction on_orbit;  // reference point: the orbit sample itself
  on_orbit.limit_point = ghat.orbit.x_star(0.0);
  on_orbit.kappa = 1;
  const auto diag = convergence_diagnostics(traj, on_orbit, 3.0);
  REQUIRE(diag.cycle_distances.size() == 4);
  CHECK(diag.cycle_distances.back() >= 10.0 * diag.cycle_distances.front());
  CHECK_FALSE(diag.monotone_tail);
}

TEST_CASE("diagnostics need at least three cycles") {
  const IntegratorConfig cfg{512};
  const auto& entry = get_example("ex41");
  const auto traj = simulate_closed_loop(sys41(), entry.law,
                                         entry.orbit.x_star(0.0), 2, cfg);
  LimitPrediction pred;
  pred.limit_point = entry.orbit.x_star(0.0);
  CHECK_THROWS_AS(convergence_diagnostics(traj, pred, 2.0), PreconditionError);
}

TEST_CASE("nonlinear loop from a near-orbit start approaches the orbit") {
  const IntegratorConfig cfg{1000};
  const auto& entry = get_example("ex42");
  const auto traj =
      simulate_closed_loop(nl42(), entry.law, vec2(1.0, -0.05), 20, cfg);
  CHECK(std::abs(traj.states.back().norm() - 1.0) <= 5e-3);
}

TEST_CASE("first-order deviation matches the variational cycle map") {
  const IntegratorConfig cfg{2000};
  const auto& entry = get_example("ex42");
  const auto vs = build_variational(nl42());
  const Matrix lambda = monodromy_propagate(
      vs.base, FeedbackLaw{entry.law.gain, SwitchingSchedule{1, 1, 1}}, cfg);
  const Vector xs0 = entry.orbit.x_star(0.0);
  const Vector delta = 1e-5 * vec2(0.3, -std::sqrt(1.0 - 0.09));
  const auto traj =
      simulate_closed_loop(nl42(), entry.law, Vector(xs0 + delta), 1, cfg);
  const Vector dev = traj.states.back() - xs0;
  CHECK((dev - lambda * delta).norm() <= 1e-8);
}

TEST_CASE("schedules with a gap between delay and act still follow the map") {
  // wait 3, act 1, delay 2: the act period reads a mid-wait period
  const IntegratorConfig cfg{256};
  const SwitchingSchedule exotic{3, 1, 2};
  const FeedbackLaw law{(Matrix(1, 2) << 1.0, 0.5).finished(), exotic};
  const Matrix lambda = monodromy_propagate(sys41(), law, cfg);
  const auto traj =
      simulate_closed_loop(sys41(), law, vec2(0.3, -0.4), 3, cfg);
  const size_t stride = 4 * 256;
  for (size_t k = 0; (k + 1) * stride < traj.states.size(); ++k) {
    CHECK((traj.states[(k + 1) * stride] - lambda * traj.states[k * stride])
              .norm() <= 1e-6);
  }

  // zero gain degenerates to the open-loop power over the cycle
  const Matrix phi =
      transition_matrix(sys41(), std::nullopt, 0.0, 1.0, cfg).value;
  const Matrix lam0 =
      monodromy_propagate(sys41(), FeedbackLaw{Matrix::Zero(1, 2), exotic}, cfg);
  const Matrix phi4 = ((phi * phi) * phi) * phi;
  CHECK((lam0 - phi4).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + phi4.norm()));
}

TEST_CASE("simulation input guards") {
  const IntegratorConfig cfg{64};
  const auto& entry = get_example("ex41");
  CHECK_THROWS_AS(
      simulate_closed_loop(sys41(), entry.law, Vector::Zero(3), 1, cfg),
      std::invalid_argument);
  CHECK_THROWS_AS(
      simulate_closed_loop(sys41(), entry.law, vec2(1, 0), 0, cfg),
      std::invalid_argument);
  FeedbackLaw bad = entry.law;
  bad.gain = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(simulate_closed_loop(sys41(), bad, vec2(1, 0), 1, cfg),
                  std::invalid_argument);
}

TEST_SUITE_END();

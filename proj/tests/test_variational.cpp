#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "aaw/errors.hpp"
#include "aaw/examples.hpp"
#include "aaw/floquet.hpp"
#include "aaw/variational.hpp"

using namespace aaw;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

const NonlinearAutonomousSystem& ex42_system() {
  return std::get<NonlinearAutonomousSystem>(get_example("ex42").system);
}

}  // namespace

TEST_SUITE_BEGIN("variational");

TEST_CASE("deviation dynamics evaluate the Jacobian along the orbit") {
  const auto vs = build_variational(ex42_system());
  CHECK(vs.base.dim == 2);
  CHECK(vs.base.input_dim == 2);
  CHECK(vs.base.period == 1.0);

  Matrix a0(2, 2);
  a0 << 2.0, kTwoPi, -kTwoPi, 0.0;
  CHECK((vs.base.A_of(0.0) - a0).cwiseAbs().maxCoeff() <= 1e-9);

  // derived from the Jacobian formulas at quarter period, x* = [0, -1]
  Matrix aq(2, 2);
  aq << 0.0, kTwoPi, -kTwoPi, 2.0;
  CHECK((vs.base.A_of(0.25) - aq).cwiseAbs().maxCoeff() <= 1e-9);

  CHECK((vs.base.B_of(0.4) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(max_coefficient_period_residual(vs.base) <= 1e-9);
}

TEST_CASE("linear vector field linearizes to itself") {
  Matrix rotation(2, 2);
  rotation << 0.0, kTwoPi, -kTwoPi, 0.0;
  NonlinearAutonomousSystem nl;
  nl.dim = 2;
  nl.f = [rotation](const Vector& x) { return Vector(rotation * x); };
  nl.periodic_solution.period = 1.0;
  nl.periodic_solution.x_star = [](double t) {
    Vector v(2);
    v << std::cos(kTwoPi * t), -std::sin(kTwoPi * t);
    return v;
  };
  nl.periodic_solution.x_star_dot = [](double t) {
    Vector v(2);
    v << -kTwoPi * std::sin(kTwoPi * t), -kTwoPi * std::cos(kTwoPi * t);
    return v;
  };
  const auto vs = build_variational(nl);  // finite-difference Jacobian path
  for (double t : {0.0, 0.37, 0.5}) {
    CHECK((vs.base.A_of(t) - rotation).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("x*'(t) solves the deviation dynamics") {
  const auto vs = build_variational(ex42_system());
  for (int i = 0; i < 16; ++i) {
    const double t = i / 16.0;
    // second derivative of [cos, -sin] is -(2 pi)^2 x*
    const Vector xddot =
        -kTwoPi * kTwoPi * ex42_system().periodic_solution.x_star(t);
    const Vector lhs = vs.base.A_of(t) * vs.source.periodic_solution.x_star_dot(t);
    CHECK((lhs - xddot).norm() <= 1e-5);
  }
}

TEST_CASE("an inconsistent analytic Jacobian is rejected") {
  auto nl = ex42_system();
  nl.jacobian = [](const Vector&) {
    return Matrix(Matrix::Identity(2, 2));  // far from the true Jacobian
  };
  CHECK_THROWS_AS(build_variational(nl), NumericalError);
}

TEST_CASE("build_variational input guards") {
  NonlinearAutonomousSystem empty;
  CHECK_THROWS_AS(build_variational(empty), std::invalid_argument);
}

TEST_CASE("unit eigenvector residuals stay small for any gain") {
  const IntegratorConfig cfg{2000};
  const auto vs = build_variational(ex42_system());
  CHECK((vs.xstar_dot0 - (Vector(2) << 0.0, -kTwoPi).finished()).norm() <=
        1e-12);

  // gain-free one-period map has x*'(0) as a fixed vector
  const Matrix phi =
      transition_matrix(vs.base, std::nullopt, 0.0, 1.0, cfg).value;
  CHECK((phi * vs.xstar_dot0 - vs.xstar_dot0).norm() / vs.xstar_dot0.norm() <=
        1e-5);

  // reference gain
  const Matrix f45 = get_example("ex42").law.gain;
  const Matrix lambda = monodromy_propagate(
      vs.base, FeedbackLaw{f45, SwitchingSchedule{1, 1, 1}}, cfg);
  CHECK(verify_unit_eigenvector(vs, lambda) <= 1e-5);

  // zero gain and random gains
  std::mt19937_64 rng(555u);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix gain(2, 2);
    for (int e = 0; e < 4; ++e) gain(e / 2, e % 2) = uniform(rng, -5.0, 5.0);
    if (trial == 0) gain.setZero();
    const Matrix lam = monodromy_propagate(
        vs.base, FeedbackLaw{gain, SwitchingSchedule{1, 1, 1}}, cfg);
    CHECK(verify_unit_eigenvector(vs, lam) <= 1e-5);
    // the spectrum itself carries a multiplier within 1e-5 of 1
    const auto eig = eigendecompose(lam);
    double gap = 1e9;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
      gap = std::min(gap, std::abs(eig.values(k) - Complex(1.0, 0.0)));
    }
    CHECK(gap <= 1e-5);
  }
}

TEST_CASE("unit eigenvector direction matches the reference") {
  const IntegratorConfig cfg;
  const auto& ex42 = get_example("ex42");
  const auto vs = build_variational(ex42_system());
  const Matrix lambda = monodromy_integral(vs.base, ex42.law.gain, cfg);
  const auto eig = eigendecompose(lambda);
  const Vector v_ref = ex42.goldens.at("v1").value;  // [0, -1]
  const double cosine =
      std::abs((eig.vectors.col(0).adjoint() * v_ref.cast<Complex>())(0, 0)) /
      v_ref.norm();
  CHECK(cosine >= 0.9999);
  // x*'(0) = [0, -2 pi] is parallel to that direction
  const double cos_dot =
      std::abs(vs.xstar_dot0.dot(v_ref)) / (vs.xstar_dot0.norm() * v_ref.norm());
  CHECK(cos_dot >= 0.999999);
}

TEST_CASE("equilibria are rejected as degenerate orbits") {
  NonlinearAutonomousSystem nl;
  nl.dim = 1;
  nl.f = [](const Vector& x) { return Vector(-x); };
  nl.periodic_solution.period = 1.0;
  nl.periodic_solution.x_star = [](double) { return Vector(Vector::Zero(1)); };
  nl.periodic_solution.x_star_dot = [](double) {
    return Vector(Vector::Zero(1));
  };
  const auto vs = build_variational(nl);
  CHECK_THROWS_AS(verify_unit_eigenvector(vs, Matrix::Identity(1, 1)),
                  PreconditionError);
}

TEST_SUITE_END();

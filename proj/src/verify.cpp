#include "aaw/verify.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "aaw/examples.hpp"
#include "aaw/floquet.hpp"
#include "aaw/simulate.hpp"
#include "aaw/variational.hpp"

namespace aaw {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// portable deterministic uniform draw (library distributions are not
// bit-stable across standard libraries)
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// |cos| between a complex unit vector and a real direction
double abs_cosine(const ComplexVector& v, const Vector& w) {
  const Complex inner = (v.adjoint() * w.cast<Complex>())(0, 0);
  return std::abs(inner) / (v.norm() * w.norm());
}

double closest_eigen_gap(const ComplexVector& values, const Complex& target) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    best = std::min(best, std::abs(values(k) - target));
  }
  return best;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(const IntegratorConfig& cfg) {
  std::vector<CriterionResult> rows;
  auto criterion = [&](int id, const std::string& name,
                       const std::string& expected, const std::string& tol,
                       auto&& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    r.expected = expected;
    r.tolerance = tol;
    try {
      body(r);
    } catch (const std::exception& e) {
      r.got = std::string("error: ") + e.what();
      r.pass = false;
    }
    rows.push_back(std::move(r));
  };

  const SpectralTolerances tol;
  const auto& ex41 = get_example("ex41");
  const auto& sys41 = std::get<LinearPeriodicSystem>(ex41.system);
  const auto& ex42 = get_example("ex42");
  const auto& nl42 = std::get<NonlinearAutonomousSystem>(ex42.system);
  const VariationalSystem var42 = build_variational(nl42);
  const Matrix gain42 = ex42.law.gain;

  // 1. uncontrolled one-period transition matrix of ex41
  criterion(1, "uncontrolled-monodromy-ex41",
            "Phi(T,0) = [[1.6487,1.2934],[0,1]]", "5e-3 abs", [&](auto& r) {
              const Matrix phi =
                  transition_matrix(sys41, std::nullopt, 0.0, sys41.period, cfg)
                      .value;
              const auto& golden = ex41.goldens.at("Phi_T");
              const double diff = max_abs_diff(phi, golden.value);
              r.got = "max|diff|=" + num(diff);
              r.pass = diff <= golden.tolerance;
            });

  // 2. controlled cycle map of ex41 and its spectrum
  criterion(2, "controlled-monodromy-ex41",
            "Lambda, eigenvalues {1, 0.0362}, unit eigenvector || [-1.9937,1]",
            "5e-3 abs, cos >= 0.9999", [&](auto& r) {
              const Matrix lambda = monodromy_integral(sys41, ex41.law.gain, cfg);
              const double mdiff =
                  max_abs_diff(lambda, ex41.goldens.at("Lambda").value);
              const auto eig = eigendecompose(lambda);
              const Vector ev_ref = ex41.goldens.at("eigenvalues").value;
              double ediff = 0;
              for (Eigen::Index k = 0; k < ev_ref.size(); ++k) {
                ediff = std::max(ediff, std::abs(eig.values(k) - ev_ref(k)));
              }
              const double cosine =
                  abs_cosine(eig.vectors.col(0), ex41.goldens.at("v1").value);
              r.got = "max|dLambda|=" + num(mdiff) + " max|dEig|=" + num(ediff) +
                      " cos=" + num(cosine);
              r.pass = mdiff <= 5e-3 && ediff <= 5e-3 && cosine >= 0.9999;
            });

  // 3. integral and propagation routes agree for the default and random gains
  criterion(3, "two-route-agreement",
            "|Lambda_int - Lambda_prop| <= 1e-6 (1 + |Lambda|), 21 gains",
            "1e-6 rel", [&](auto& r) {
              std::mt19937_64 rng(20250809u);
              std::vector<Matrix> gains{ex41.law.gain};
              for (int i = 0; i < 20; ++i) {
                Matrix f(1, 2);
                f << uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0);
                gains.push_back(f);
              }
              double worst = 0;
              for (const auto& f : gains) {
                const Matrix li = monodromy_integral(sys41, f, cfg);
                const Matrix lp = monodromy_propagate(
                    sys41, FeedbackLaw{f, SwitchingSchedule{1, 1, 1}}, cfg);
                const double gap = max_abs_diff(li, lp);
                worst = std::max(worst, gap / (1e-6 * (1.0 + li.norm())));
              }
              r.got = "worst gap / tolerance = " + num(worst);
              r.pass = worst <= 1.0;
            });

  // 4. limit prediction and simulated convergence for ex41
  criterion(4, "limit-prediction-ex41",
            "alpha1=0.9907, alpha2=-0.1178; |x(60T) - limit| < 1e-3",
            "2e-3 / 1e-3", [&](auto& r) {
              const Matrix lambda = monodromy_integral(sys41, ex41.law.gain, cfg);
              Vector x0(2);
              x0 << -1.9, 0.9;
              const auto pred = predict_limit(lambda, x0, tol);
              const Vector ref = ex41.orbit.x_star(0.0);
              const double a1 = pred.limit_point.dot(ref) / ref.squaredNorm();
              const Complex a2 = pred.alphas(1);
              const auto traj =
                  simulate_closed_loop(sys41, ex41.law, x0, 30, cfg);
              const double dist =
                  (traj.states.back() - pred.limit_point).norm();
              r.got = "alpha1=" + num(a1) + " alpha2=" + num(a2.real()) +
                      " dist=" + num(dist);
              r.pass = std::abs(a1 - 0.9907) <= 2e-3 &&
                       std::abs(a2 - Complex(-0.1178, 0.0)) <= 2e-3 &&
                       dist <= 1e-3;
            });

  // 5. variational cycle map of ex42 and its spectrum
  criterion(5, "variational-monodromy-ex42",
            "Lambda = [[-0.0093,0],[-6.5898,1]], eigenvalues {1, -0.0093}, "
            "unit eigenvector || [0,-1]",
            "5e-3 abs, cos >= 0.9999", [&](auto& r) {
              const Matrix lambda =
                  monodromy_integral(var42.base, gain42, cfg);
              const double mdiff =
                  max_abs_diff(lambda, ex42.goldens.at("Lambda").value);
              const auto eig = eigendecompose(lambda);
              const Vector ev_ref = ex42.goldens.at("eigenvalues").value;
              double ediff = 0;
              for (Eigen::Index k = 0; k < ev_ref.size(); ++k) {
                ediff = std::max(ediff, std::abs(eig.values(k) - ev_ref(k)));
              }
              const double cosine =
                  abs_cosine(eig.vectors.col(0), ex42.goldens.at("v1").value);
              r.got = "max|dLambda|=" + num(mdiff) + " max|dEig|=" + num(ediff) +
                      " cos=" + num(cosine);
              r.pass = mdiff <= 5e-3 && ediff <= 5e-3 && cosine >= 0.9999;
            });

  // 6. the unit multiplier survives any gain on the variational system
  criterion(6, "structural-unit-multiplier",
            "some |eig - 1| <= 1e-5 and |Lambda x*'(0) - x*'(0)|/|x*'(0)| <= "
            "1e-5 for 10 random gains",
            "1e-5", [&](auto& r) {
              std::mt19937_64 rng(424242u);
              double worst_gap = 0, worst_res = 0;
              for (int i = 0; i < 10; ++i) {
                Matrix f(2, 2);
                for (Eigen::Index e = 0; e < 4; ++e) {
                  f(e / 2, e % 2) = uniform(rng, -5.0, 5.0);
                }
                const Matrix lambda = monodromy_propagate(
                    var42.base, FeedbackLaw{f, SwitchingSchedule{1, 1, 1}}, cfg);
                worst_gap = std::max(
                    worst_gap,
                    closest_eigen_gap(eigendecompose(lambda).values,
                                      Complex(1.0, 0.0)));
                worst_res =
                    std::max(worst_res, verify_unit_eigenvector(var42, lambda));
              }
              r.got = "worst |eig-1|=" + num(worst_gap) +
                      " worst residual=" + num(worst_res);
              r.pass = worst_gap <= 1e-5 && worst_res <= 1e-5;
            });

  // 7. alternative schedules destabilize the same gain
  criterion(7, "alternative-schedule-instability",
            "wait1/act2 eigenvalue -25.9876, wait2/act2/delay2 eigenvalue "
            "69.4489, both Unstable",
            "2e-2 rel", [&](auto& r) {
              const Matrix lam_ghat = monodromy_propagate(
                  var42.base, FeedbackLaw{gain42, SwitchingSchedule{1, 2, 1}},
                  cfg);
              const Matrix lam_gbar = monodromy_propagate(
                  var42.base, FeedbackLaw{gain42, SwitchingSchedule{2, 2, 2}},
                  cfg);
              const double gap_ghat =
                  closest_eigen_gap(eigendecompose(lam_ghat).values,
                                    Complex(-25.9876, 0.0)) /
                  25.9876;
              const double gap_gbar =
                  closest_eigen_gap(eigendecompose(lam_gbar).values,
                                    Complex(69.4489, 0.0)) /
                  69.4489;
              const auto verdict_ghat =
                  stability_verdict(lam_ghat, 3.0, tol).verdict;
              const auto verdict_gbar =
                  stability_verdict(lam_gbar, 4.0, tol).verdict;
              r.got = "rel gaps " + num(gap_ghat) + ", " + num(gap_gbar) +
                      "; verdicts " + to_string(verdict_ghat) + ", " +
                      to_string(verdict_gbar);
              r.pass = gap_ghat <= 2e-2 && gap_gbar <= 2e-2 &&
                       verdict_ghat == Verdict::Unstable &&
                       verdict_gbar == Verdict::Unstable;
            });

  // 8. full nonlinear loop reaches the orbit and the input dies out
  criterion(8, "nonlinear-stabilization-ex42",
            "| |x| - 1 | <= 5e-3 after 40 cycles and final act-block |u| <= "
            "1e-2",
            "5e-3 / 1e-2", [&](auto& r) {
              Vector x0(2);
              x0 << 1.0, -0.05;
              const auto traj =
                  simulate_closed_loop(nl42, ex42.law, x0, 40, cfg);
              const double mag_err =
                  std::abs(traj.states.back().norm() - 1.0);
              const size_t n_per = static_cast<size_t>(cfg.steps_per_period);
              const size_t act_begin = 79 * n_per;  // last act block
              const size_t act_end = 80 * n_per;
              double max_u = 0;
              for (size_t j = act_begin; j < act_end; ++j) {
                max_u = std::max(max_u, traj.inputs[j].norm());
              }
              r.got = "| |x|-1 |=" + num(mag_err) + " max|u|=" + num(max_u);
              r.pass = mag_err <= 5e-3 && max_u <= 1e-2;
            });

  // 9. the variational cycle map predicts small nonlinear deviations
  criterion(9, "first-order-agreement",
            "|dev(2T) - Lambda dx| <= 1e-8 for |dx| = 1e-5", "1e-8 abs",
            [&](auto& r) {
              const Matrix lambda = monodromy_propagate(
                  var42.base, FeedbackLaw{gain42, SwitchingSchedule{1, 1, 1}},
                  cfg);
              // 30% radial, 70%+ tangential: off the orbit but inside the
              // first-order regime (the purely radial quadratic term is
              // ~3.6e-8 at this amplitude, outside the stated tolerance)
              Vector delta(2);
              delta << 0.3, -std::sqrt(1.0 - 0.09);
              delta *= 1e-5;
              const Vector xs0 = nl42.periodic_solution.x_star(0.0);
              const auto traj =
                  simulate_closed_loop(nl42, ex42.law, Vector(xs0 + delta), 1, cfg);
              const Vector dev = traj.states.back() - xs0;
              const double res = (dev - lambda * delta).norm();
              r.got = "residual=" + num(res);
              r.pass = res <= 1e-8;
            });

  // 10. structural property bundle
  criterion(10, "property-suite",
            "composition 1e-8, superposition 1e-7, F=0 degeneracy 1e-9, "
            "cycle map 1e-6, semisimplicity detector",
            "bundle", [&](auto& r) {
              std::vector<std::string> failures;
              const double T = sys41.period;

              const Matrix whole =
                  transition_matrix(sys41, std::nullopt, 0.0, T, cfg).value;
              const Matrix first =
                  transition_matrix(sys41, std::nullopt, 0.0, T / 2, cfg).value;
              const Matrix second =
                  transition_matrix(sys41, std::nullopt, T / 2, T, cfg).value;
              if (max_abs_diff(whole, second * first) > 1e-8) {
                failures.push_back("composition");
              }

              {
                Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
                e1(0) = 1.0;
                e2(1) = 1.0;
                const double a = -1.9, b = 0.9;
                const auto ta = simulate_closed_loop(sys41, ex41.law, e1, 2, cfg);
                const auto tb = simulate_closed_loop(sys41, ex41.law, e2, 2, cfg);
                const auto tc = simulate_closed_loop(
                    sys41, ex41.law, Vector(a * e1 + b * e2), 2, cfg);
                double worst = 0, scale = 0;
                for (size_t j = 0; j < tc.states.size(); ++j) {
                  const Vector combo = a * ta.states[j] + b * tb.states[j];
                  worst = std::max(
                      worst, (tc.states[j] - combo).cwiseAbs().maxCoeff());
                  scale = std::max(scale, tc.states[j].cwiseAbs().maxCoeff());
                }
                if (worst > 1e-7 * (1.0 + scale)) {
                  failures.push_back("superposition");
                }
              }

              const Matrix zero_gain = Matrix::Zero(1, 2);
              const Matrix lam0 = monodromy_integral(sys41, zero_gain, cfg);
              if (max_abs_diff(lam0, Matrix(whole * whole)) > 1e-9) {
                failures.push_back("zero-gain degeneracy");
              }

              {
                Vector x0(2);
                x0 << -1.9, 0.9;
                const Matrix lambda = monodromy_propagate(sys41, ex41.law, cfg);
                const auto traj =
                    simulate_closed_loop(sys41, ex41.law, x0, 5, cfg);
                const size_t stride =
                    2 * static_cast<size_t>(cfg.steps_per_period);
                double worst = 0;
                for (size_t k = 0; (k + 1) * stride < traj.states.size(); ++k) {
                  worst = std::max(
                      worst, (traj.states[(k + 1) * stride] -
                              lambda * traj.states[k * stride])
                                 .norm());
                }
                if (worst > 1e-6) failures.push_back("cycle map");
              }

              {
                const auto jordan =
                    unit_eigen_analysis((Matrix(2, 2) << 1, 1, 0, 1).finished(),
                                        tol.tol_unit);
                const auto identity =
                    unit_eigen_analysis(Matrix::Identity(3, 3), tol.tol_unit);
                if (jordan.multiplicity != 2 || jordan.semisimple ||
                    identity.multiplicity != 3 || !identity.semisimple) {
                  failures.push_back("semisimplicity detector");
                }
              }

              if (failures.empty()) {
                r.got = "5/5 properties hold";
                r.pass = true;
              } else {
                r.got = "failed:";
                for (const auto& f : failures) r.got += " " + f;
                r.pass = false;
              }
            });

  return rows;
}

std::string format_criteria_table(const std::vector<CriterionResult>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) {
    out << (r.pass ? "PASS" : "FAIL") << "  " << r.id << ". " << r.name
        << "\n      expected: " << r.expected
        << "\n      got:      " << r.got
        << "\n      tol:      " << r.tolerance << "\n";
  }
  int passed = 0;
  for (const auto& r : rows) passed += r.pass ? 1 : 0;
  out << passed << "/" << rows.size() << " criteria passed\n";
  return out.str();
}

}  // namespace aaw

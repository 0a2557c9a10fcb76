#include "aaw/examples.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aaw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix scalar1(double a) {
  Matrix m(1, 1);
  m << a;
  return m;
}

/// Linear benchmark: triangular 1-periodic coefficients with a known
/// periodic solution and one multiplier outside the unit circle.
ExampleEntry make_ex41() {
  LinearPeriodicSystem sys;
  sys.dim = 2;
  sys.input_dim = 1;
  sys.period = 1.0;
  sys.A_of = [](double t) -> Matrix {
    const double s = std::sin(kTwoPi * t), c = std::cos(kTwoPi * t);
    return mat2(0.5, 0.5, 0.0, kTwoPi * s / (2.0 - c));
  };
  sys.B_of = [](double t) -> Matrix {
    const double s = std::sin(kTwoPi * t);
    Matrix b(2, 1);
    b << 0.0, 1.0 + s * s;
    return b;
  };

  PeriodicSolution orbit;
  orbit.period = 1.0;
  orbit.x_star = [](double t) -> Vector {
    const double s = std::sin(kTwoPi * t), c = std::cos(kTwoPi * t);
    const double denom = 1.0 + 16.0 * std::numbers::pi * std::numbers::pi;
    return vec2((c - 4.0 * std::numbers::pi * s) / denom - 2.0, 2.0 - c);
  };
  orbit.x_star_dot = [](double t) -> Vector {
    const double s = std::sin(kTwoPi * t), c = std::cos(kTwoPi * t);
    const double denom = 1.0 + 16.0 * std::numbers::pi * std::numbers::pi;
    return vec2(
        (-kTwoPi * s - 4.0 * std::numbers::pi * kTwoPi * c) / denom,
        kTwoPi * s);
  };

  ExampleEntry e;
  e.name = "ex41";
  e.description =
      "linear 1-periodic system with triangular A(t), scalar input, and a "
      "known unstable periodic solution";
  e.system = sys;
  e.law = FeedbackLaw{(Matrix(1, 2) << 4.5, 0.6).finished(),
                      SwitchingSchedule{1, 1, 1}};
  e.orbit = orbit;

  e.goldens["Phi_T"] = GoldenValue{
      mat2(1.6487, 1.2934, 0.0, 1.0), 5e-3, false,
      "reference one-period transition matrix of the uncontrolled system"};
  e.goldens["Lambda"] = GoldenValue{
      mat2(1.6857, 1.3671, -0.8273, -0.6495), 5e-3, false,
      "reference cycle map for the default gain [4.5, 0.6]"};
  e.goldens["eigenvalues"] = GoldenValue{
      vec2(1.0, 0.0362), 5e-3, false,
      "reference multipliers of the default closed loop, modulus-sorted"};
  e.goldens["v1"] = GoldenValue{
      vec2(-1.9937, 1.0), 5e-3, false,
      "unit-multiplier eigenvector direction; equals x*(0)"};
  e.goldens["v2"] = GoldenValue{
      vec2(-0.6381, 0.7699), 5e-3, false,
      "stable-multiplier eigenvector, unit norm"};
  e.goldens["alphas"] = GoldenValue{
      vec2(0.9907, -0.1178), 2e-3, false,
      "coefficients of x0 = [-1.9, 0.9] along [x*(0), v2]"};
  return e;
}

NonlinearAutonomousSystem make_ex42_system() {
  NonlinearAutonomousSystem sys;
  sys.dim = 2;
  sys.f = [](const Vector& x) -> Vector {
    const double phi = x(0) * x(0) + x(1) * x(1);
    const double g = phi - phi * phi;
    return vec2(-x(0) * g + kTwoPi * x(1), -x(1) * g - kTwoPi * x(0));
  };
  sys.jacobian = [](const Vector& x) -> Matrix {
    const double phi = x(0) * x(0) + x(1) * x(1);
    const double g = phi - phi * phi;
    const double gp = 1.0 - 2.0 * phi;  // dg/dphi
    return mat2(-g - 2.0 * x(0) * x(0) * gp,
                -2.0 * x(0) * x(1) * gp + kTwoPi,
                -2.0 * x(0) * x(1) * gp - kTwoPi,
                -g - 2.0 * x(1) * x(1) * gp);
  };
  sys.periodic_solution.period = 1.0;
  sys.periodic_solution.x_star = [](double t) -> Vector {
    return vec2(std::cos(kTwoPi * t), -std::sin(kTwoPi * t));
  };
  sys.periodic_solution.x_star_dot = [](double t) -> Vector {
    return vec2(-kTwoPi * std::sin(kTwoPi * t), -kTwoPi * std::cos(kTwoPi * t));
  };
  return sys;
}

Matrix ex42_gain() {
  return mat2(0.7, 4.1, -4.1, 0.7);
}

/// Planar system with a clockwise unstable limit cycle on the unit circle.
ExampleEntry make_ex42(const std::string& name,
                       const SwitchingSchedule& schedule) {
  ExampleEntry e;
  e.name = name;
  e.description =
      "planar autonomous system with an unstable unit-circle limit cycle; "
      "analysis runs on the variational system along the orbit";
  auto sys = make_ex42_system();
  e.orbit = sys.periodic_solution;
  e.system = std::move(sys);
  e.law = FeedbackLaw{ex42_gain(), schedule};

  if (schedule.is_base()) {
    e.goldens["Lambda"] = GoldenValue{
        mat2(-0.0093, 0.0, -6.5898, 1.0), 5e-3, false,
        "reference variational cycle map for the default gain"};
    e.goldens["eigenvalues"] = GoldenValue{
        vec2(1.0, -0.0093), 5e-3, false,
        "reference multipliers, modulus-sorted"};
    e.goldens["v1"] = GoldenValue{
        vec2(0.0, -1.0), 5e-3, false,
        "unit-multiplier eigenvector direction; parallel to x*'(0)"};
    e.goldens["v2"] = GoldenValue{
        vec2(-0.1514, -0.9885), 5e-3, false,
        "stable-multiplier eigenvector direction"};
  } else if (schedule.act_periods == 2 && schedule.wait_periods == 1) {
    e.goldens["unstable_eigenvalue"] = GoldenValue{
        scalar1(-25.9876), 2e-2, true,
        "reference multiplier outside the unit circle for the wait-1/act-2 "
        "schedule with the default gain"};
  } else {
    e.goldens["unstable_eigenvalue"] = GoldenValue{
        scalar1(69.4489), 2e-2, true,
        "reference multiplier outside the unit circle for the wait-2/act-2 "
        "double-delay schedule with the default gain"};
  }
  return e;
}

const std::map<std::string, ExampleEntry>& registry() {
  static const std::map<std::string, ExampleEntry> entries = [] {
    std::map<std::string, ExampleEntry> m;
    m.emplace("ex41", make_ex41());
    m.emplace("ex42", make_ex42("ex42", SwitchingSchedule{1, 1, 1}));
    m.emplace("ex42-ghat", make_ex42("ex42-ghat", SwitchingSchedule{1, 2, 1}));
    m.emplace("ex42-gbar", make_ex42("ex42-gbar", SwitchingSchedule{2, 2, 2}));
    return m;
  }();
  return entries;
}

}  // namespace

const ExampleEntry& get_example(const std::string& name) {
  const auto& entries = registry();
  const auto it = entries.find(name);
  if (it == entries.end()) {
    std::string known;
    for (const auto& [key, value] : entries) {
      if (!known.empty()) known += ", ";
      known += key;
    }
    throw std::invalid_argument("unknown example '" + name +
                                "' (known: " + known + ")");
  }
  return it->second;
}

std::vector<std::string> example_names() {
  std::vector<std::string> names;
  for (const auto& [key, value] : registry()) names.push_back(key);
  return names;
}

LinearPeriodicSystem analysis_system(const ExampleEntry& entry) {
  if (entry.is_linear()) return std::get<LinearPeriodicSystem>(entry.system);
  return build_variational(std::get<NonlinearAutonomousSystem>(entry.system))
      .base;
}

Vector unit_eigen_direction(const ExampleEntry& entry) {
  if (entry.is_linear()) return entry.orbit.x_star(0.0);
  return entry.orbit.x_star_dot(0.0);
}

}  // namespace aaw

#include "aaw/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aaw {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json matrix_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

json complex_json(const Complex& z) {
  return json{{"re", z.real()}, {"im", z.imag()}};
}

json complex_vector_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

json real_vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json report_json(const MonodromyReport& report) {
  json eigenvectors = json::array();
  for (Eigen::Index c = 0; c < report.eigenvectors.cols(); ++c) {
    eigenvectors.push_back(
        complex_vector_json(report.eigenvectors.col(c)));
  }
  return json{{"lambda", matrix_json(report.lambda)},
              {"cycle_time", report.cycle_time},
              {"eigenvalues", complex_vector_json(report.eigenvalues)},
              {"eigenvectors", eigenvectors},
              {"kappa", report.unit_multiplicity},
              {"unit_semisimple", report.unit_semisimple},
              {"spectral_radius_excl_unit", report.spectral_radius_excl_unit},
              {"verdict", to_string(report.verdict)}};
}

json search_result_json(const GainSearchResult& result) {
  json stable = json::array();
  for (const auto& candidate : result.stable) {
    stable.push_back(json{{"gain", matrix_json(candidate.gain)},
                          {"objective", candidate.objective}});
  }
  return json{{"best_gain", matrix_json(result.best_gain)},
              {"best_objective", result.best_objective},
              {"verdict", to_string(result.verdict)},
              {"evaluation_count", result.evaluation_count},
              {"stable_candidates", stable}};
}

std::string trajectory_csv(const Trajectory& trajectory) {
  const auto n = trajectory.states.empty() ? 0 : trajectory.states[0].size();
  const auto m = trajectory.inputs.empty() ? 0 : trajectory.inputs[0].size();
  std::string out = "t";
  for (Eigen::Index i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < m; ++i) out += ",u" + std::to_string(i + 1);
  out += ",switch\n";
  for (size_t row = 0; row < trajectory.times.size(); ++row) {
    out += format_double(trajectory.times[row]);
    for (Eigen::Index i = 0; i < n; ++i) {
      out += ',';
      out += format_double(trajectory.states[row](i));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      out += ',';
      out += format_double(trajectory.inputs[row](i));
    }
    out += ',';
    out += std::to_string(switch_value(trajectory.schedule,
                                       trajectory.times[row],
                                       trajectory.period));
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& path) {
  write_text_file(path, trajectory_csv(trajectory));
}

ParsedTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path);

  int n = 0, m = 0;
  {
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) {
      if (field.size() > 1 && field[0] == 'x') ++n;
      if (field.size() > 1 && field[0] == 'u') ++m;
    }
  }

  ParsedTrajectory out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(row, field, ',')) values.push_back(std::stod(field));
    if (static_cast<int>(values.size()) != 1 + n + m + 1) {
      throw std::runtime_error("malformed csv row in " + path);
    }
    out.times.push_back(values[0]);
    Vector x(n), u(m);
    for (int i = 0; i < n; ++i) x(i) = values[static_cast<size_t>(1 + i)];
    for (int i = 0; i < m; ++i) u(i) = values[static_cast<size_t>(1 + n + i)];
    out.states.push_back(std::move(x));
    out.inputs.push_back(std::move(u));
    out.switches.push_back(static_cast<int>(values.back()));
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace aaw

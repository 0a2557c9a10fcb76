#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "aaw/floquet.hpp"
#include "aaw/gainsearch.hpp"
#include "aaw/simulate.hpp"
#include "aaw/types.hpp"

namespace aaw {

inline constexpr std::string_view kVersion = "0.1.0";

/// Doubles are serialized with 17 significant digits so a written value
/// parses back bit-exactly.
std::string format_double(double v);

/// Matrices serialize row-major with explicit shape; complex numbers as
/// {re, im} objects.
nlohmann::json matrix_json(const Matrix& m);
nlohmann::json complex_json(const Complex& z);
nlohmann::json complex_vector_json(const ComplexVector& v);
nlohmann::json real_vector_json(const Vector& v);

nlohmann::json report_json(const MonodromyReport& report);
nlohmann::json search_result_json(const GainSearchResult& result);

/// CSV with header t,x1,...,xn,u1,...,um,switch and one row per grid node.
std::string trajectory_csv(const Trajectory& trajectory);
void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& path);

struct ParsedTrajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  std::vector<int> switches;
};

ParsedTrajectory read_trajectory_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace aaw

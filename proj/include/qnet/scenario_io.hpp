#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qnet/bell.hpp"
#include "qnet/network.hpp"
#include "qnet/optimize.hpp"

namespace qnet::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

struct ParsedScenario {
  Scenario scenario;
  OptimizeConfig optimize;
  std::string digest;  // of the raw document text
};

/// FNV-1a 64-bit digest, as 16 lowercase hex digits.
std::string input_digest(std::string_view text);

ParsedScenario parse_scenario(const std::string& path);
ParsedScenario parse_scenario_text(const std::string& text);
ParsedScenario parse_scenario_json(const Json& doc, const std::string& digest = "");

/// Topology only; `analyze` does not need observables or states.
NetworkTopology parse_topology(const Json& doc);
Json read_document(const std::string& path);
Json parse_document(const std::string& text);

Matrix parse_matrix(const Json& node, const std::string& path);
Json matrix_to_json(const Matrix& m);
ObservableParams parse_params(const Json& node, const std::string& path);
/// Scenario-file form {"kind": "params", ...}; theta keeps full precision.
Json params_to_json(const ObservableParams& p);
OptimizeConfig parse_optimize_config(const Json& node, const NetworkTopology& topology,
                                     OptimizeConfig base = {});

/// Value rounded to 9 significant digits, the precision of every report scalar.
double round9(double x);

Json report_header(const std::string& kind, const std::string& digest);

Json to_json(const IndependenceReport& r, const NetworkTopology& topology);
Json to_json(const BellReport& r, const NetworkTopology& topology);
Json to_json(const CertificateReport& r, const NetworkTopology& topology);
Json to_json(const OptimizationResult& r, const NetworkTopology& topology);
Json correlations_to_json(const Scenario& scenario);

IndependenceReport independence_from_json(const Json& j);
BellReport bell_from_json(const Json& j);
CertificateReport certificate_from_json(const Json& j);
OptimizationResult optimization_from_json(const Json& j);

/// Observables block of an optimize report, ready to replace the
/// "observables" key of a scenario file.
Json observables_to_json(const std::vector<ParamsPair>& params, const NetworkTopology& topology);

/// Aligned key/value rendering of a report.
std::string to_table(const Json& report);

}  // namespace qnet::io

#ifndef RESAVG_REPORT_HPP
#define RESAVG_REPORT_HPP

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "resavg/geometry.hpp"

namespace resavg {

enum class Algorithm { ProximalPoint, Alternating, CompositionEF, CompositionFE, All };

Algorithm algorithm_from_string(const std::string& s);
const char* to_string(Algorithm a);

struct OutputFlags {
  bool trace = true;
  bool geometry = true;
  bool dual_check = true;
};

// Config parsing problems carry the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A fully validated experiment: two operators, weights, starting point,
// algorithm selection and stopping/output policy.
struct ExperimentConfig {
  MonotoneOperator a1;
  MonotoneOperator a2;
  Weights w;
  Algorithm algorithm;
  Point x0;
  StoppingRule stopping;
  OutputFlags outputs;
  std::uint64_t seed = 0;
  nlohmann::json echo;  // the document the config was parsed from

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::filesystem::path& path);
};

struct AlgorithmRun {
  std::string name;
  IterationTrace trace;
  std::optional<IterationTrace> trace_secondary;  // alternating keeps both
  Point fix_estimate;
  double wall_seconds = 0.0;  // console-only; not serialized
};

struct CheckRow {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ReportBundle {
  nlohmann::json config_echo;
  std::vector<AlgorithmRun> runs;
  std::optional<GeometryReport> geometry;
  std::vector<CheckRow> checks;
  bool diverged = false;
  bool keep_iterates = true;

  bool all_pass() const;
};

// Executes the configured algorithms, assembles the geometry report and the
// pass/fail table. Deterministic for a fixed config and seed.
ReportBundle run_config(const ExperimentConfig& cfg);

// Builds one of the three named catalog fixtures (disk_line, quadratics,
// abs_quadratic) at the given first weight and runs everything.
ReportBundle run_example(const std::string& name, double lambda1,
                         const StoppingRule& rule = StoppingRule{},
                         std::uint64_t seed = 0);

// Canonical JSON form of a bundle; stable byte-for-byte for a fixed config
// and seed (timings are excluded).
nlohmann::json bundle_to_json(const ReportBundle& b);
ReportBundle bundle_from_json(const nlohmann::json& j);

enum class ReportFormat { Json, Csv };

// json: <dir>/report.json with the full bundle. csv: one trace_<name>.csv per
// trace plus summary.csv with one identity,residual,tolerance,pass row per
// check.
void emit_report(const ReportBundle& b, ReportFormat fmt,
                 const std::filesystem::path& dir);

}  // namespace resavg

#endif  // RESAVG_REPORT_HPP

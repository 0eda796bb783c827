// Command-line runner: reproduces the catalog fixtures or an arbitrary
// config, verifies the fixed-point geometry identities and emits traces plus
// a pass/fail summary.
//
// Exit codes: 0 all checks pass, 1 check failure, 2 usage or parse error,
// 3 solver divergence.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "resavg/report.hpp"

namespace {

int finish(const resavg::ReportBundle& bundle, const std::string& format,
           const std::optional<std::string>& out_dir) {
  using namespace resavg;

  if (out_dir) {
    emit_report(bundle, format == "csv" ? ReportFormat::Csv : ReportFormat::Json,
                *out_dir);
  } else {
    std::cout << bundle_to_json(bundle).dump(2) << "\n";
  }

  for (const AlgorithmRun& run : bundle.runs) {
    std::cerr << run.name << ": " << to_string(run.trace.status) << " in "
              << run.trace.iterations_used << " iterations ("
              << run.wall_seconds * 1e3 << " ms)\n";
  }
  int failures = 0;
  for (const CheckRow& c : bundle.checks) {
    if (!c.pass) {
      ++failures;
      std::cerr << "check failed: " << c.name << " residual " << c.residual
                << " > tolerance " << c.tolerance << "\n";
    }
  }

  if (bundle.diverged) return 3;
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed points of resolvent averages and compositions"};
  app.require_subcommand(1);

  std::string example_name;
  double lambda1 = 0.5;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::string format = "json";
  std::optional<std::uint64_t> seed;

  CLI::App* ex = app.add_subcommand("run-example", "Run a named catalog fixture");
  ex->add_option("name", example_name, "disk_line, quadratics or abs_quadratic")
      ->required();
  ex->add_option("--lambda1", lambda1, "first weight, in (0,1)")->required();

  CLI::App* rc = app.add_subcommand("run-config", "Run an experiment config file");
  rc->add_option("path", config_path, "JSON config path")->required();

  for (CLI::App* sub : {ex, rc}) {
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", seed, "seed for sampled verifications");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (format == "csv" && !out_dir) {
    std::cerr << "error: --format csv requires --out\n";
    return 2;
  }

  try {
    using namespace resavg;
    ReportBundle bundle = [&] {
      if (ex->parsed()) {
        if (!(lambda1 > 0.0 && lambda1 < 1.0)) {
          throw ConfigError("--lambda1 must lie strictly between 0 and 1");
        }
        return run_example(example_name, lambda1, StoppingRule{},
                           seed.value_or(0));
      }
      ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
      if (seed) {
        cfg.seed = *seed;
        cfg.echo["seed"] = *seed;
      }
      return run_config(cfg);
    }();
    return finish(bundle, format, out_dir);
  } catch (const resavg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

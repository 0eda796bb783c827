#include "resavg/report.hpp"

#include <charconv>
#include <chrono>
#include <fstream>

namespace resavg {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

json point_to_json(const Point& p) {
  json a = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

Point point_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError("field '" + field + "' must be a non-empty array of numbers");
  }
  Point p(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw ConfigError("field '" + field + "' must contain numbers only");
    }
    p[i++] = v.get<double>();
  }
  return p;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError("field '" + field + "' must be an array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError("field '" + field + "' must be rectangular");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row[static_cast<size_t>(c)].get<double>();
    }
  }
  return m;
}

const json& require_field(const json& j, const std::string& key,
                          const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError("missing field '" + key + "' in " + context);
  }
  return *it;
}

MonotoneOperator operator_from_json(const json& j, const std::string& which) {
  if (!j.is_object()) throw ConfigError(which + " must be an object");
  std::string variant = require_field(j, "variant", which).get<std::string>();
  double divisor = j.value("divisor", 1.0);
  try {
    if (variant == "quadratic") {
      Matrix Q = matrix_from_json(require_field(j, "Q", which), which + ".Q");
      Point q = point_from_json(require_field(j, "q", which), which + ".q");
      double c = j.value("c", 0.0);
      return MonotoneOperator::subdifferential(
          ConvexFunction(Quadratic{Q, q, c}, divisor));
    }
    if (variant == "abs_sum") {
      return MonotoneOperator::subdifferential(ConvexFunction(
          AbsSum{point_from_json(require_field(j, "weights", which),
                                 which + ".weights")},
          divisor));
    }
    if (variant == "box") {
      return MonotoneOperator::subdifferential(ConvexFunction(
          IndicatorBox{point_from_json(require_field(j, "lo", which), which + ".lo"),
                       point_from_json(require_field(j, "hi", which), which + ".hi")},
          divisor));
    }
    if (variant == "ball") {
      return MonotoneOperator::subdifferential(ConvexFunction(
          IndicatorBall{point_from_json(require_field(j, "center", which),
                                        which + ".center"),
                        require_field(j, "radius", which).get<double>()},
          divisor));
    }
    if (variant == "halfspace") {
      return MonotoneOperator::subdifferential(ConvexFunction(
          IndicatorHalfspace{point_from_json(require_field(j, "normal", which),
                                             which + ".normal"),
                             require_field(j, "offset", which).get<double>()},
          divisor));
    }
    if (variant == "affine_set") {
      return MonotoneOperator::subdifferential(ConvexFunction(
          IndicatorAffine{point_from_json(require_field(j, "anchor", which),
                                          which + ".anchor"),
                          matrix_from_json(require_field(j, "basis", which),
                                           which + ".basis")},
          divisor));
    }
    if (variant == "point") {
      return MonotoneOperator::subdifferential(ConvexFunction(
          IndicatorPoint{point_from_json(require_field(j, "p", which), which + ".p")},
          divisor));
    }
    if (variant == "affine_operator") {
      return MonotoneOperator::affine(
          matrix_from_json(require_field(j, "M", which), which + ".M"),
          point_from_json(require_field(j, "b", which), which + ".b"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(which + ": " + e.what());
  }
  throw ConfigError(which + ": unsupported variant '" + variant + "'");
}

IterStatus status_from_string(const std::string& s) {
  if (s == "converged") return IterStatus::Converged;
  if (s == "max_iters") return IterStatus::MaxIters;
  if (s == "diverged") return IterStatus::Diverged;
  throw ConfigError("unknown iteration status '" + s + "'");
}

json trace_to_json(const IterationTrace& tr, bool keep_iterates) {
  json j;
  j["status"] = to_string(tr.status);
  j["iterations_used"] = tr.iterations_used;
  j["final"] = point_to_json(tr.final);
  if (keep_iterates) {
    json its = json::array();
    for (const Point& p : tr.iterates) its.push_back(point_to_json(p));
    j["iterates"] = its;
    j["step_norms"] = tr.step_norms;
  }
  return j;
}

IterationTrace trace_from_json(const json& j) {
  IterationTrace tr;
  tr.status = status_from_string(j.at("status").get<std::string>());
  tr.iterations_used = j.at("iterations_used").get<int>();
  tr.final = point_from_json(j.at("final"), "final");
  if (j.contains("iterates")) {
    for (const auto& p : j.at("iterates")) {
      tr.iterates.push_back(point_from_json(p, "iterates"));
    }
    tr.step_norms = j.at("step_norms").get<std::vector<double>>();
  }
  return tr;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void append_dual_checks(ReportBundle& b, const ExperimentConfig& cfg) {
  if (!cfg.a1.is_subdifferential() || !cfg.a2.is_subdifferential()) return;
  const ConvexFunction& f1 = cfg.a1.function();
  const ConvexFunction& f2 = cfg.a2.function();
  if (f1.divisor() != 1.0 || f2.divisor() != 1.0) return;
  const GeometryReport& g = *b.geometry;
  const double l1 = cfg.w.lambda1, l2 = cfg.w.lambda2;

  Point phi = g.gap.phi_bar;
  double dual = dual_objective(f1, f2, cfg.w, phi).value();

  // Strong duality: the primal value at the S pair equals minus the dual
  // optimum.
  double primal = eval(f1, g.s_rep.first).value() / l2 +
                  eval(f2, g.s_rep.second).value() / l1 +
                  0.5 * (g.s_rep.first - g.s_rep.second).squaredNorm();
  double gap_tol = 1e-7 * (1.0 + std::abs(primal));
  double gap_res = std::abs(primal + dual);
  b.checks.push_back({"duality_gap", gap_res, gap_tol, gap_res <= gap_tol});

  // phi_bar must not be beaten by nearby dual points.
  double worst = 0.0;
  for (double delta : {1e-3, 1e-2, 1e-1}) {
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        Point probe = phi;
        probe[i] += sign * delta;
        ExtReal v = dual_objective(f1, f2, cfg.w, probe);
        if (v.finite()) worst = std::max(worst, dual - v.value());
      }
    }
  }
  double min_tol = 1e-9 * (1.0 + std::abs(dual));
  b.checks.push_back({"dual_local_min", worst, min_tol, worst <= min_tol});

  bool sub = verify_subgradient_characterization(f1, f2, cfg.w, g, 1e-7, 500,
                                                 cfg.seed + 0x9e3779b9ULL);
  b.checks.push_back({"subgradient_characterization", sub ? 0.0 : 1.0, 0.5, sub});
}

}  // namespace

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "proximal_point") return Algorithm::ProximalPoint;
  if (s == "alternating") return Algorithm::Alternating;
  if (s == "composition_EF") return Algorithm::CompositionEF;
  if (s == "composition_FE") return Algorithm::CompositionFE;
  if (s == "all") return Algorithm::All;
  throw ConfigError("unknown algorithm '" + s + "'");
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ProximalPoint: return "proximal_point";
    case Algorithm::Alternating: return "alternating";
    case Algorithm::CompositionEF: return "composition_EF";
    case Algorithm::CompositionFE: return "composition_FE";
    case Algorithm::All: return "all";
  }
  return "unknown";
}

bool ReportBundle::all_pass() const {
  if (diverged) return false;
  for (const CheckRow& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const json& problem = require_field(j, "problem", "config");
  auto dimension = require_field(problem, "dimension", "problem").get<Eigen::Index>();

  const json& j1 = problem.contains("f1") ? problem.at("f1")
                                          : require_field(problem, "a1", "problem");
  const json& j2 = problem.contains("f2") ? problem.at("f2")
                                          : require_field(problem, "a2", "problem");
  MonotoneOperator a1 = operator_from_json(j1, "problem.f1");
  MonotoneOperator a2 = operator_from_json(j2, "problem.f2");
  if (a1.dim() != dimension || a2.dim() != dimension) {
    throw ConfigError("operator dimensions disagree with problem.dimension");
  }

  double lambda1 =
      require_field(require_field(j, "weights", "config"), "lambda1", "weights")
          .get<double>();
  if (!(lambda1 > 0.0 && lambda1 < 1.0)) {
    throw ConfigError("weights.lambda1 must lie strictly between 0 and 1");
  }

  Algorithm alg = algorithm_from_string(
      require_field(j, "algorithm", "config").get<std::string>());

  Point x0 = point_from_json(require_field(j, "x0", "config"), "x0");
  if (x0.size() != dimension) {
    throw ConfigError("x0 dimension disagrees with problem.dimension");
  }

  StoppingRule rule;
  if (j.contains("stopping")) {
    const json& s = j.at("stopping");
    rule.step_tol = s.value("step_tol", rule.step_tol);
    rule.residual_tol = s.value("residual_tol", rule.residual_tol);
    rule.max_iters = s.value("max_iters", rule.max_iters);
    rule.divergence_norm = s.value("divergence_norm", rule.divergence_norm);
    rule.trace_stride = s.value("trace_stride", rule.trace_stride);
    try {
      rule.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("stopping: ") + e.what());
    }
  }

  OutputFlags out;
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    out.trace = o.value("trace", true);
    out.geometry = o.value("geometry", true);
    out.dual_check = o.value("dual_check", true);
  }

  std::uint64_t seed = j.value("seed", 0ULL);

  try {
    Weights w(lambda1);
    return ExperimentConfig{std::move(a1), std::move(a2), w, alg,
                            std::move(x0), rule,          out, seed, j};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("weights: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

ReportBundle run_config(const ExperimentConfig& cfg) {
  ReportBundle b;
  b.config_echo = cfg.echo;
  b.keep_iterates = cfg.outputs.trace;

  std::vector<Algorithm> algs;
  if (cfg.algorithm == Algorithm::All) {
    algs = {Algorithm::ProximalPoint, Algorithm::Alternating,
            Algorithm::CompositionEF, Algorithm::CompositionFE};
  } else {
    algs = {cfg.algorithm};
  }

  for (Algorithm a : algs) {
    Timer timer;
    AlgorithmRun run;
    run.name = to_string(a);
    switch (a) {
      case Algorithm::ProximalPoint: {
        ResolventAverage ra(cfg.a1, cfg.a2, cfg.w);
        run.trace = run_proximal_point(ra, cfg.x0, cfg.stopping);
        run.fix_estimate = run.trace.final;
        break;
      }
      case Algorithm::Alternating: {
        AlternatingResult alt =
            run_alternating(cfg.a1, cfg.a2, cfg.w, cfg.x0, cfg.stopping);
        run.trace = std::move(alt.trace_x);
        run.trace_secondary = std::move(alt.trace_y);
        run.fix_estimate = alt.averaged_limit;
        break;
      }
      case Algorithm::CompositionEF:
      case Algorithm::CompositionFE: {
        CompositionResult comp = run_composition(
            cfg.a1, cfg.a2, cfg.w,
            a == Algorithm::CompositionEF ? CompositionOrder::EF
                                          : CompositionOrder::FE,
            cfg.x0, cfg.stopping);
        run.trace = std::move(comp.trace);
        run.fix_estimate = comp.recovered_fix;
        break;
      }
      case Algorithm::All: break;
    }
    run.wall_seconds = timer.seconds();
    if (run.trace.status == IterStatus::Diverged) b.diverged = true;
    b.runs.push_back(std::move(run));
  }

  if (b.diverged) return b;

  if (cfg.outputs.geometry) {
    try {
      b.geometry = compute_geometry(cfg.a1, cfg.a2, cfg.w, cfg.x0, cfg.stopping);
    } catch (const EmptyFixedPointSets& e) {
      if (e.reason() == EmptyFixedPointSets::Reason::Diverged) {
        b.diverged = true;
        return b;
      }
      b.checks.push_back({"geometry_computed", 1.0, 0.0, false});
    }
    if (b.geometry) {
      for (const auto& [name, res] : b.geometry->identity_residuals) {
        b.checks.push_back(
            {name, res, b.geometry->tolerance, res <= b.geometry->tolerance});
      }
      if (cfg.outputs.dual_check) append_dual_checks(b, cfg);
    }
  }

  if (b.runs.size() >= 2) {
    double worst = 0.0;
    for (const AlgorithmRun& r : b.runs) {
      for (const AlgorithmRun& s : b.runs) {
        worst = std::max(worst, (r.fix_estimate - s.fix_estimate).norm());
      }
    }
    b.checks.push_back({"recovery_consistency", worst, 1e-6, worst <= 1e-6});
  }
  return b;
}

ReportBundle run_example(const std::string& name, double lambda1,
                         const StoppingRule& rule, std::uint64_t seed) {
  json problem;
  json x0;
  if (name == "disk_line") {
    problem["dimension"] = 2;
    problem["f1"] = {{"variant", "ball"}, {"center", {0.0, 2.0}}, {"radius", 1.0}};
    problem["f2"] = {{"variant", "affine_set"},
                     {"anchor", {0.0, 0.0}},
                     {"basis", {{1.0}, {0.0}}}};
    x0 = {5.0, 7.0};
  } else if (name == "quadratics") {
    problem["dimension"] = 1;
    problem["f1"] = {{"variant", "quadratic"}, {"Q", {{2.0}}}, {"q", {0.0}}, {"c", 0.0}};
    problem["f2"] = {{"variant", "quadratic"}, {"Q", {{2.0}}}, {"q", {-2.0}}, {"c", 1.0}};
    x0 = {10.0};
  } else if (name == "abs_quadratic") {
    problem["dimension"] = 1;
    problem["f1"] = {{"variant", "abs_sum"}, {"weights", {1.0}}};
    problem["f2"] = {{"variant", "quadratic"}, {"Q", {{2.0}}}, {"q", {-2.0}}, {"c", 1.0}};
    x0 = {7.0};
  } else {
    throw ConfigError("unknown example '" + name + "'");
  }

  json doc;
  doc["problem"] = problem;
  doc["weights"] = {{"lambda1", lambda1}};
  doc["algorithm"] = "all";
  doc["x0"] = x0;
  doc["stopping"] = {{"step_tol", rule.step_tol},
                     {"residual_tol", rule.residual_tol},
                     {"max_iters", rule.max_iters},
                     {"divergence_norm", rule.divergence_norm},
                     {"trace_stride", rule.trace_stride}};
  doc["outputs"] = {{"trace", true}, {"geometry", true}, {"dual_check", true}};
  doc["seed"] = seed;
  return run_config(ExperimentConfig::from_json(doc));
}

json bundle_to_json(const ReportBundle& b) {
  json j;
  j["config"] = b.config_echo;
  j["diverged"] = b.diverged;
  j["all_pass"] = b.all_pass();

  json runs = json::array();
  for (const AlgorithmRun& r : b.runs) {
    json jr;
    jr["algorithm"] = r.name;
    jr["trace"] = trace_to_json(r.trace, b.keep_iterates);
    if (r.trace_secondary) {
      jr["trace_secondary"] = trace_to_json(*r.trace_secondary, b.keep_iterates);
    }
    jr["fix_estimate"] = point_to_json(r.fix_estimate);
    runs.push_back(std::move(jr));
  }
  j["runs"] = runs;

  if (b.geometry) {
    const GeometryReport& g = *b.geometry;
    json jg;
    jg["e_rep"] = point_to_json(g.e_rep);
    jg["f_rep"] = point_to_json(g.f_rep);
    jg["s_rep"] = {point_to_json(g.s_rep.first), point_to_json(g.s_rep.second)};
    jg["fix_rep"] = point_to_json(g.fix_rep);
    jg["u_star"] = point_to_json(g.gap.u_star);
    jg["v_star"] = point_to_json(g.gap.v_star);
    jg["phi_bar"] = point_to_json(g.gap.phi_bar);
    jg["tolerance"] = g.tolerance;
    jg["identity_residuals"] = g.identity_residuals;
    j["geometry"] = jg;
  }

  json checks = json::array();
  for (const CheckRow& c : b.checks) {
    checks.push_back({{"name", c.name},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  }
  j["checks"] = checks;
  return j;
}

ReportBundle bundle_from_json(const json& j) {
  ReportBundle b;
  b.config_echo = j.at("config");
  b.diverged = j.at("diverged").get<bool>();

  for (const auto& jr : j.at("runs")) {
    AlgorithmRun r;
    r.name = jr.at("algorithm").get<std::string>();
    r.trace = trace_from_json(jr.at("trace"));
    if (jr.contains("trace_secondary")) {
      r.trace_secondary = trace_from_json(jr.at("trace_secondary"));
    }
    r.fix_estimate = point_from_json(jr.at("fix_estimate"), "fix_estimate");
    b.runs.push_back(std::move(r));
    b.keep_iterates = jr.at("trace").contains("iterates");
  }

  if (j.contains("geometry")) {
    GeometryReport g;
    const json& jg = j.at("geometry");
    g.e_rep = point_from_json(jg.at("e_rep"), "e_rep");
    g.f_rep = point_from_json(jg.at("f_rep"), "f_rep");
    g.s_rep = {point_from_json(jg.at("s_rep")[0], "s_rep"),
               point_from_json(jg.at("s_rep")[1], "s_rep")};
    g.fix_rep = point_from_json(jg.at("fix_rep"), "fix_rep");
    g.gap.u_star = point_from_json(jg.at("u_star"), "u_star");
    g.gap.v_star = point_from_json(jg.at("v_star"), "v_star");
    g.gap.phi_bar = point_from_json(jg.at("phi_bar"), "phi_bar");
    g.tolerance = jg.at("tolerance").get<double>();
    g.identity_residuals =
        jg.at("identity_residuals").get<std::map<std::string, double>>();
    b.geometry = std::move(g);
  }

  for (const auto& jc : j.at("checks")) {
    b.checks.push_back({jc.at("name").get<std::string>(),
                        jc.at("residual").get<double>(),
                        jc.at("tolerance").get<double>(),
                        jc.at("pass").get<bool>()});
  }
  return b;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << content;
}

std::string trace_csv(const IterationTrace& tr, int stride) {
  std::string csv = "iter,step_norm";
  const Eigen::Index n = tr.final.size();
  for (Eigen::Index c = 0; c < n; ++c) {
    csv += ",coord_" + std::to_string(c);
  }
  csv += "\n";
  for (size_t idx = 0; idx < tr.iterates.size(); ++idx) {
    int iter = idx + 1 < tr.iterates.size() ? static_cast<int>(idx) * stride
                                            : tr.iterations_used;
    double step = iter == 0 ? 0.0 : tr.step_norms[static_cast<size_t>(iter) - 1];
    csv += std::to_string(iter) + "," + fmt_double(step);
    for (Eigen::Index c = 0; c < n; ++c) {
      csv += "," + fmt_double(tr.iterates[idx][c]);
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace

void emit_report(const ReportBundle& b, ReportFormat fmt,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (fmt == ReportFormat::Json) {
    write_file(dir / "report.json", bundle_to_json(b).dump(2) + "\n");
    return;
  }

  int stride = 1;
  if (b.config_echo.contains("stopping")) {
    stride = b.config_echo.at("stopping").value("trace_stride", 1);
  }
  for (const AlgorithmRun& r : b.runs) {
    write_file(dir / ("trace_" + r.name + ".csv"), trace_csv(r.trace, stride));
    if (r.trace_secondary) {
      write_file(dir / ("trace_" + r.name + "_y.csv"),
                 trace_csv(*r.trace_secondary, stride));
    }
  }
  std::string summary = "identity,residual,tolerance,pass\n";
  for (const CheckRow& c : b.checks) {
    summary += c.name + "," + fmt_double(c.residual) + "," + fmt_double(c.tolerance) +
               "," + (c.pass ? "true" : "false") + "\n";
  }
  write_file(dir / "summary.csv", summary);
}

}  // namespace resavg

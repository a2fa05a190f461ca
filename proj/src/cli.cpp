#include "csim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "csim/certify.hpp"
#include "csim/spectrum.hpp"

namespace csim {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }))
      throw ConfigError("unknown key: " + path + key);
  }
}

double require_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError("missing key: " + path + key);
  if (!obj[key].is_number()) throw ConfigError("not a number: " + path + key);
  return obj[key].get<double>();
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  reject_unknown(doc, "", {"system", "integrator", "command"});
  if (!doc.contains("system") || !doc["system"].is_object())
    throw ConfigError("missing object: system");

  const json& sys = doc["system"];
  reject_unknown(sys, "system.", {"kind", "b", "a", "alpha", "beta"});
  if (!sys.contains("kind") || !sys["kind"].is_string())
    throw ConfigError("missing key: system.kind");
  cfg.kind = sys["kind"].get<std::string>();

  if (cfg.kind == "lotka_volterra") {
    if (!sys.contains("b") || !sys["b"].is_array())
      throw ConfigError("system.b: expected an array of positive rates");
    cfg.b = sys["b"].get<Vec>();
    const int n = static_cast<int>(cfg.b.size());
    if (n < 2) throw ConfigError("system.b: need at least two species");
    if (!sys.contains("a") || !sys["a"].is_array())
      throw ConfigError("system.a: expected an n x n array of arrays");
    cfg.a = Mat(n, n);
    const auto& rows = sys["a"];
    if (static_cast<int>(rows.size()) != n)
      throw ConfigError("system.a: row count must match the length of system.b");
    for (int r = 0; r < n; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n)
        throw ConfigError("system.a: row " + std::to_string(r) +
                          " must have one entry per species");
      for (int c = 0; c < n; ++c) cfg.a(r, c) = rows[r][c].get<double>();
    }
    for (double v : cfg.b)
      if (!(v > 0.0)) throw ConfigError("system.b: entries must be positive");
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (!(cfg.a(r, c) > 0.0)) throw ConfigError("system.a: entries must be positive");
  } else if (cfg.kind == "may_leonard") {
    cfg.alpha = require_number(sys, "system.", "alpha");
    cfg.beta = require_number(sys, "system.", "beta");
    if (!(cfg.alpha > 1.0))
      throw ConfigError("system.alpha: the cyclic family needs alpha > 1");
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0))
      throw ConfigError("system.beta: the cyclic family needs 0 < beta < 1");
    if (!(cfg.alpha + cfg.beta > 2.0))
      throw ConfigError("system.alpha: the cyclic family needs alpha + beta > 2");
  } else if (cfg.kind == "builtin_demo") {
    // Fixed three-species weak-coupling benchmark; no parameters.
  } else {
    throw ConfigError("system.kind: expected lotka_volterra, may_leonard, or "
                      "builtin_demo");
  }

  if (doc.contains("integrator")) {
    const json& integ = doc["integrator"];
    reject_unknown(integ, "integrator.",
                   {"method", "step", "abs_tol", "rel_tol", "max_step"});
    if (integ.contains("method")) {
      const std::string m = integ["method"].get<std::string>();
      if (m == "rk4_fixed")
        cfg.integrator.method = IntegratorConfig::Method::rk4_fixed;
      else if (m == "rk45_adaptive")
        cfg.integrator.method = IntegratorConfig::Method::rk45_adaptive;
      else
        throw ConfigError("integrator.method: expected rk4_fixed or rk45_adaptive");
    }
    if (integ.contains("step")) cfg.integrator.step = require_number(integ, "integrator.", "step");
    if (integ.contains("abs_tol"))
      cfg.integrator.abs_tol = require_number(integ, "integrator.", "abs_tol");
    if (integ.contains("rel_tol"))
      cfg.integrator.rel_tol = require_number(integ, "integrator.", "rel_tol");
    if (integ.contains("max_step"))
      cfg.integrator.max_step = require_number(integ, "integrator.", "max_step");
    if (cfg.integrator.step <= 0.0 || cfg.integrator.abs_tol <= 0.0 ||
        cfg.integrator.rel_tol <= 0.0 || cfg.integrator.max_step <= 0.0)
      throw ConfigError("integrator: all numeric settings must be positive");
  }

  if (doc.contains("command")) {
    const json& cmd = doc["command"];
    reject_unknown(cmd, "command.",
                   {"m", "k", "eta", "T", "T_permanence", "n_starts",
                    "permanence_floor", "seed", "out_dir"});
    if (cmd.contains("m")) cfg.m = cmd["m"].get<int>();
    if (cmd.contains("k")) cfg.k = cmd["k"].get<int>();
    if (cmd.contains("eta")) cfg.eta = require_number(cmd, "command.", "eta");
    if (cmd.contains("T")) cfg.T = require_number(cmd, "command.", "T");
    if (cmd.contains("T_permanence"))
      cfg.T_permanence = require_number(cmd, "command.", "T_permanence");
    if (cmd.contains("n_starts")) cfg.n_starts = cmd["n_starts"].get<int>();
    if (cmd.contains("permanence_floor"))
      cfg.permanence_floor = require_number(cmd, "command.", "permanence_floor");
    if (cmd.contains("seed")) cfg.seed = cmd["seed"].get<std::uint64_t>();
    if (cmd.contains("out_dir")) cfg.out_dir = cmd["out_dir"].get<std::string>();
    if (cfg.m < 1 || cfg.m > 400) throw ConfigError("command.m: expected 1..400");
    if (cfg.k < 0 || cfg.k > 16) throw ConfigError("command.k: expected 0..16");
    if (cfg.eta < 0.0) throw ConfigError("command.eta: must be nonnegative");
    if (cfg.T <= 0.0 || cfg.T_permanence <= 0.0)
      throw ConfigError("command.T: horizons must be positive");
    if (cfg.n_starts < 1) throw ConfigError("command.n_starts: need at least one");
  }
  return cfg;
}

json config_json(const RunConfig& cfg) {
  json sys;
  sys["kind"] = cfg.kind;
  if (cfg.kind == "lotka_volterra") {
    sys["b"] = cfg.b;
    std::vector<Vec> rows;
    for (int r = 0; r < cfg.a.rows(); ++r) {
      Vec row(cfg.a.cols());
      for (int c = 0; c < cfg.a.cols(); ++c) row[c] = cfg.a(r, c);
      rows.push_back(std::move(row));
    }
    sys["a"] = rows;
  } else if (cfg.kind == "may_leonard") {
    sys["alpha"] = cfg.alpha;
    sys["beta"] = cfg.beta;
  }
  json integ;
  integ["method"] = cfg.integrator.method == IntegratorConfig::Method::rk4_fixed
                        ? "rk4_fixed"
                        : "rk45_adaptive";
  integ["step"] = cfg.integrator.step;
  integ["abs_tol"] = cfg.integrator.abs_tol;
  integ["rel_tol"] = cfg.integrator.rel_tol;
  integ["max_step"] = cfg.integrator.max_step;
  json cmd;
  cmd["m"] = cfg.m;
  cmd["k"] = cfg.k;
  cmd["eta"] = cfg.eta;
  cmd["T"] = cfg.T;
  cmd["T_permanence"] = cfg.T_permanence;
  cmd["n_starts"] = cfg.n_starts;
  cmd["permanence_floor"] = cfg.permanence_floor;
  cmd["seed"] = cfg.seed;
  cmd["out_dir"] = cfg.out_dir;
  return json{{"system", sys}, {"integrator", integ}, {"command", cmd}};
}

json index_set_json(const IndexSet& I) {
  std::vector<int> one_based;
  for (int i : I.members) one_based.push_back(i + 1);
  return one_based;
}

json estimate(double value, const char* provenance) {
  return json{{"value", value}, {"provenance", provenance}};
}

json rest_point_json(const System& sys, const RestPoint& p) {
  json j;
  j["location"] = p.location;
  j["face"] = index_set_json(p.face);
  j["residual"] = p.residual;
  json eigs = json::array();
  for (const auto& ev : p.eigenvalues)
    eigs.push_back(json{{"re", ev.real()}, {"im", ev.imag()}});
  j["eigenvalues"] = eigs;
  const ExponentReport er = exponents_at_rest_point(sys, p);
  j["internal_exponents"] = er.internal;
  json ext;
  for (const auto& [i, v] : er.external) ext[std::to_string(i + 1)] = v;
  j["external_exponents"] = ext;
  j["provenance"] = "closed_form";
  return j;
}

const char* verdict_name(Verdict v, int k) {
  if (v == Verdict::none) return "no certificate";
  if (v == Verdict::c1) return "C1 certificate holds on samples";
  return k >= 1 ? "C(k+1) certificate holds on samples" : "C1 certificate holds on samples";
}

struct CommandResult {
  json payload;
  std::vector<std::string> warnings;
  bool check_failed = false;
};

CommandResult cmd_check(const std::shared_ptr<const System>& sys, const RunConfig&) {
  CommandResult res;
  const auto rep = check_hypothesis_A(*sys);
  res.payload["growth_margins"] = rep.margins;
  res.payload["holds"] = rep.holds;
  res.payload["provenance"] = "closed_form";
  const Vec hi = join_point(*sys, IndexSet::empty(sys->dim()));
  const auto comp =
      verify_strong_competitiveness(*sys, Vec(sys->dim(), 0.0), 2.0 * hi, 200);
  res.payload["strongly_competitive"] = comp.strongly_competitive;
  res.payload["worst_offdiagonal"] = comp.worst_offdiag;
  res.check_failed = !rep.holds || !comp.strongly_competitive;
  return res;
}

CommandResult cmd_rest_points(const std::shared_ptr<const System>& sys,
                              const RunConfig&) {
  CommandResult res;
  json list = json::array();
  for (const RestPoint& p : find_rest_points(sys)) list.push_back(rest_point_json(*sys, p));
  res.payload["rest_points"] = list;
  res.payload["count"] = list.size();
  return res;
}

CommandResult cmd_exponents(const std::shared_ptr<const System>& sys,
                            const RunConfig& cfg) {
  CommandResult res;
  SampleParams sp;
  sp.seed = cfg.seed;
  const auto samples = sample_ergodic_measures(sys, sp, cfg.integrator);
  json list = json::array();
  for (const ErgodicSample& s : samples) {
    const ExponentReport er = exponents_for_sample(sys, s, cfg.integrator);
    json j;
    j["kind"] = s.kind == ErgodicSample::Kind::dirac ? "dirac" : "empirical";
    j["face"] = index_set_json(s.face);
    j["internal"] = er.internal;
    json ext;
    for (const auto& [i, v] : er.external) ext[std::to_string(i + 1)] = v;
    j["external"] = ext;
    j["provenance"] = er.sample_based ? "sample_based" : "closed_form";
    list.push_back(std::move(j));
  }
  res.payload["measures"] = list;
  const auto nonneg = external_nonnegativity_check(sys, samples, cfg.integrator);
  res.payload["external_nonnegativity"] = json{{"holds", nonneg.holds},
                                               {"min_external", nonneg.min_external},
                                               {"provenance", "sample_based"}};
  res.check_failed = !nonneg.holds;
  return res;
}

CommandResult cmd_simplex(const std::shared_ptr<const System>& sys,
                          const RunConfig& cfg) {
  CommandResult res;
  SweepParams params;
  params.m = cfg.m;
  const RadialGraph graph = reconstruct_sigma(sys, params, cfg.integrator);
  if (!graph.converged)
    res.warnings.push_back("some rays did not reach the bracket tolerance");

  const std::filesystem::path csv = std::filesystem::path(cfg.out_dir) / "sigma.csv";
  export_graph(graph, csv.string());

  const auto residual = invariance_residual(graph, *sys, 0.1, cfg.integrator);
  const auto violations = unorderedness_check(graph);
  res.payload["mesh_resolution"] = cfg.m;
  res.payload["rays"] = graph.radii.size();
  res.payload["max_bracket_width"] =
      *std::max_element(graph.bracket_width.begin(), graph.bracket_width.end());
  res.payload["invariance_residual"] = estimate(residual.max_residual, "sample_based");
  res.payload["unordered_pairs"] = violations.size();
  res.payload["csv"] = csv.string();
  res.check_failed = !violations.empty();
  return res;
}

CommandResult cmd_certify(const std::shared_ptr<const System>& sys,
                          const RunConfig& cfg) {
  CommandResult res;
  CertifyParams params;
  params.seed = cfg.seed;
  const CertificateReport rep = certify(sys, cfg.k, cfg.eta, params, cfg.integrator);
  res.warnings = rep.warnings;
  res.payload["k"] = rep.k;
  res.payload["eta"] = rep.eta;
  res.payload["growth_margins"] = rep.hyp_a.margins;
  res.payload["hypothesis_holds"] = rep.hyp_a.holds;
  json faces = json::array();
  for (const FaceCertificate& fc : rep.faces) {
    faces.push_back(json{{"face", index_set_json(fc.face)},
                         {"sup_norm_df", estimate(fc.sup_norm_df, "sample_based")},
                         {"lambda_sup", estimate(fc.lambda_sup, "sample_based")},
                         {"d_inf", estimate(fc.d_inf, "sample_based")},
                         {"c1_holds", fc.c1_holds},
                         {"c2_holds", fc.c2_holds},
                         {"permanent", fc.permanent},
                         {"sample_size", fc.sample_size}});
  }
  res.payload["faces"] = faces;
  json gap = json::array();
  for (const GapRecord& g : rep.gap)
    gap.push_back(json{{"face", index_set_json(g.face)},
                       {"margin", estimate(g.margin, "sample_based")},
                       {"holds", g.holds}});
  res.payload["gap_route"] = gap;
  res.payload["gap_route_holds"] = rep.gap_route_holds;
  res.payload["verdict"] = verdict_name(rep.verdict, rep.k);
  res.payload["sample_based"] = true;
  res.check_failed =
      rep.verdict == Verdict::none || (cfg.k >= 1 && rep.verdict != Verdict::ck1);
  return res;
}

CommandResult cmd_permanence(const std::shared_ptr<const System>& sys,
                             const RunConfig& cfg) {
  CommandResult res;
  json faces = json::array();
  bool all_ok = true;
  for (const IndexSet& I : enumerate_faces(sys->dim(), 0, sys->dim() - 1)) {
    const auto rep = permanence_probe(*sys, I, cfg.n_starts, cfg.T_permanence,
                                      cfg.integrator, cfg.seed);
    const bool ok = rep.summary >= cfg.permanence_floor;
    all_ok = all_ok && ok;
    faces.push_back(json{{"face", index_set_json(I)},
                         {"min_surviving_coordinate", estimate(rep.summary, "sample_based")},
                         {"permanent", ok}});
  }
  res.payload["faces"] = faces;
  res.payload["permanent"] = all_ok;
  res.check_failed = !all_ok;
  return res;
}

CommandResult cmd_demo_may_leonard(const std::shared_ptr<const System>& sys,
                                   const RunConfig& cfg) {
  CommandResult res;
  json list = json::array();
  for (const RestPoint& p : find_rest_points(sys)) list.push_back(rest_point_json(*sys, p));
  res.payload["rest_points"] = list;
  const auto rep = check_hypothesis_A(*sys);
  res.payload["growth_margins"] = rep.margins;
  res.payload["hypothesis_holds"] = rep.holds;
  const int degree = may_leonard_degree(cfg.alpha);
  res.payload["smoothness_degree"] =
      degree >= 1 ? json(degree) : json("none");
  if (degree >= 1) {
    SampleParams sp;
    sp.seed = cfg.seed;
    const auto samples = sample_ergodic_measures(sys, sp, cfg.integrator);
    json gap = json::array();
    for (const ErgodicSample& s : samples) {
      if (s.kind != ErgodicSample::Kind::dirac) continue;
      const GapCheck g = benaim_gap_check(exponents_for_sample(sys, s, cfg.integrator),
                                          degree - 1, cfg.eta);
      gap.push_back(json{{"face", index_set_json(s.face)},
                         {"margin", g.margin},
                         {"holds", g.holds}});
    }
    res.payload["gap_route"] = gap;
  }
  res.payload["provenance"] = "closed_form";
  return res;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

std::string config_to_json(const RunConfig& config) {
  return config_json(config).dump(2);
}

std::shared_ptr<const System> build_system(const RunConfig& config) {
  if (config.kind == "lotka_volterra")
    return std::make_shared<LotkaVolterra>(config.b, config.a);
  if (config.kind == "may_leonard")
    return std::make_shared<LotkaVolterra>(MayLeonard(config.alpha, config.beta).to_lv());
  if (config.kind == "builtin_demo") {
    // Three species, unit rates, weak symmetric coupling 0.1.
    Mat a = Mat::identity(3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        if (r != c) a(r, c) = 0.1;
    return std::make_shared<LotkaVolterra>(Vec(3, 1.0), a);
  }
  throw ConfigError("system.kind: unsupported kind " + config.kind);
}

int run_command(const RunConfig& config, const std::string& command) {
  try {
    // Commands may emit artifacts (sigma.csv) before the report is written.
    std::filesystem::create_directories(config.out_dir);
    const auto sys = build_system(config);
    CommandResult res;
    if (command == "check")
      res = cmd_check(sys, config);
    else if (command == "rest-points")
      res = cmd_rest_points(sys, config);
    else if (command == "exponents")
      res = cmd_exponents(sys, config);
    else if (command == "simplex")
      res = cmd_simplex(sys, config);
    else if (command == "certify")
      res = cmd_certify(sys, config);
    else if (command == "permanence")
      res = cmd_permanence(sys, config);
    else if (command == "demo may-leonard")
      res = cmd_demo_may_leonard(sys, config);
    else
      throw ConfigError("unknown command: " + command);

    json report;
    report["version"] = kToolVersion;
    report["command"] = command;
    report["config"] = config_json(config);
    report["seed"] = config.seed;
    report["warnings"] = res.warnings;
    report["payload"] = res.payload;

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path out =
        std::filesystem::path(config.out_dir) / "report.json";
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out.string());
    os << report.dump(2) << "\n";
    if (!os) throw std::runtime_error("write failed for " + out.string());

    std::cout << report.dump(2) << "\n";
    return res.check_failed ? 1 : 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace csim

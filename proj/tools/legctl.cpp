#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "leg/corpus.hpp"
#include "leg/descent.hpp"
#include "leg/energy.hpp"
#include "leg/errors.hpp"
#include "leg/experiments.hpp"
#include "leg/identities.hpp"
#include "leg/io.hpp"
#include "leg/monotonicity.hpp"

using namespace leg;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumerical = 3, kAbort = 4 };

const std::set<std::string> kMeshKeys{"mesh", "family", "n", "amplitude", "half_width"};

const std::map<std::string, std::set<std::string>> kAllowed{
    {"verify-identities", {"samples", "inject_jh_bug"}},
    {"lift", {"grid", "family", "n", "base_value", "tol"}},
    {"energy", {"epsilon", "resolution_ladder"}},
    {"descend",
     {"epsilon_schedule", "tol_scale", "tau_init", "tau_min", "armijo", "max_iters", "reeb_convention", "smoothing",
      "stall_window", "stall_rtol"}},
    {"monotonicity", {"p0", "r", "eta", "min_faces", "resolution_ladder"}},
    {"density", {"p0", "radii", "min_edges", "resolution_ladder"}},
    {"clifford-demo", {"warp", "resolution_ladder"}},
};

bool uses_mesh(const std::string& cmd) {
  return cmd == "energy" || cmd == "descend" || cmd == "monotonicity" || cmd == "density";
}

struct Context {
  std::string command;
  json config;  // validated, with CLI overrides applied; excludes the output directory
  fs::path out;
  std::string hash;

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!config.contains(key)) return fallback;
    try {
      return config.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ValidationError("config key '" + key + "': " + e.what());
    }
  }
  std::uint64_t seed() const { return get<std::uint64_t>("seed", 0); }
  fs::path path(const std::string& name) const { return out / name; }

  json header() const {
    return {{"command", command}, {"version", kLibraryVersion}, {"config_hash", hash}, {"config", config}};
  }
};

std::vector<int> parse_ladder(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      const int n = std::stoi(tok, &used);
      if (used != tok.size() || n < 2) throw std::invalid_argument(tok);
      v.push_back(n);
    } catch (const std::exception&) {
      throw ValidationError("bad resolution ladder entry '" + tok + "'");
    }
  }
  if (v.empty()) throw ValidationError("empty resolution ladder");
  return v;
}

std::vector<int> ladder(const Context& c, std::vector<int> fallback) {
  auto v = c.get<std::vector<int>>("resolution_ladder", fallback);
  for (int n : v)
    if (n < 2) throw ValidationError("resolution ladder entries must be >= 2");
  return v;
}

DiscreteImmersion input_mesh(const Context& c, const std::string& default_family, int n) {
  if (c.config.contains("mesh")) {
    if (c.config.contains("family")) throw ValidationError("give either 'mesh' or 'family', not both");
    return mesh_from_json(read_json_file(c.get<std::string>("mesh", "")));
  }
  const std::string family = c.get<std::string>("family", default_family);
  const double hw = c.get<double>("half_width", 0.5);
  if (!(hw > 0.0)) throw ValidationError("half_width must be positive");
  if (family == "flat_patch") return flat_patch(n, hw);
  if (family == "double_sheet") {
    DoubleSheetOptions o;
    o.n = n;
    o.half_width = hw;
    return double_sheet(o);
  }
  return generate(family, n, c.get<double>("amplitude", 1e-2), c.seed());
}

VecX base_point(const Context& c, const DiscreteImmersion& L, const std::string& default_family) {
  const std::string family = c.config.contains("mesh") ? "" : c.get<std::string>("family", default_family);
  json p0 = c.config.contains("p0") ? c.config["p0"]
                                    : json(family == "flat_patch" || family == "double_sheet" ? "origin" : "0");
  if (p0.is_string() && p0.get<std::string>() == "origin") return VecX::Zero(L.target.dim());
  int v = 0;
  if (p0.is_number_integer()) v = p0.get<int>();
  else if (p0.is_string()) v = std::stoi(p0.get<std::string>());
  else throw ValidationError("p0 must be \"origin\" or a vertex index");
  if (v < 0 || v >= L.num_vertices()) throw ValidationError("p0 vertex out of range");
  return L.point(v);
}

json to_json(const EnergyBreakdown& e) {
  return {{"epsilon", e.epsilon}, {"area", e.area}, {"penalty", e.penalty}, {"total", e.total},
          {"entropy_indicator", e.entropy_indicator}};
}

std::vector<json> vec_row(const VecX& x) { return std::vector<json>(x.data(), x.data() + x.size()); }

int cmd_verify_identities(const Context& c) {
  IdentityOptions o;
  o.seed = c.seed();
  o.samples = c.get<int>("samples", 10000);
  o.inject_jh_bug = c.get<bool>("inject_jh_bug", false);
  if (o.samples < 1) throw ValidationError("samples must be >= 1");
  const auto checks = verify_identities(o);
  json report = c.header();
  json arr = json::array(), failed = json::array();
  for (const auto& k : checks) {
    arr.push_back({{"name", k.name}, {"max_error", k.max_error}, {"tolerance", k.tolerance},
                   {"samples", k.samples}, {"passed", k.passed}});
    if (!k.passed) failed.push_back(k.name);
  }
  report["checks"] = arr;
  report["failed"] = failed;
  report["passed"] = failed.empty();
  write_json_file(c.path("identities.json"), report);
  for (const auto& f : failed) std::cerr << "identity check failed: " << f.get<std::string>() << '\n';
  return failed.empty() ? kOk : kNumerical;
}

LagrangianSampleGrid constant_grid(int n) {
  LagrangianSampleGrid g;
  g.n1 = g.n2 = n;
  g.h1 = g.h2 = 1.0 / n;
  g.u.assign(static_cast<size_t>(n) * n, Vec4(1.0, 0.0, 0.0, 0.0));
  return g;
}

int cmd_lift(const Context& c) {
  LagrangianSampleGrid g;
  std::string source;
  if (c.config.contains("grid")) {
    if (c.config.contains("family")) throw ValidationError("give either 'grid' or 'family', not both");
    source = c.get<std::string>("grid", "");
    g = grid_from_json(read_json_file(source));
  } else {
    const std::string family = c.get<std::string>("family", "clifford");
    const int n = c.get<int>("n", 64);
    if (n < 2) throw ValidationError("n must be >= 2");
    if (family == "clifford") g = clifford_grid(n);
    else if (family == "graph") g = graph_grid(n);
    else if (family == "constant") g = constant_grid(n);
    else throw ValidationError("unknown grid family '" + family + "'");
    source = family;
  }
  std::optional<double> tol;
  if (c.config.contains("tol")) tol = c.get<double>("tol", 0.0);
  LiftResult lr;
  try {
    lr = legendrian_lift(g, c.get<double>("base_value", 0.0), tol);
  } catch (const ConstraintViolation& e) {
    json report = c.header();
    report["error"] = e.what();
    report["worst_cell"] = e.worst;
    report["worst_cell_ij"] = {e.worst / g.n2, e.worst % g.n2};
    report["loop_residual"] = e.value;
    write_json_file(c.path("lift_failure.json"), report);
    std::cerr << e.what() << ": worst cell " << e.worst << " (" << e.worst / g.n2 << ", " << e.worst % g.n2
              << "), loop residual " << e.value << '\n';
    return kNumerical;
  }
  json periods = json::array();
  for (const auto& p : lr.periods) periods.push_back(p ? json(*p) : json(nullptr));
  json meta = c.header();
  meta["source"] = source;
  meta["periods"] = periods;
  meta["max_loop_residual"] = lr.max_loop_residual;
  meta["phi_range"] = {*std::min_element(lr.phi.begin(), lr.phi.end()), *std::max_element(lr.phi.begin(), lr.phi.end())};
  write_json_file(c.path("lift_mesh.json"), mesh_to_json(lift_immersion(g, lr), meta));
  return kOk;
}

int cmd_energy(const Context& c) {
  const double eps = c.get<double>("epsilon", 0.2);
  if (!(eps > 0.0)) throw ValidationError("epsilon must be positive");
  std::vector<int> ns{c.get<int>("n", 32)};
  if (c.config.contains("resolution_ladder")) {
    if (c.config.contains("mesh")) throw ValidationError("a mesh file has a fixed resolution; drop the ladder");
    ns = ladder(c, ns);
  }
  json report = c.header();
  json rows = json::array();
  for (int n : ns) {
    const DiscreteImmersion L = input_mesh(c, "clifford_lift", n);
    json r = to_json(energy(L, eps));
    r["n"] = n;
    r["vertices"] = L.num_vertices();
    r["max_leg_residual"] = legendrian_residual(L).max_abs;
    r["legendrian_tol"] = L.legendrian_tol;
    rows.push_back(r);
  }
  report["rows"] = rows;
  write_json_file(c.path("energy.json"), report);
  return kOk;
}

ReebConvention parse_convention(const std::string& s) {
  if (s == "minus_two") return ReebConvention::MinusTwo;
  if (s == "half") return ReebConvention::Half;
  throw ValidationError("reeb_convention must be 'minus_two' or 'half'");
}

int cmd_descend(const Context& c) {
  DescentOptions o;
  o.epsilon_schedule = c.get<std::vector<double>>("epsilon_schedule", o.epsilon_schedule);
  o.tol_scale = c.get<double>("tol_scale", o.tol_scale);
  o.tau_init = c.get<double>("tau_init", o.tau_init);
  o.tau_min = c.get<double>("tau_min", o.tau_min);
  o.armijo = c.get<double>("armijo", o.armijo);
  o.max_iters = c.get<int>("max_iters", o.max_iters);
  o.smoothing = c.get<double>("smoothing", o.smoothing);
  o.stall_window = c.get<int>("stall_window", o.stall_window);
  o.stall_rtol = c.get<double>("stall_rtol", o.stall_rtol);
  o.seed = c.seed();
  o.convention = parse_convention(c.get<std::string>("reeb_convention", "minus_two"));
  const DiscreteImmersion L0 = input_mesh(c, "perturbed_clifford", c.get<int>("n", 32));

  JsonlWriter traj(c.path("trajectory.jsonl").string());
  const DescentResult res = descend(L0, o, [&](const DescentRecord& r) {
    traj.write({{"k", r.k}, {"iter", r.iter}, {"epsilon", r.epsilon}, {"area", r.area}, {"penalty", r.penalty},
                {"total", r.total}, {"grad_norm", r.grad_norm}, {"max_leg_residual", r.max_leg_residual},
                {"entropy_indicator", r.entropy_indicator}, {"tau", r.tau}});
  });
  write_json_file(c.path("final_mesh.json"), mesh_to_json(res.final, c.header()));

  json report = c.header();
  json stages = json::array();
  for (const auto& s : res.stages)
    stages.push_back({{"k", s.k}, {"epsilon", s.epsilon}, {"tol", s.tol}, {"start", to_json(s.start)},
                      {"end", to_json(s.end)}, {"iterations", s.iterations}, {"grad_norm", s.grad_norm},
                      {"admissibility_target", s.admissibility_target}, {"converged", s.converged},
                      {"stalled", s.stalled}, {"aborted", s.aborted}, {"diagnostic", s.diagnostic}});
  report["stages"] = stages;
  const DescentRecord& last = res.trajectory.back();
  report["final"] = {{"area", last.area}, {"penalty", last.penalty}, {"grad_norm", last.grad_norm},
                     {"max_leg_residual", last.max_leg_residual}};
  report["max_leg_residual"] = res.max_leg_residual;
  report["legendrian_tol"] = L0.legendrian_tol;
  report["aborted"] = res.aborted;
  write_json_file(c.path("descend_summary.json"), report);
  if (res.aborted) {
    std::cerr << "descent aborted: " << res.stages.back().diagnostic << '\n';
    return kAbort;
  }
  return kOk;
}

int cmd_monotonicity(const Context& c) {
  const double r = c.get<double>("r", 0.3), eta = c.get<double>("eta", 0.05);
  const int min_faces = c.get<int>("min_faces", 100);
  const std::vector<int> ns = ladder(c, {c.get<int>("n", 64)});
  json header = c.header();
  header["chi"] = kCutoffName;
  header["r"] = r;
  header["eta"] = eta;

  std::vector<std::vector<json>> rows, grows;
  json per_n = json::array();
  std::vector<double> residuals;
  for (int n : ns) {
    const DiscreteImmersion L = input_mesh(c, "flat_patch", n);
    const VecX p0 = base_point(c, L, "flat_patch");
    header["p0"] = vec_row(p0);
    const MonotonicityReport rep = monotonicity_balance(L, p0, r, eta, min_faces);
    for (const auto& t : rep.terms) rows.push_back({n, t.name, t.side, t.value});
    const auto checks = gauge_checks(L, gauge_fields(L, p0), std::max(eta, 3.0 * mean_edge_length(L)), 2.0 * r);
    json gc = json::object();
    for (const auto& k : checks) {
      grows.push_back({n, k.name, k.constant, k.max_defect, k.count});
      gc[k.name] = k.constant;
    }
    per_n.push_back({{"n", n}, {"lhs", rep.lhs}, {"rhs", rep.rhs}, {"residual", rep.residual},
                     {"bookkeeping", rep.bookkeeping}, {"pairing_assembled", rep.pairing_assembled},
                     {"annulus_faces", rep.annulus_faces}, {"gauge_constants", gc}});
    residuals.push_back(rep.residual);
  }
  write_csv(c.path("monotonicity.csv").string(), header, {"n", "term", "side", "value"}, rows);
  write_csv(c.path("gauge_checks.csv").string(), header, {"n", "check", "constant", "max_defect", "count"}, grows);
  json summary = header;
  summary["rows"] = per_n;
  const bool fit = ns.size() >= 2 && std::all_of(residuals.begin(), residuals.end(), [](double x) { return x > 0; });
  summary["residual_order"] = fit ? json(fitted_order(ns, residuals)) : json(nullptr);
  write_json_file(c.path("monotonicity_summary.json"), summary);
  return kOk;
}

int cmd_density(const Context& c) {
  const std::vector<double> radii = c.get<std::vector<double>>("radii", geometric_radii(0.5, 0.02, 0.85));
  const double min_edges = c.get<double>("min_edges", 3.0);
  const std::vector<int> ns = ladder(c, {c.get<int>("n", 32)});
  json header = c.header();
  std::vector<std::vector<json>> rows, trows;
  json per_n = json::array();
  std::map<std::string, std::vector<double>> dist;
  for (int n : ns) {
    const DiscreteImmersion L = input_mesh(c, "flat_patch", n);
    const VecX p0 = base_point(c, L, "flat_patch");
    header["p0"] = vec_row(p0);
    const DensityCurve dc = density_curve(L, p0, radii, min_edges);
    for (size_t i = 0; i < dc.radii.size(); ++i) rows.push_back({n, dc.radii[i], dc.ratios[i], dc.counts[i]});
    json th = json::array();
    for (const auto& k : standard_kernels()) {
      const Theta0Estimate t = theta0_estimate(L, p0, k, 0.0, min_edges);
      trows.push_back({n, t.kernel, t.eta, t.theta0, t.theta0 / (2.0 * std::numbers::pi), t.multiplicity});
      th.push_back({{"kernel", t.kernel}, {"eta", t.eta}, {"theta0", t.theta0}, {"multiplicity", t.multiplicity},
                    {"distance_to_integer", t.distance_to_integer}});
      dist[t.kernel].push_back(t.distance_to_integer);
    }
    json q = nullptr;
    if (dc.radii.size() >= 2) {
      const QuasiMonotonicity qm = quasi_monotonicity(dc);
      q = {{"upper", qm.upper}, {"lower", qm.lower}, {"spike", qm.spike}};
    }
    per_n.push_back({{"n", n}, {"theta0", th}, {"quasi_monotonicity", q}, {"warnings", dc.warnings}});
  }
  write_csv(c.path("density.csv").string(), header, {"n", "s", "ratio", "components"}, rows);
  write_csv(c.path("theta0.csv").string(), header, {"n", "kernel", "eta", "theta0", "theta0_over_2pi", "multiplicity"},
            trows);
  json summary = header;
  summary["rows"] = per_n;
  json orders = json::object();
  for (const auto& [k, d] : dist) {
    const bool fit = ns.size() >= 2 && std::all_of(d.begin(), d.end(), [](double x) { return x > 0; });
    orders[k] = fit ? json(fitted_order(ns, d)) : json(nullptr);
  }
  summary["theta0_distance_order"] = orders;
  write_json_file(c.path("density_summary.json"), summary);
  return kOk;
}

int cmd_clifford_demo(const Context& c) {
  const double warp = c.get<double>("warp", 0.3);
  if (!(std::abs(warp) < 1.0)) throw ValidationError("warp must satisfy |warp| < 1");
  const std::vector<int> ns = ladder(c, {16, 32, 64, 128});
  json header = c.header();
  std::vector<std::vector<json>> rows;
  std::vector<double> hopf, lap, ws;
  CliffordMinimalityRow finest;
  for (int n : ns) {
    const CliffordMinimalityRow r = clifford_minimality(n, warp);
    rows.push_back({n, r.area, r.area_rel_error, r.hopf_max, r.laplacian_beta_max, r.curl_max, r.weak_stationarity});
    hopf.push_back(r.hopf_max);
    lap.push_back(r.laplacian_beta_max);
    ws.push_back(r.weak_stationarity);
    finest = r;
  }
  write_csv(c.path("clifford_demo.csv").string(), header,
            {"n", "area", "area_rel_error", "hopf_max", "laplacian_beta_max", "curl_max", "weak_stationarity"}, rows);
  json summary = header;
  bool ok = true;
  if (ns.size() >= 2) {
    const double oh = fitted_order(ns, hopf), ol = fitted_order(ns, lap), ow = fitted_order(ns, ws);
    summary["orders"] = {{"hopf_max", oh}, {"laplacian_beta_max", ol}, {"weak_stationarity", ow}};
    ok = oh >= 1.0 && ol >= 1.0 && ow >= 1.0;
  }
  summary["finest_area_rel_error"] = finest.area_rel_error;
  ok = ok && finest.area_rel_error <= 5e-3;
  summary["passed"] = ok;
  write_json_file(c.path("clifford_demo_summary.json"), summary);
  return ok ? kOk : kNumerical;
}

Context make_context(const std::string& cmd, const std::string& config_path, std::optional<std::uint64_t> seed,
                     const std::string& out_flag, const std::string& ladder_flag) {
  Context c;
  c.command = cmd;
  c.config = config_path.empty() ? json::object() : read_json_file(config_path);
  if (!c.config.is_object()) throw ValidationError("config must be a JSON object");
  std::set<std::string> allowed = kAllowed.at(cmd);
  allowed.insert({"seed", "out"});
  if (uses_mesh(cmd)) allowed.insert(kMeshKeys.begin(), kMeshKeys.end());
  for (const auto& [key, value] : c.config.items())
    if (!allowed.count(key)) throw ValidationError("unknown config key '" + key + "' for " + cmd);
  if (seed) c.config["seed"] = *seed;
  if (!ladder_flag.empty()) {
    if (!allowed.count("resolution_ladder")) throw ValidationError(cmd + " does not take a resolution ladder");
    c.config["resolution_ladder"] = parse_ladder(ladder_flag);
  }
  std::string out = c.config.contains("out") ? c.get<std::string>("out", ".") : ".";
  if (!out_flag.empty()) out = out_flag;
  c.config.erase("out");
  c.out = out;
  fs::create_directories(c.out);
  c.hash = config_hash(json{{"command", cmd}, {"config", c.config}});
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Legendrian surface experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kLibraryVersion));

  struct Flags {
    std::string config, out, ladder;
    std::optional<std::uint64_t> seed;
  };
  std::map<std::string, Flags> flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"verify-identities", "Random-point identity checks on both targets"},
      {"lift", "Legendrian lift of a Lagrangian sample grid"},
      {"energy", "Area, penalty and entropy indicator of a mesh"},
      {"descend", "Hamiltonian descent of E_eps along an epsilon schedule"},
      {"monotonicity", "Monotonicity balance and gauge checks across a resolution ladder"},
      {"density", "Density ratios, theta0 and quasi-monotonicity"},
      {"clifford-demo", "H-minimality residuals of the Clifford torus lift"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    Flags& f = flags[name];
    sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--resolution-ladder", f.ladder, "Comma separated resolutions, e.g. 16,32,64,128");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  const Flags& f = flags[cmd];
  try {
    const Context c = make_context(cmd, f.config, f.seed, f.out, f.ladder);
    if (cmd == "verify-identities") return cmd_verify_identities(c);
    if (cmd == "lift") return cmd_lift(c);
    if (cmd == "energy") return cmd_energy(c);
    if (cmd == "descend") return cmd_descend(c);
    if (cmd == "monotonicity") return cmd_monotonicity(c);
    if (cmd == "density") return cmd_density(c);
    return cmd_clifford_demo(c);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const json::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << '\n';
    return kAbort;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical check failed: " << e.what() << '\n';
    return kNumerical;
  }
}

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "leg/corpus.hpp"
#include "leg/descent.hpp"
#include "leg/energy.hpp"
#include "leg/experiments.hpp"
#include "leg/flow.hpp"
#include "leg/hamiltonian.hpp"
#include "leg/identities.hpp"
#include "leg/io.hpp"
#include "leg/monotonicity.hpp"

using namespace leg;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

Outcome identity_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = verify_identities({0, 10000, false});
  const double t = seconds_since(t0);
  Outcome o{t < 10.0, ""};
  std::string failed;
  for (const auto& c : checks)
    if (!c.passed) o.pass = false, failed += " " + c.name;
  o.detail = fmt::format("{} checks x 1e4 samples, {:.2f} s{}", checks.size(), t,
                         failed.empty() ? "" : ", failed:" + failed);
  return o;
}

Outcome contact_contract() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  double worst = 0.0;
  for (TargetKind kind : {TargetKind::Heisenberg, TargetKind::Stiefel})
    for (ReebConvention conv : {ReebConvention::MinusTwo, ReebConvention::Half}) {
      const Target t{kind, 0.0};
      for (int k = 0; k < 100; ++k) {
        const Polynomial p = random_polynomial(t.dim(), 3, rng);
        const VecX q = random_point(t, rng);
        const VecX X = random_horizontal(t, q, rng);
        const double lie = lie_derivative_alpha(t, hamiltonian_vector_field(t, p.field(), conv), q, X, 1e-4);
        worst = std::max(worst, std::abs(lie) / (p.coefficient_norm() * std::pow(1 + q.norm(), 3)));
      }
    }
  const std::vector<double> taus{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  double min_h = INFINITY, max_g = 0.0;
  for (TargetKind kind : {TargetKind::Heisenberg, TargetKind::Stiefel}) {
    const Target t{kind, 0.0};
    for (int k = 0; k < 20; ++k) {
      const VecX q = random_point(t, rng);
      const VecX X = random_horizontal(t, q, rng);
      const VectorField Yh = hamiltonian_vector_field(t, random_polynomial(t.dim(), 3, rng).field(), ReebConvention::MinusTwo);
      MatX B(t.dim(), t.dim());
      for (int i = 0; i < B.size(); ++i) B(i) = N(rng);
      const VectorField Yg = [&t, B](const VecX& x) { return t.tangent_project(x, B * x); };
      std::vector<double> vh, vg;
      for (double tau : taus) {
        vh.push_back(first_order_violation(t, Yh, q, X, tau) + 1e-300);
        vg.push_back(first_order_violation(t, Yg, q, X, tau));
      }
      min_h = std::min(min_h, loglog_slope(taus, vh));
      max_g = std::max(max_g, loglog_slope(taus, vg));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-4 && min_h >= 1.9 && max_g <= 1.2 && t < 30.0,
          fmt::format("worst scaled Lie derivative {:.2e} (400 fields, both conventions), slopes contact >= {:.2f}, "
                      "generic <= {:.2f}, {:.2f} s",
                      worst, min_h, max_g, t)};
}

MatX smooth_field(const DiscreteImmersion& L, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  const int D = L.target.dim();
  MatX c(D, 6);
  for (int i = 0; i < c.size(); ++i) c(i) = N(rng);
  MatX w(L.num_vertices(), D);
  for (int v = 0; v < L.num_vertices(); ++v) {
    const Vec2 uv = L.mesh.uv[v];
    Eigen::Matrix<double, 6, 1> b;
    b << 1.0, std::cos(uv(0)), std::sin(uv(0)), std::cos(uv(1)), std::sin(uv(1)), std::cos(uv(0) + uv(1));
    w.row(v) = (c * b).transpose();
  }
  return project_tangent(L, w);
}

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(3);
  double worst = 0.0;
  int cases = 0;
  for (TargetKind kind : {TargetKind::Heisenberg, TargetKind::Stiefel}) {
    CliffordOptions o;
    o.n = 32;
    o.target = kind;
    o.warp = 0.2;
    const DiscreteImmersion base = clifford_lift(o);
    for (int k = 0; k < 10; ++k, ++cases) {
      const DiscreteImmersion L = perturb_positions(base, 1e-3, 300 + k);
      const MatX w = smooth_field(L, rng);
      const double eps = k % 2 ? 0.2 : 0.05;
      const double an = gradient(L, eps).pair(w);
      auto fd = [&](double s) {
        return (energy(displace(L, w, s), eps).total - energy(displace(L, w, -s), eps).total) / (2 * s);
      };
      const double rich = (100 * fd(1e-4) - fd(1e-3)) / 99;
      worst = std::max(worst, std::abs(an - rich) / std::abs(rich));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-5 && t < 60.0, fmt::format("{} cases at n=32, max relative error {:.2e}, {:.2f} s", cases, worst, t)};
}

Outcome clifford_h_minimality() {
  const std::vector<int> ns{16, 32, 64, 128};
  std::vector<double> lap, ws, hopf;
  CliffordMinimalityRow last;
  for (int n : ns) {
    last = clifford_minimality(n);
    lap.push_back(last.laplacian_beta_max);
    ws.push_back(std::abs(last.weak_stationarity));
    hopf.push_back(last.hopf_max);
  }
  const double ol = fitted_order(ns, lap), ow = fitted_order(ns, ws), oh = fitted_order(ns, hopf);
  return {ol >= 1.0 && ow >= 1.0 && oh >= 1.0 && last.area_rel_error <= 5e-3,
          fmt::format("orders: Laplacian of beta {:.2f}, weak stationarity {:.2f}, Hopf {:.2f}; area error at n=128 "
                      "{:.2e}",
                      ol, ow, oh, last.area_rel_error)};
}

Outcome density_quantization() {
  const std::vector<double> radii{0.4, 0.3, 0.2};
  const DiscreteImmersion one = flat_patch(32, 0.5);
  DoubleSheetOptions o;
  o.n = 32;
  const DiscreteImmersion two = double_sheet(o);
  const VecX p0 = VecX::Zero(5);
  const DensityCurve c1 = density_curve(one, p0, radii), c2 = density_curve(two, p0, radii);
  double e1 = 0.0, e2 = 0.0;
  for (double r : c1.ratios) e1 = std::max(e1, std::abs(r / kPi - 1.0));
  for (double r : c2.ratios) e2 = std::max(e2, std::abs(r / (2 * kPi) - 1.0));
  double et = 0.0;
  for (const auto& k : standard_kernels()) {
    et = std::max(et, std::abs(theta0_estimate(one, p0, k).theta0 / (2 * kPi) - 1.0));
    et = std::max(et, std::abs(theta0_estimate(two, p0, k).theta0 / (2 * kPi) / 2.0 - 1.0));
  }
  return {e1 <= 0.02 && e2 <= 0.03 && et <= 0.03,
          fmt::format("flat ratio/pi off by {:.2e}, double sheet ratio/2pi off by {:.2e}, theta0/2pi vs sheet count "
                      "off by {:.2e} over two kernels (n=32)",
                      e1, e2, et)};
}

Outcome gauge_structure() {
  std::vector<std::vector<GaugeCheck>> runs;
  for (int n : {64, 128}) {
    const DiscreteImmersion L = clifford_lift(n, TargetKind::Stiefel);
    runs.push_back(gauge_checks(L, gauge_fields(L, L.point(0)), 3.0 * mean_edge_length(L), 0.5));
  }
  bool pass = true;
  std::string detail;
  for (size_t i = 0; i < runs[0].size(); ++i) {
    const GaugeCheck &a = runs[0][i], &b = runs[1][i];
    if (a.name == "arctan_gradient_cap") {
      pass = pass && a.constant <= 1.0 && b.constant <= 1.0;
      detail += fmt::format("{} {:.3g}/{:.3g}", a.name, a.constant, b.constant);
      continue;
    }
    const double ratio = b.constant / a.constant;
    pass = pass && a.constant > 0.0 && std::abs(ratio - 1.0) <= 0.2;
    detail += fmt::format("{} C {:.4g}/{:.4g}; ", a.name, a.constant, b.constant);
  }
  return {pass, "Stiefel Clifford lift n=64/128: " + detail};
}

Outcome quasi_monotone() {
  std::vector<QuasiMonotonicity> q;
  for (int n : {128, 256}) {
    const DiscreteImmersion L = clifford_lift(n, TargetKind::Stiefel);
    q.push_back(quasi_monotonicity(density_curve(L, L.point(0), geometric_radii(0.5, 0.02, 0.85))));
  }
  const double ru = q[1].upper / q[0].upper, rl = q[1].lower / q[0].lower;
  const bool pass = std::abs(ru - 1) <= 0.1 && std::abs(rl - 1) <= 0.1 && q[0].spike <= 3 && q[1].spike <= 3 &&
                    q[0].lower > 0 && q[1].lower > 0;
  return {pass, fmt::format("Stiefel Clifford lift n=128/256: upper {:.4f}/{:.4f}, lower {:.4f}/{:.4f}, spike "
                            "{:.3f}/{:.3f}",
                            q[0].upper, q[1].upper, q[0].lower, q[1].lower, q[0].spike, q[1].spike)};
}

Outcome descent_behaviour() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 64;
  const DescentOptions opt;
  const double Ec = energy(clifford_lift(n), opt.epsilon_schedule[0]).total;
  const DiscreteImmersion P = perturbed_clifford(n, 1e-2, 1);
  const DescentResult r = descend(P, opt);
  bool monotone = true;
  for (size_t i = 1; i < r.trajectory.size(); ++i)
    if (r.trajectory[i].k == r.trajectory[i - 1].k && r.trajectory[i].total > r.trajectory[i - 1].total)
      monotone = false;
  const double gap = std::abs(r.stages.back().end.total - Ec);
  const double t = seconds_since(t0);
  std::string entropy;
  for (const auto& s : r.stages) entropy += fmt::format(" eps={:g}: {:.4e}", s.epsilon, s.end.entropy_indicator);
  const bool pass = !r.aborted && monotone && gap <= 1e-3 && r.max_leg_residual <= 10 * P.legendrian_tol && t < 300;
  return {pass, fmt::format("n=64, schedule eps=0.2, start gap {:.3e}, final gap {:.3e}, {} steps, monotone {}, max "
                            "residual {:.2e} vs 10 tol {:.2e}, entropy indicator{}, {:.1f} s",
                            energy(P, 0.2).total - Ec, gap, r.trajectory.size() - 1, monotone ? "yes" : "no",
                            r.max_leg_residual, 10 * P.legendrian_tol, entropy, t)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Library pipeline written twice in-process, then the CLI twice in separate processes.
Outcome determinism(const std::string& legctl) {
  const fs::path root = fs::temp_directory_path() / ("leg_acceptance_" + std::to_string(::getpid()));
  std::vector<std::string> files;
  for (const char* run : {"a", "b"}) {
    const fs::path d = root / run;
    fs::create_directories(d);
    DescentOptions o;
    o.epsilon_schedule = {0.2, 0.1};
    o.max_iters = 6;
    o.seed = 7;
    JsonlWriter w((d / "trajectory.jsonl").string());
    descend(perturbed_clifford(16, 1e-2, 7), o, [&](const DescentRecord& r) {
      w.write({{"k", r.k}, {"iter", r.iter}, {"area", r.area}, {"penalty", r.penalty}, {"grad_norm", r.grad_norm},
               {"max_leg_residual", r.max_leg_residual}, {"entropy_indicator", r.entropy_indicator}});
    });
    const DiscreteImmersion S = clifford_lift(32, TargetKind::Stiefel);
    const DensityCurve c = density_curve(S, S.point(0), geometric_radii(0.5, 0.1, 0.8));
    std::vector<std::vector<json>> rows;
    for (size_t i = 0; i < c.radii.size(); ++i) rows.push_back({c.radii[i], c.ratios[i], c.counts[i]});
    write_csv((d / "density.csv").string(), {{"seed", 7}}, {"s", "ratio", "components"}, rows);
    files.push_back(slurp(d / "trajectory.jsonl") + slurp(d / "density.csv"));
  }
  bool same = files[0] == files[1] && !files[0].empty();
  std::string detail = fmt::format("in-process JSONL+CSV {}", same ? "identical" : "DIFFER");
  if (!legctl.empty()) {
    std::vector<std::string> outs;
    for (const char* run : {"cli_a", "cli_b"}) {
      const fs::path d = root / run;
      std::ofstream(root / "descend.json") << R"({"n": 16, "epsilon_schedule": [0.2, 0.1], "max_iters": 6})";
      int status = std::system((legctl + " descend --config " + (root / "descend.json").string() + " --seed 7 --out " +
                                d.string() + " >/dev/null 2>&1")
                                   .c_str());
      status |= std::system((legctl + " density --resolution-ladder 16,32 --seed 7 --out " + d.string() +
                             " >/dev/null 2>&1")
                                .c_str());
      same = same && WIFEXITED(status) && WEXITSTATUS(status) == 0;
      outs.push_back(slurp(d / "trajectory.jsonl") + slurp(d / "density.csv") + slurp(d / "theta0.csv"));
    }
    const bool cli_same = outs[0] == outs[1] && !outs[0].empty();
    same = same && cli_same;
    detail += fmt::format(", legctl descend/density across processes {}", cli_same ? "identical" : "DIFFER");
  }
  fs::remove_all(root);
  return {same, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string legctl = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"algebraic identity suite", identity_suite},
      {"contactomorphism contract", contact_contract},
      {"gradient correctness", gradient_check},
      {"Clifford torus H-minimality", clifford_h_minimality},
      {"density quantization", density_quantization},
      {"gauge structure", gauge_structure},
      {"quasi-monotonicity", quasi_monotone},
      {"descent behaviour", descent_behaviour},
      {"determinism", [&] { return determinism(legctl); }},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s | %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

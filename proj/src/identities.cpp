#include "leg/identities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "leg/hamiltonian.hpp"
#include "leg/heisenberg.hpp"
#include "leg/stiefel.hpp"
#include "leg/target.hpp"

namespace leg {

namespace {

StiefelPoint as_point(const VecX& x) { return {x.head<4>(), x.tail<4>()}; }

StiefelTangent as_tangent(const StiefelPoint& p, const VecX& x) { return {x.head<4>(), x.tail<4>(), p}; }

StiefelTangent jh_under_test(const StiefelPoint& p, const StiefelTangent& X, bool bug) {
  if (!bug) return jh(p, X);
  return {X.W, X.V, p};
}

double alpha_raw(const Vec8& q, const Vec8& X) { return q.head<4>().dot(X.tail<4>()) - q.tail<4>().dot(X.head<4>()); }

struct Runner {
  const IdentityOptions& opt;
  std::vector<IdentityCheck> out;

  void run(const std::string& name, double tol, const std::function<double(std::mt19937_64&)>& sample) {
    // Each check draws from its own stream so adding checks leaves the others unchanged.
    std::seed_seq seq{opt.seed, static_cast<std::uint64_t>(std::hash<std::string>{}(name))};
    std::mt19937_64 rng(seq);
    IdentityCheck c;
    c.name = name;
    c.tolerance = tol;
    for (int i = 0; i < opt.samples; ++i) {
      const double e = sample(rng);
      c.max_error = std::max(c.max_error, std::isfinite(e) ? e : INFINITY);
      ++c.samples;
    }
    c.passed = c.max_error <= tol;
    out.push_back(c);
  }
};

}  // namespace

std::vector<IdentityCheck> verify_identities(const IdentityOptions& opt) {
  const Target S{TargetKind::Stiefel, 0.0};
  const Target H{TargetKind::Heisenberg, 0.0};
  const bool bug = opt.inject_jh_bug;
  Runner R{opt, {}};

  auto stiefel_sample = [&](std::mt19937_64& rng, StiefelPoint& p, StiefelTangent& X) {
    const VecX q = random_point(S, rng);
    p = as_point(q);
    X = as_tangent(p, random_horizontal(S, q, rng));
  };

  R.run("reeb_alpha", 1e-12, [&](std::mt19937_64& rng) {
    const StiefelPoint p = as_point(random_point(S, rng));
    return std::abs(contact_form(p, reeb(p)) + 2.0);
  });
  R.run("jh_horizontal", 1e-12, [&](std::mt19937_64& rng) {
    StiefelPoint p;
    StiefelTangent X;
    stiefel_sample(rng, p, X);
    return std::abs(contact_form(p, jh_under_test(p, X, bug))) +
           std::abs(tangent_project(p, jh_under_test(p, X, bug).coords()).norm() - jh_under_test(p, X, bug).norm());
  });
  R.run("jh_involution", 1e-12, [&](std::mt19937_64& rng) {
    StiefelPoint p;
    StiefelTangent X;
    stiefel_sample(rng, p, X);
    const StiefelTangent JX = jh_under_test(p, X, bug);
    return (jh_under_test(p, JX, bug).coords() + X.coords()).norm();
  });
  R.run("jh_isometry", 1e-12, [&](std::mt19937_64& rng) {
    StiefelPoint p;
    StiefelTangent X, Y;
    stiefel_sample(rng, p, X);
    Y = as_tangent(p, random_horizontal(S, p.coords(), rng));
    const Vec8 JX = jh_under_test(p, X, bug).coords(), JY = jh_under_test(p, Y, bug).coords();
    return std::abs(JX.dot(JY) - X.coords().dot(Y.coords()));
  });
  R.run("hopf_isometry", 1e-10, [&](std::mt19937_64& rng) {
    StiefelPoint p;
    StiefelTangent X;
    stiefel_sample(rng, p, X);
    return std::abs(hopf_push(p, X).norm() - X.norm());
  });
  R.run("hopf_complex", 1e-10, [&](std::mt19937_64& rng) {
    StiefelPoint p;
    StiefelTangent X;
    stiefel_sample(rng, p, X);
    const HopfTangent a = hopf_push(p, jh_under_test(p, X, bug));
    const HopfTangent b = hopf_complex(hopf_project(p), hopf_push(p, X));
    return (a.plus - b.plus).norm() + (a.minus - b.minus).norm();
  });
  R.run("dalpha_fd", 1e-5, [&](std::mt19937_64& rng) {
    StiefelPoint p;
    StiefelTangent X;
    stiefel_sample(rng, p, X);
    const StiefelTangent Y = as_tangent(p, random_horizontal(S, p.coords(), rng));
    const double h = 1e-4;
    const Vec8 q = p.coords();
    auto probe = [&](const Vec8& d, const Vec8& arg) { return alpha_raw(retract(Vec8(q + d)).coords(), arg); };
    const double dXY = (probe(h * X.coords(), Y.coords()) - probe(-h * X.coords(), Y.coords())) / (2 * h);
    const double dYX = (probe(h * Y.coords(), X.coords()) - probe(-h * Y.coords(), X.coords())) / (2 * h);
    return std::abs(dXY - dYX - 2.0 * (X.V.dot(Y.W) - Y.V.dot(X.W)));
  });
  R.run("covariant_reeb", 1e-12, [&](std::mt19937_64& rng) {
    StiefelPoint p;
    StiefelTangent Z;
    stiefel_sample(rng, p, Z);
    return (covariant_reeb(p, Z).coords() + jh_under_test(p, Z, bug).coords()).norm();
  });
  R.run("tangent_projection", 1e-12, [&](std::mt19937_64& rng) {
    const StiefelPoint p = as_point(random_point(S, rng));
    std::normal_distribution<double> N;
    Vec8 x;
    for (int i = 0; i < 8; ++i) x(i) = N(rng);
    const Vec8 P = tangent_project(p, x);
    const double constraints =
        std::abs(P.head<4>().dot(p.a)) + std::abs(P.tail<4>().dot(p.b)) + std::abs(p.a.dot(P.tail<4>()) + P.head<4>().dot(p.b));
    return constraints + (tangent_project(p, P) - P).norm();
  });
  R.run("retraction", 1e-12, [&](std::mt19937_64& rng) {
    const StiefelPoint p = as_point(random_point(S, rng));
    const Vec8 X = random_tangent(S, p.coords(), rng);
    const StiefelPoint q = retract(Vec8(p.coords() + 0.1 * X));
    const double ortho = std::abs(q.a.squaredNorm() - 1) + std::abs(q.b.squaredNorm() - 1) + std::abs(q.a.dot(q.b));
    return ortho + (retract(q.coords()).coords() - q.coords()).norm();
  });
  R.run("heisenberg_reeb_alpha", 1e-12, [&](std::mt19937_64& rng) {
    const VecX q = random_point(H, rng);
    return std::abs(H.alpha(q, H.reeb(q)) + H.reeb_norm2());
  });
  R.run("heisenberg_jh_involution", 1e-12, [&](std::mt19937_64& rng) {
    const VecX q = random_point(H, rng);
    const VecX f = H.to_frame(q, random_horizontal(H, q, rng));
    const VecX Jf = H.jh_frame(f);
    return (H.jh_frame(Jf) + f).norm() + std::abs(Jf.norm() - f.norm()) + std::abs(H.alpha(q, H.from_frame(q, Jf)));
  });
  R.run("heisenberg_frame_roundtrip", 1e-12, [&](std::mt19937_64& rng) {
    const VecX q = random_point(H, rng, 3.0);
    const VecX X = random_tangent(H, q, rng);
    return (H.from_frame(q, H.to_frame(q, X)) - X).norm() / (1 + X.norm());
  });
  R.run("heisenberg_dalpha_fd", 1e-5, [&](std::mt19937_64& rng) {
    const HeisenbergPoint q = HeisenbergPoint::from_coords(random_point(H, rng));
    const Vec5 X = random_tangent(H, q.coords(), rng), Y = random_tangent(H, q.coords(), rng);
    const double h = 1e-4;
    auto probe = [&](const Vec5& d, const Vec5& arg) {
      return contact_form_h(HeisenbergPoint::from_coords(q.coords() + d), arg);
    };
    const double dXY = (probe(h * X, Y) - probe(-h * X, Y)) / (2 * h);
    const double dYX = (probe(h * Y, X) - probe(-h * Y, X)) / (2 * h);
    const double exact = 2.0 * (X(1) * Y(2) - X(2) * Y(1) + X(3) * Y(4) - X(4) * Y(3));
    return std::abs(dXY - dYX - exact);
  });
  R.run("gauge_reeb_invariance", 1e-10, [&](std::mt19937_64& rng) {
    const StiefelPoint p0 = as_point(random_point(S, rng)), p = as_point(random_point(S, rng));
    std::uniform_real_distribution<double> U(-std::numbers::pi, std::numbers::pi);
    const double th = U(rng);
    const GaugeFrame a = gauge(p0, p), b = gauge(reeb_rotate(p0, th), reeb_rotate(p, th));
    return std::abs(a.rho - b.rho) + std::abs(a.phi - b.phi) + std::abs(a.r_gauge - b.r_gauge);
  });
  R.run("dilation_scaling", 1e-12, [&](std::mt19937_64& rng) {
    const HeisenbergPoint q = HeisenbergPoint::from_coords(random_point(H, rng));
    std::uniform_real_distribution<double> U(0.1, 10.0);
    const double r = U(rng);
    const double g = model_gauge(q);
    return std::abs(model_gauge(dilate(q, r)) * r - g) / (1 + g);
  });
  return R.out;
}

}  // namespace leg

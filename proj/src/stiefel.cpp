#include "leg/stiefel.hpp"

#include <cmath>
#include <numbers>

#include "leg/errors.hpp"

namespace leg {

namespace {

double scale_of(const Vec4& x, const Vec4& y) {
  return std::max(1.0, std::sqrt(x.squaredNorm() + y.squaredNorm()));
}

void require_same_base(const StiefelPoint& p, const StiefelTangent& X) {
  if ((p.a - X.base.a).norm() > kTangencyTol || (p.b - X.base.b).norm() > kTangencyTol)
    throw DomainError("tangent vector is based at a different point");
}

void require_horizontal(const StiefelTangent& X) {
  if (!is_horizontal(X)) throw DomainError("vector is not horizontal");
}

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

}  // namespace

double GaugeFrame::arctan_sigma() const {
  if (sigma_set) return std::atan(sigma);
  if (phi > 0) return std::numbers::pi / 2;
  if (phi < 0) return -std::numbers::pi / 2;
  return 0.0;
}

StiefelPoint stiefel_point(const Vec4& a, const Vec4& b) {
  if (std::abs(a.squaredNorm() - 1.0) > kTangencyTol || std::abs(b.squaredNorm() - 1.0) > kTangencyTol ||
      std::abs(a.dot(b)) > kTangencyTol)
    throw DomainError("frame is not orthonormal");
  return {a, b};
}

StiefelTangent stiefel_tangent(const StiefelPoint& p, const Vec4& V, const Vec4& W) {
  const double tol = kTangencyTol * scale_of(V, W);
  if (std::abs(V.dot(p.a)) > tol || std::abs(W.dot(p.b)) > tol || std::abs(p.a.dot(W) + V.dot(p.b)) > tol)
    throw DomainError("vector is not tangent to V2(R^4)");
  return {V, W, p};
}

StiefelTangent stiefel_tangent(const StiefelPoint& p, const Vec8& X) {
  return stiefel_tangent(p, X.head<4>(), X.tail<4>());
}

bool is_horizontal(const StiefelTangent& X, double tol) {
  const StiefelPoint& p = X.base;
  const double s = tol * scale_of(X.V, X.W);
  return std::abs(X.V.dot(p.a)) <= s && std::abs(X.V.dot(p.b)) <= s && std::abs(X.W.dot(p.a)) <= s &&
         std::abs(X.W.dot(p.b)) <= s;
}

double contact_form(const StiefelPoint& p, const StiefelTangent& X) {
  require_same_base(p, X);
  return p.a.dot(X.W) - p.b.dot(X.V);
}

StiefelTangent reeb(const StiefelPoint& p) { return {p.b, -p.a, p}; }

StiefelTangent horizontal_project(const StiefelPoint& p, const StiefelTangent& X) {
  require_same_base(p, X);
  const StiefelTangent R = reeb(p);
  const double c = 0.5 * (X.V.dot(R.V) + X.W.dot(R.W));
  return {X.V - c * R.V, X.W - c * R.W, p};
}

StiefelTangent jh(const StiefelPoint& p, const StiefelTangent& X) {
  require_same_base(p, X);
  require_horizontal(X);
  return {-X.W, X.V, p};
}

StiefelTangent covariant_reeb(const StiefelPoint& p, const StiefelTangent& Z) {
  require_same_base(p, Z);
  require_horizontal(Z);
  // R(a, b) = (b, -a) is linear, so its ambient derivative along Z is (W, -V);
  // the Levi-Civita derivative is the tangential part of it.
  Vec8 d;
  d << Z.W, -Z.V;
  const Vec8 t = tangent_project(p, d);
  return {t.head<4>(), t.tail<4>(), p};
}

GrassmannPoint hopf_project(const StiefelPoint& p) {
  const Biv4 w = wedge(p.a, p.b);
  const Biv4 s = hodge(w);
  return {(w + s) * kInvSqrt2, (w - s) * kInvSqrt2};
}

HopfTangent hopf_push(const StiefelPoint& p, const StiefelTangent& X) {
  require_same_base(p, X);
  require_horizontal(X);
  const Biv4 xi = wedge(X.V, p.b) + wedge(p.a, X.W);
  const Biv4 s = hodge(xi);
  return {0.5 * (xi + s), 0.5 * (xi - s)};
}

Vec3 self_dual_coords(const Biv4& w) {
  return Vec3(w(0) + w(5), w(1) - w(4), w(2) + w(3)) * kInvSqrt2;
}

Vec3 anti_self_dual_coords(const Biv4& w) {
  return Vec3(w(0) - w(5), w(1) + w(4), w(2) - w(3)) * kInvSqrt2;
}

Biv4 from_self_dual_coords(const Vec3& c) {
  Biv4 w;
  w << c(0), c(1), c(2), c(2), -c(1), c(0);
  return w * kInvSqrt2;
}

Biv4 from_anti_self_dual_coords(const Vec3& c) {
  Biv4 w;
  w << c(0), c(1), c(2), -c(2), c(1), -c(0);
  return w * kInvSqrt2;
}

HopfTangent hopf_complex(const GrassmannPoint& G, const HopfTangent& xi) {
  const Vec3 gp = self_dual_coords(G.g_plus);
  const Vec3 gm = anti_self_dual_coords(G.g_minus);
  const Vec3 xp = self_dual_coords(xi.plus);
  const Vec3 xm = anti_self_dual_coords(xi.minus);
  return {from_self_dual_coords(gp.cross(xp)), from_anti_self_dual_coords(-gm.cross(xm))};
}

GaugeFrame gauge(const StiefelPoint& p0, const StiefelPoint& p) {
  GaugeFrame g;
  const double rho2 = (p.a - p0.a).squaredNorm() + (p.b - p0.b).squaredNorm();
  g.rho = std::sqrt(rho2);
  g.phi = p.a.dot(p0.b) - p0.a.dot(p.b);
  g.r_gauge = std::pow(rho2 * rho2 + 4.0 * g.phi * g.phi, 0.25);
  if (rho2 > 0.0) {
    g.sigma = 2.0 * g.phi / rho2;
    g.sigma_set = true;
  }
  return g;
}

StiefelPoint retract(const Vec4& a_raw, const Vec4& b_raw) {
  Eigen::Matrix<double, 4, 2> M;
  M << a_raw, b_raw;
  const Mat2 G = M.transpose() * M;
  Eigen::SelfAdjointEigenSolver<Mat2> es(G);
  const Vec2 ev = es.eigenvalues();
  if (!(ev(0) > 1e-24 * std::max(ev(1), 1e-300)) || !std::isfinite(ev(1)))
    throw DegeneracyError("rank-deficient frame in retraction");
  const Mat2 inv_sqrt = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                        es.eigenvectors().transpose();
  const Eigen::Matrix<double, 4, 2> Q = M * inv_sqrt;
  return {Q.col(0), Q.col(1)};
}

StiefelPoint retract(const Vec8& x) { return retract(Vec4(x.head<4>()), Vec4(x.tail<4>())); }

Vec8 tangent_project(const StiefelPoint& p, const Vec8& X) {
  // Normal space of V2 in R^8: (a,0), (0,b), (b,a)/sqrt2, orthonormal.
  Vec8 n1, n2, n3;
  n1 << p.a, Vec4::Zero();
  n2 << Vec4::Zero(), p.b;
  n3 << p.b, p.a;
  n3 *= kInvSqrt2;
  return X - n1.dot(X) * n1 - n2.dot(X) * n2 - n3.dot(X) * n3;
}

StiefelPoint reeb_rotate(const StiefelPoint& p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * p.a + s * p.b, -s * p.a + c * p.b};
}

}  // namespace leg

#pragma once

#include <utility>

#include "leg/linalg.hpp"

namespace leg {

// Orthonormal 2-frame (a, b) in R^4, embedded in R^8 as (a, b).
struct StiefelPoint {
  Vec4 a;
  Vec4 b;

  Vec8 coords() const {
    Vec8 x;
    x << a, b;
    return x;
  }
};

// Tangent pair (V, W) at base: V.a = 0, W.b = 0, a.W + V.b = 0.
struct StiefelTangent {
  Vec4 V;
  Vec4 W;
  StiefelPoint base;

  Vec8 coords() const {
    Vec8 x;
    x << V, W;
    return x;
  }
  double norm() const { return std::sqrt(V.squaredNorm() + W.squaredNorm()); }
};

// Unit self-dual and anti-self-dual parts of a /\ b, as bivectors of R^4.
struct GrassmannPoint {
  Biv4 g_plus;
  Biv4 g_minus;
};

struct HopfTangent {
  Biv4 plus;
  Biv4 minus;
  double norm() const { return std::sqrt(plus.squaredNorm() + minus.squaredNorm()); }
};

struct GaugeFrame {
  double rho = 0.0;
  double phi = 0.0;
  double r_gauge = 0.0;
  double sigma = 0.0;
  bool sigma_set = false;

  // arctan(sigma), with the limits +-pi/2 when rho = 0.
  double arctan_sigma() const;
};

inline constexpr double kTangencyTol = 1e-12;
inline constexpr double kHorizontalTol = 1e-10;

// Checked constructors; throw DomainError when the invariants fail.
StiefelPoint stiefel_point(const Vec4& a, const Vec4& b);
StiefelTangent stiefel_tangent(const StiefelPoint& p, const Vec4& V, const Vec4& W);
StiefelTangent stiefel_tangent(const StiefelPoint& p, const Vec8& X);

bool is_horizontal(const StiefelTangent& X, double tol = kHorizontalTol);

double contact_form(const StiefelPoint& p, const StiefelTangent& X);
StiefelTangent reeb(const StiefelPoint& p);
StiefelTangent horizontal_project(const StiefelPoint& p, const StiefelTangent& X);
StiefelTangent jh(const StiefelPoint& p, const StiefelTangent& X);
StiefelTangent covariant_reeb(const StiefelPoint& p, const StiefelTangent& Z);

GrassmannPoint hopf_project(const StiefelPoint& p);
HopfTangent hopf_push(const StiefelPoint& p, const StiefelTangent& X);
// Product complex structure on S^2 x S^2-bar at G: (G+ x xi+, -G- x xi-).
HopfTangent hopf_complex(const GrassmannPoint& G, const HopfTangent& xi);

GaugeFrame gauge(const StiefelPoint& p0, const StiefelPoint& p);

// Polar factor of the 4x2 matrix [a_raw | b_raw].
StiefelPoint retract(const Vec4& a_raw, const Vec4& b_raw);
StiefelPoint retract(const Vec8& x);

// Orthogonal projection of an R^8 vector onto T_p V2(R^4).
Vec8 tangent_project(const StiefelPoint& p, const Vec8& X);

// Time-theta flow of the Reeb field: (cos a + sin b, -sin a + cos b).
StiefelPoint reeb_rotate(const StiefelPoint& p, double theta);

// Coordinates of a self-dual / anti-self-dual bivector in the orthonormal bases
// (e12+e34, e13-e24, e14+e23)/sqrt2 and (e12-e34, e13+e24, e14-e23)/sqrt2.
Vec3 self_dual_coords(const Biv4& w);
Vec3 anti_self_dual_coords(const Biv4& w);
Biv4 from_self_dual_coords(const Vec3& c);
Biv4 from_anti_self_dual_coords(const Vec3& c);

}  // namespace leg

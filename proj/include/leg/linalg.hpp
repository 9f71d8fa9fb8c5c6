#pragma once

#include <Eigen/Dense>

namespace leg {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat2 = Eigen::Matrix2d;
// Target-dimension vectors (5 or 8) without heap allocation.
using VecD = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 8, 1>;

// Bivectors of R^4 in the basis e12, e13, e14, e23, e24, e34.
using Biv4 = Vec6;

inline Biv4 wedge(const Vec4& x, const Vec4& y) {
  Biv4 w;
  w << x(0) * y(1) - x(1) * y(0), x(0) * y(2) - x(2) * y(0), x(0) * y(3) - x(3) * y(0),
      x(1) * y(2) - x(2) * y(1), x(1) * y(3) - x(3) * y(1), x(2) * y(3) - x(3) * y(2);
  return w;
}

inline Biv4 hodge(const Biv4& w) {
  Biv4 s;
  // *e12 = e34, *e13 = -e24, *e14 = e23, *e23 = e14, *e24 = -e13, *e34 = e12
  s << w(5), -w(4), w(3), w(2), -w(1), w(0);
  return s;
}

// Complex structure of C^2 on R^4: (y1,y2,y3,y4) -> (-y2,y1,-y4,y3).
inline Vec4 jmul(const Vec4& y) { return Vec4(-y(1), y(0), -y(3), y(2)); }

}  // namespace leg

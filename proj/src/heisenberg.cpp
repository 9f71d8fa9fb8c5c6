#include "leg/heisenberg.hpp"

#include <cmath>

#include "leg/errors.hpp"

namespace leg {

double reduce_period(double x, double period) {
  if (period <= 0.0) return x;
  const double k = std::round(x / period);
  double r = x - k * period;
  if (r <= -0.5 * period) r += period;
  if (r > 0.5 * period) r -= period;
  return r;
}

double contact_form_h(const HeisenbergPoint& q, const Vec5& X) {
  return -X(0) + jmul(q.y).dot(X.tail<4>());
}

double default_lagrangian_tol(const LagrangianSampleGrid& grid) {
  double du2 = 0.0;
  const int n1 = grid.n1, n2 = grid.n2;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      if (i + 1 < n1) du2 = std::max(du2, (grid.at(i + 1, j) - grid.at(i, j)).squaredNorm() / (grid.h1 * grid.h1));
      if (j + 1 < n2) du2 = std::max(du2, (grid.at(i, j + 1) - grid.at(i, j)).squaredNorm() / (grid.h2 * grid.h2));
    }
  return 1e-8 * grid.h1 * grid.h2 * std::max(du2, 1.0);
}

LiftResult legendrian_lift(const LagrangianSampleGrid& grid, double base_value, std::optional<double> tol_lag) {
  const int n1 = grid.n1, n2 = grid.n2;
  if (n1 < 1 || n2 < 1 || grid.u.size() != static_cast<size_t>(n1) * n2)
    throw ValidationError("grid size does not match n1 * n2");
  const double tol = tol_lag.value_or(default_lagrangian_tol(grid));

  LiftResult out;
  // Loop integral around every cell, including the wrap-around cells.
  const int c1 = grid.periodic[0] ? n1 : n1 - 1;
  const int c2 = grid.periodic[1] ? n2 : n2 - 1;
  for (int i = 0; i < c1; ++i)
    for (int j = 0; j < c2; ++j) {
      const int i1 = (i + 1) % n1, j1 = (j + 1) % n2;
      const Vec4& p00 = grid.at(i, j);
      const Vec4& p10 = grid.at(i1, j);
      const Vec4& p11 = grid.at(i1, j1);
      const Vec4& p01 = grid.at(i, j1);
      const double loop = lift_increment(p00, p10) + lift_increment(p10, p11) + lift_increment(p11, p01) +
                          lift_increment(p01, p00);
      if (std::abs(loop) > out.max_loop_residual) {
        out.max_loop_residual = std::abs(loop);
        out.worst_cell = static_cast<long>(i) * n2 + j;
      }
    }
  if (out.max_loop_residual > tol)
    throw ConstraintViolation("sample grid is not Lagrangian", out.worst_cell, out.max_loop_residual);

  out.phi.assign(static_cast<size_t>(n1) * n2, 0.0);
  auto phi = [&](int i, int j) -> double& { return out.phi[static_cast<size_t>(i) * n2 + j]; };
  phi(0, 0) = base_value;
  for (int j = 1; j < n2; ++j) phi(0, j) = phi(0, j - 1) + lift_increment(grid.at(0, j - 1), grid.at(0, j));
  for (int j = 0; j < n2; ++j)
    for (int i = 1; i < n1; ++i) phi(i, j) = phi(i - 1, j) + lift_increment(grid.at(i - 1, j), grid.at(i, j));

  if (grid.periodic[0])
    out.periods[0] = phi(n1 - 1, 0) + lift_increment(grid.at(n1 - 1, 0), grid.at(0, 0)) - phi(0, 0);
  if (grid.periodic[1])
    out.periods[1] = phi(0, n2 - 1) + lift_increment(grid.at(0, n2 - 1), grid.at(0, 0)) - phi(0, 0);
  return out;
}

HeisenbergPoint dilate(const HeisenbergPoint& q, double r) {
  if (!(r > 0.0)) throw DomainError("dilation factor must be positive");
  return {q.phi / (r * r), q.y / r};
}

double relative_phi(const HeisenbergPoint& q0, const HeisenbergPoint& q, double phi_period) {
  return reduce_period(q.phi - q0.phi - jmul(q0.y).dot(q.y), phi_period);
}

GaugeFrame gauge_h(const HeisenbergPoint& q0, const HeisenbergPoint& q, double phi_period) {
  GaugeFrame g;
  const double rho2 = (q.y - q0.y).squaredNorm();
  g.rho = std::sqrt(rho2);
  g.phi = relative_phi(q0, q, phi_period);
  g.r_gauge = std::pow(rho2 * rho2 + 4.0 * g.phi * g.phi, 0.25);
  if (rho2 > 0.0) {
    g.sigma = 2.0 * g.phi / rho2;
    g.sigma_set = true;
  }
  return g;
}

double model_gauge(const HeisenbergPoint& q) {
  return std::pow(std::pow(q.y.squaredNorm(), 2) + 4.0 * q.phi * q.phi, 0.25);
}

Vec5 heis_to_frame(const Vec4& y, const Vec5& X) {
  Vec5 f;
  f(0) = -X(0) + jmul(y).dot(X.tail<4>());
  f.tail<4>() = X.tail<4>();
  return f;
}

Vec5 heis_from_frame(const Vec4& y, const Vec5& f) {
  Vec5 X;
  X(0) = -f(0) + jmul(y).dot(f.tail<4>());
  X.tail<4>() = f.tail<4>();
  return X;
}

Vec5 hamiltonian_field_h(const ScalarField& h, const HeisenbergPoint& q, ReebConvention conv) {
  const Vec5 x = q.coords();
  const double hv = h.value(x);
  const VecX dh = h.gradient(x);
  // Horizontal gradient for g_H = dy^2 + alpha^2: y-slot of the frame gradient.
  const Vec4 gh = dh.tail<4>() + dh(0) * jmul(q.y);
  const double c = reeb_coefficient(conv);
  const double kappa = -0.5 * c;  // c alpha(d_phi) / 2 with alpha(d_phi) = -1
  Vec5 f;
  f(0) = -c * hv;  // alpha(c h d_phi)
  f.tail<4>() = kappa * jmul(gh);
  return heis_from_frame(q.y, f);
}

}  // namespace leg

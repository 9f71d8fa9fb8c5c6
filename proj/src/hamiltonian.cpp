#include "leg/hamiltonian.hpp"

#include <cmath>

namespace leg {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

void enumerate_powers(int dim, int degree, std::vector<int>& cur, int slot, std::vector<std::vector<int>>& out) {
  if (slot == dim) {
    out.push_back(cur);
    return;
  }
  int used = 0;
  for (int i = 0; i < slot; ++i) used += cur[i];
  for (int p = 0; p + used <= degree; ++p) {
    cur[slot] = p;
    enumerate_powers(dim, degree, cur, slot + 1, out);
  }
  cur[slot] = 0;
}

}  // namespace

double Polynomial::value(const VecX& x) const {
  double s = 0.0;
  for (const auto& m : terms) {
    double t = m.coeff;
    for (int i = 0; i < dim; ++i) t *= ipow(x(i), m.powers[i]);
    s += t;
  }
  return s;
}

VecX Polynomial::gradient(const VecX& x) const {
  VecX g = VecX::Zero(dim);
  for (const auto& m : terms)
    for (int k = 0; k < dim; ++k) {
      if (m.powers[k] == 0) continue;
      double t = m.coeff * m.powers[k];
      for (int i = 0; i < dim; ++i) t *= ipow(x(i), m.powers[i] - (i == k ? 1 : 0));
      g(k) += t;
    }
  return g;
}

MatX Polynomial::hessian(const VecX& x) const {
  MatX H = MatX::Zero(dim, dim);
  for (const auto& m : terms)
    for (int k = 0; k < dim; ++k)
      for (int l = 0; l < dim; ++l) {
        std::vector<int> p = m.powers;
        double t = m.coeff;
        t *= p[k]--;
        if (p[k] < 0) continue;
        t *= p[l]--;
        if (p[l] < 0 || t == 0.0) continue;
        for (int i = 0; i < dim; ++i) t *= ipow(x(i), p[i]);
        H(k, l) += t;
      }
  return H;
}

ScalarField Polynomial::field() const {
  const Polynomial p = *this;
  return {[p](const VecX& x) { return p.value(x); }, [p](const VecX& x) { return p.gradient(x); },
          [p](const VecX& x) { return p.hessian(x); }};
}

double Polynomial::coefficient_norm() const {
  double s = 0.0;
  for (const auto& m : terms) s += m.coeff * m.coeff;
  return std::sqrt(s);
}

Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<std::vector<int>> powers;
  std::vector<int> cur(dim, 0);
  enumerate_powers(dim, degree, cur, 0, powers);
  Polynomial p;
  p.dim = dim;
  for (auto& pw : powers) p.terms.push_back({N(rng), pw});
  return p;
}

ScalarField constant_field(double c) {
  return {[c](const VecX&) { return c; }, [](const VecX& x) { return VecX::Zero(x.size()).eval(); },
          [](const VecX& x) { return MatX::Zero(x.size(), x.size()).eval(); }};
}

ScalarField coordinate_field(int dim, int i, double scale) {
  return {[i, scale](const VecX& x) { return scale * x(i); },
          [dim, i, scale](const VecX&) {
            VecX g = VecX::Zero(dim);
            g(i) = scale;
            return g;
          },
          [dim](const VecX&) { return MatX::Zero(dim, dim).eval(); }};
}

ScalarField bump_field(const VecX& center, double radius, std::vector<int> slots) {
  if (slots.empty())
    for (int i = 0; i < center.size(); ++i) slots.push_back(i);
  const double r2 = radius * radius;
  auto t_of = [center, slots, r2](const VecX& x) {
    double s = 0.0;
    for (int i : slots) s += std::pow(x(i) - center(i), 2);
    return s / r2;
  };
  auto value = [t_of](const VecX& x) {
    const double t = t_of(x);
    return t < 1.0 ? std::pow(1.0 - t, 4) : 0.0;
  };
  auto gradient = [t_of, center, slots, r2](const VecX& x) {
    VecX g = VecX::Zero(x.size());
    const double t = t_of(x);
    if (t >= 1.0) return g;
    const double dpsi = -4.0 * std::pow(1.0 - t, 3);
    for (int i : slots) g(i) = dpsi * 2.0 * (x(i) - center(i)) / r2;
    return g;
  };
  auto hessian = [t_of, center, slots, r2](const VecX& x) {
    MatX H = MatX::Zero(x.size(), x.size());
    const double t = t_of(x);
    if (t >= 1.0) return H;
    const double d1 = -4.0 * std::pow(1.0 - t, 3), d2 = 12.0 * std::pow(1.0 - t, 2);
    for (int i : slots) {
      H(i, i) += d1 * 2.0 / r2;
      for (int j : slots) H(i, j) += d2 * 4.0 * (x(i) - center(i)) * (x(j) - center(j)) / (r2 * r2);
    }
    return H;
  };
  return {value, gradient, hessian};
}

bool HamiltonianSpec::supported_at(const VecX& q) const {
  if (in_support) return in_support(q);
  return h.value(q) != 0.0 || h.gradient(q).squaredNorm() > 0.0;
}

MatX hamiltonian_deformation(const DiscreteImmersion& L, const HamiltonianSpec& hs) {
  MatX w(L.num_vertices(), L.target.dim());
  for (int v = 0; v < L.num_vertices(); ++v)
    w.row(v) = L.target.hamiltonian_field(hs.h, L.point(v), hs.convention).transpose();
  return w;
}

VectorField hamiltonian_vector_field(const Target& t, const ScalarField& h, ReebConvention conv) {
  return [t, h, conv](const VecX& q) { return t.hamiltonian_field(h, q, conv); };
}

namespace {

VecX moved(const Target& t, const VecX& q, const VecX& d) { return t.retract(q + d); }

VecX directional_derivative(const Target& t, const VectorField& Y, const VecX& q, const VecX& X, double step) {
  return (Y(moved(t, q, step * X)) - Y(moved(t, q, -step * X))) / (2.0 * step);
}

}  // namespace

double lie_derivative_alpha(const Target& t, const VectorField& Y, const VecX& q, const VecX& X, double step) {
  const VecX y = Y(q);
  const VecX dY = directional_derivative(t, Y, q, X, step);
  const double plus = t.alpha(q + step * y, X + step * dY);
  const double minus = t.alpha(q - step * y, X - step * dY);
  return (plus - minus) / (2.0 * step);
}

double first_order_violation(const Target& t, const VectorField& Y, const VecX& q, const VecX& X, double tau) {
  const VecX dY = directional_derivative(t, Y, q, X, 1e-5);
  const VecX q1 = moved(t, q, tau * Y(q));
  const VecX X1 = t.tangent_project(q1, X + tau * dY);
  return std::abs(t.alpha(q1, X1));
}

VecX random_point(const Target& t, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> N(0.0, 1.0);
  VecX x(t.dim());
  for (int i = 0; i < t.dim(); ++i) x(i) = N(rng) * scale;
  return t.retract(x);
}

VecX random_tangent(const Target& t, const VecX& q, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  VecX x(t.dim());
  for (int i = 0; i < t.dim(); ++i) x(i) = N(rng);
  return t.tangent_project(q, x);
}

VecX random_horizontal(const Target& t, const VecX& q, std::mt19937_64& rng) {
  const VecX f = t.horizontal_frame(q, t.to_frame(q, random_tangent(t, q, rng)));
  return t.from_frame(q, f / f.norm());
}

}  // namespace leg

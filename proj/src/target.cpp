#include "leg/target.hpp"

#include "leg/errors.hpp"
#include "leg/heisenberg.hpp"
#include "leg/stiefel.hpp"

namespace leg {

std::string to_string(TargetKind k) { return k == TargetKind::Stiefel ? "stiefel" : "heisenberg"; }

TargetKind target_from_string(const std::string& s) {
  if (s == "stiefel") return TargetKind::Stiefel;
  if (s == "heisenberg") return TargetKind::Heisenberg;
  throw ValidationError("unknown target '" + s + "'");
}

namespace {
StiefelPoint sp(const VecX& q) { return {q.head<4>(), q.segment<4>(4)}; }
}  // namespace

VecX Target::diff(const VecX& x, const VecX& y) const {
  VecX d = y - x;
  if (kind == TargetKind::Heisenberg) d(0) = reduce_period(d(0), phi_period);
  return d;
}

VecX Target::retract(const VecX& x) const {
  if (kind == TargetKind::Heisenberg) return x;
  return leg::retract(Vec8(x)).coords();
}

VecX Target::midpoint(const VecX& x, const VecX& y) const { return retract(x + 0.5 * diff(x, y)); }

VecX Target::tangent_project(const VecX& q, const VecX& X) const {
  if (kind == TargetKind::Heisenberg) return X;
  return leg::tangent_project(sp(q), Vec8(X));
}

double Target::alpha(const VecX& q, const VecX& X) const {
  if (kind == TargetKind::Heisenberg) return -X(0) + jmul(q.tail<4>()).dot(X.tail<4>());
  return q.head<4>().dot(X.tail<4>()) - q.tail<4>().dot(X.head<4>());
}

VecX Target::reeb(const VecX& q) const {
  if (kind == TargetKind::Heisenberg) {
    VecX r = VecX::Zero(5);
    r(0) = 1.0;
    return r;
  }
  VecX r(8);
  r << q.tail<4>(), -q.head<4>();
  return r;
}

VecX Target::reeb_flow(const VecX& q, double theta) const {
  if (kind == TargetKind::Heisenberg) {
    VecX r = q;
    r(0) += theta;
    return r;
  }
  return reeb_rotate(sp(q), theta).coords();
}

VecX Target::to_frame(const VecX& q, const VecX& X) const {
  if (kind == TargetKind::Stiefel) return X;
  return heis_to_frame(q.tail<4>(), Vec5(X));
}

VecX Target::from_frame(const VecX& q, const VecX& f) const {
  if (kind == TargetKind::Stiefel) return f;
  return heis_from_frame(q.tail<4>(), Vec5(f));
}

VecX Target::reeb_frame(const VecX& q) const {
  if (kind == TargetKind::Stiefel) return reeb(q);
  VecX r = VecX::Zero(5);
  r(0) = -1.0;
  return r;
}

VecX Target::horizontal_frame(const VecX& q, const VecX& f) const {
  if (kind == TargetKind::Heisenberg) {
    VecX h = f;
    h(0) = 0.0;
    return h;
  }
  const VecX t = tangent_project(q, f);
  const VecX R = reeb(q);
  return t - 0.5 * t.dot(R) * R;
}

VecX Target::jh_frame(const VecX& f) const {
  VecX out(f.size());
  if (kind == TargetKind::Heisenberg) {
    out(0) = 0.0;
    out.tail<4>() = jmul(f.tail<4>());
    return out;
  }
  out << -f.tail<4>(), f.head<4>();
  return out;
}

VecX Target::frame_gradient(const VecX& q, const VecX& dF) const {
  if (kind == TargetKind::Stiefel) return tangent_project(q, dF);
  VecX g(5);
  g(0) = -dF(0);
  g.tail<4>() = dF.tail<4>() + dF(0) * jmul(q.tail<4>());
  return g;
}

VecX Target::hamiltonian_field(double h, const VecX& dh, const VecX& q, ReebConvention conv) const {
  const double c = reeb_coefficient(conv);
  const VecX gh = horizontal_frame(q, frame_gradient(q, dh));
  const VecX f = horizontal_coefficient(conv) * jh_frame(gh) + c * h * reeb_frame(q);
  return from_frame(q, f);
}

VecX Target::hamiltonian_field(const ScalarField& h, const VecX& q, ReebConvention conv) const {
  return hamiltonian_field(h.value(q), h.gradient(q), q, conv);
}

}  // namespace leg

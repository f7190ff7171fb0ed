#include "relfrac/params.hpp"

#include <cmath>
#include <stdexcept>

namespace relfrac {

PotentialSpec PotentialSpec::constant(double a) {
  PotentialSpec p;
  p.a_kind = AKind::constant;
  p.a0 = a;
  return p;
}

PotentialSpec PotentialSpec::two_point(double am, double ap) {
  PotentialSpec p;
  p.a_kind = AKind::two_point;
  p.a_minus = am;
  p.a_plus = ap;
  return p;
}

PotentialSpec PotentialSpec::with_power_h(double c, double chi_exp) const {
  PotentialSpec p = *this;
  p.h_kind = HKind::power;
  p.c_h = c;
  p.chi = chi_exp;
  return p;
}

double PotentialSpec::a_side(int side) const {
  switch (a_kind) {
    case AKind::zero: return 0.0;
    case AKind::constant: return a0;
    case AKind::two_point: return side > 0 ? a_plus : a_minus;
  }
  return 0.0;
}

double PotentialSpec::h(double s, double r) const {
  if (h_kind == HKind::zero) return 0.0;
  return c_h * std::pow(r, -2.0 * s + chi);
}

double PotentialSpec::C_h(double s) const {
  if (h_kind == HKind::zero) return 0.0;
  return std::abs(c_h) * std::max(1.0, std::abs(2.0 * s - chi) + 1.0);
}

std::vector<std::string> Params::problems(bool require_gap) const {
  std::vector<std::string> out;
  if (N < 1) out.push_back("N must be a positive integer");
  if (!(s > 0.0 && s < 1.0)) out.push_back("s must lie in (0,1)");
  if (require_gap && N >= 1 && s > 0.0 && !(N >= 2.0 * s)) out.push_back("N >= 2s violated");
  if (!(m >= 0.0) || !std::isfinite(m)) out.push_back("m must be finite and >= 0");
  if (potential.a_kind == PotentialSpec::AKind::two_point && N != 1)
    out.push_back("two_point a requires N = 1");
  if (potential.h_kind == PotentialSpec::HKind::power &&
      !(potential.chi > 0.0 && potential.chi < 1.0))
    out.push_back("chi must lie in (0,1)");
  return out;
}

void Params::validate(bool require_gap) const {
  auto p = problems(require_gap);
  if (!p.empty()) throw std::invalid_argument("invalid params: " + p.front());
}

}  // namespace relfrac

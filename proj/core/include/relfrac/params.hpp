#pragma once

#include <string>
#include <vector>

namespace relfrac {

// a(theta') on S^{N-1} and h(x) = c_h |x|^{-2s+chi}.
struct PotentialSpec {
  enum class AKind { zero, constant, two_point };
  enum class HKind { zero, power };

  AKind a_kind = AKind::zero;
  double a0 = 0.0;
  double a_minus = 0.0;  // N = 1: value at x < 0
  double a_plus = 0.0;   // N = 1: value at x > 0

  HKind h_kind = HKind::zero;
  double c_h = 0.0;
  double chi = 0.5;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec constant(double a);
  static PotentialSpec two_point(double am, double ap);
  PotentialSpec with_power_h(double c, double chi_exp) const;

  // a at the endpoint x>0 (side=+1) or x<0 (side=-1).
  double a_side(int side) const;
  double h(double s, double r) const;
  // bound constant in |h| + |x.grad h| <= C_h |x|^{-2s+chi}
  double C_h(double s) const;
};

struct Params {
  int N = 1;
  double s = 0.5;
  double m = 0.0;
  PotentialSpec potential;

  double half_gap() const { return 0.5 * (N - 2.0 * s); }  // (N-2s)/2

  // Throws std::invalid_argument on out-of-range data. N = 2s is accepted
  // (borderline case used by the extension machinery); Hardy-type routines
  // check N > 2s themselves. The angular eigenproblem is well posed for any
  // N >= 1 and s in (0,1), so it validates with require_gap = false.
  void validate(bool require_gap = true) const;
  std::vector<std::string> problems(bool require_gap = true) const;
};

}  // namespace relfrac

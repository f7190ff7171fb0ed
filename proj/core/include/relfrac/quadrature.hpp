#pragma once

#include <functional>
#include <vector>

namespace relfrac {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

GaussRule gauss_legendre(int n);
const GaussRule& gauss_legendre_16();
const GaussRule& gauss_legendre_48();

double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       const GaussRule& rule);

// Integral over [a,b] of f where f(x) ~ (x-a)^p near a (p > -1).
// Uses x = a + (b-a) y^q with q = 1/(p+1), which removes the leading power.
double integrate_left_singular(const std::function<double(double)>& f, double a, double b,
                               double p, const GaussRule& rule);
// Same with the singular endpoint at b.
double integrate_right_singular(const std::function<double(double)>& f, double a, double b,
                                double p, const GaussRule& rule);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Double-exponential quadrature; a or b may be +-infinity. Refines until the
// level difference drops below tol * L1; throws std::runtime_error if the
// final level difference exceeds sqrt(tol) * L1 (the error of the last level
// is roughly the square of that difference).
QuadResult integrate_de(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12);

// int_a^b sin^p(x) cos^q(x) dx for [a,b] inside [-pi/2, pi/2]; an endpoint at
// +-pi/2 is treated as a power singularity of order q (48-point Gauss after
// the substitution above); a range with both endpoints at +-pi/2 is split at
// 0. Cells must not contain 0 in their interior when p is not an integer.
double integrate_sin_cos_power(double a, double b, double sin_power, double cos_power);

}  // namespace relfrac

#include "relfrac/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace relfrac {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

const GaussRule& gauss_legendre_16() {
  static const GaussRule r = gauss_legendre(16);
  return r;
}

const GaussRule& gauss_legendre_48() {
  static const GaussRule r = gauss_legendre(48);
  return r;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       const GaussRule& rule) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a), sum = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) sum += rule.w[i] * f(c + h * rule.x[i]);
  return h * sum;
}

double integrate_left_singular(const std::function<double(double)>& f, double a, double b,
                               double p, const GaussRule& rule) {
  // x = a + L y^q, dx = L q y^{q-1} dy
  const double q = 1.0 / (p + 1.0), L = b - a;
  auto g = [&](double y) {
    if (y <= 0.0) return 0.0;
    return f(a + L * std::pow(y, q)) * L * q * std::pow(y, q - 1.0);
  };
  return integrate_gauss(g, 0.0, 1.0, rule);
}

double integrate_right_singular(const std::function<double(double)>& f, double a, double b,
                                double p, const GaussRule& rule) {
  return integrate_left_singular([&](double u) { return f(a + b - u); }, a, b, p, rule);
}

QuadResult integrate_de(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  boost::math::quadrature::tanh_sinh<double> ts(15);
  QuadResult r;
  r.value = ts.integrate(f, a, b, std::max(tol, 1e-15), &r.error, &r.l1);
  // r.error is the difference of the last two levels; the error of the final
  // level is roughly its square, so sqrt(tol) bounds an acceptable estimate
  if (!std::isfinite(r.value) || r.error > std::sqrt(tol) * std::max(r.l1, 1e-300)) {
    std::ostringstream os;
    os << "quadrature did not converge on [" << a << ", " << b << "]: value=" << r.value
       << " error=" << r.error << " L1=" << r.l1;
    throw std::runtime_error(os.str());
  }
  return r;
}

double integrate_sin_cos_power(double a, double b, double sin_power, double cos_power) {
  constexpr double half_pi = 0.5 * std::numbers::pi;
  auto f = [=](double x) {
    double v = std::pow(std::cos(x), cos_power);
    if (sin_power != 0.0) v *= std::pow(std::sin(x), sin_power);
    return v;
  };
  const auto& rule = gauss_legendre_48();
  const double tol = 1e-14;
  if (std::abs(b - half_pi) < tol && std::abs(a + half_pi) < tol)
    return integrate_sin_cos_power(a, 0.0, sin_power, cos_power) + integrate_sin_cos_power(0.0, b, sin_power, cos_power);
  if (std::abs(b - half_pi) < tol) return integrate_right_singular(f, a, b, cos_power, rule);
  if (std::abs(a + half_pi) < tol) return integrate_left_singular(f, a, b, cos_power, rule);
  return integrate_gauss(f, a, b, rule);
}

}  // namespace relfrac

#include "relfrac/spectral_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace relfrac {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place unnormalized complex DFT (sign = FFTW_FORWARD or FFTW_BACKWARD).
void dft(std::vector<std::complex<double>>& a, int dim, int n, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = dim == 1 ? fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE)
                    : fftw_plan_dft_2d(n, n, p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

void check_shape(int dim, double L, int n, std::size_t count) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("SpectralField: dim must be 1 or 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("SpectralField: box length must be positive");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("SpectralField: grid_n must be even and >= 2");
  const std::size_t expect = dim == 1 ? std::size_t(n) : std::size_t(n) * n;
  if (count != expect) throw std::invalid_argument("SpectralField: sample count does not match grid");
}

}  // namespace

SpectralField SpectralField::from_values(int dim, double box_length, int grid_n, std::vector<double> values) {
  check_shape(dim, box_length, grid_n, values.size());
  SpectralField f;
  f.dim_ = dim;
  f.L_ = box_length;
  f.n_ = grid_n;
  f.modal_.assign(values.begin(), values.end());
  dft(f.modal_, dim, grid_n, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(values.size());
  for (auto& c : f.modal_) c *= scale;
  f.values_ = std::move(values);
  return f;
}

SpectralField SpectralField::from_function(int dim, double box_length, int grid_n,
                                           const std::function<double(const double*)>& fn) {
  check_shape(dim, box_length, grid_n, dim == 1 ? grid_n : std::size_t(grid_n) * grid_n);
  const double h = box_length / grid_n;
  std::vector<double> v(dim == 1 ? grid_n : std::size_t(grid_n) * grid_n);
  double x[2];
  if (dim == 1) {
    for (int j = 0; j < grid_n; ++j) {
      x[0] = -0.5 * box_length + j * h;
      v[j] = fn(x);
    }
  } else {
    for (int i = 0; i < grid_n; ++i)
      for (int j = 0; j < grid_n; ++j) {
        x[0] = -0.5 * box_length + i * h;
        x[1] = -0.5 * box_length + j * h;
        v[std::size_t(i) * grid_n + j] = fn(x);
      }
  }
  return from_values(dim, box_length, grid_n, std::move(v));
}

SpectralField SpectralField::from_modal(int dim, double box_length, int grid_n,
                                        std::vector<std::complex<double>> modal) {
  check_shape(dim, box_length, grid_n, modal.size());
  std::vector<std::complex<double>> work = modal;
  dft(work, dim, grid_n, FFTW_BACKWARD);
  double vmax = 0.0, imax = 0.0;
  for (const auto& c : work) {
    vmax = std::max(vmax, std::abs(c.real()));
    imax = std::max(imax, std::abs(c.imag()));
  }
  if (imax > 1e-12 * std::max(vmax, 1e-300) && imax > 1e-300)
    throw std::invalid_argument("SpectralField: coefficients are not Hermitian");
  SpectralField f;
  f.dim_ = dim;
  f.L_ = box_length;
  f.n_ = grid_n;
  f.values_.resize(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) f.values_[i] = work[i].real();
  f.modal_ = std::move(modal);
  return f;
}

double SpectralField::xi(int j) const {
  const int k = j < n_ / 2 ? j : j - n_;
  return 2.0 * std::numbers::pi * k / L_;
}

double SpectralField::xi_squared(std::size_t flat) const {
  if (dim_ == 1) {
    const double x = xi(static_cast<int>(flat));
    return x * x;
  }
  const double a = xi(static_cast<int>(flat / n_)), b = xi(static_cast<int>(flat % n_));
  return a * a + b * b;
}

SpectralField SpectralField::map_modes(const std::function<double(double)>& f) const {
  std::vector<std::complex<double>> out(modal_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = modal_[i] * f(xi_squared(i));
  // the symbol depends on |xi| only, so Hermitian symmetry is preserved; the
  // Nyquist row is paired with itself and stays real
  return from_modal(dim_, L_, n_, std::move(out));
}

double SpectralField::hermitian_defect() const {
  double cmax = 0.0, d = 0.0;
  auto neg = [this](int j) { return (n_ - j) % n_; };
  for (std::size_t i = 0; i < modal_.size(); ++i) {
    cmax = std::max(cmax, std::abs(modal_[i]));
    std::size_t partner;
    if (dim_ == 1) {
      partner = neg(static_cast<int>(i));
    } else {
      const int a = static_cast<int>(i / n_), b = static_cast<int>(i % n_);
      partner = std::size_t(neg(a)) * n_ + neg(b);
    }
    d = std::max(d, std::abs(modal_[i] - std::conj(modal_[partner])));
  }
  return cmax > 0.0 ? d / cmax : 0.0;
}

double SpectralField::grid_norm() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return std::sqrt(std::pow(spacing(), dim_) * acc);
}

double SpectralField::modal_norm() const {
  double acc = 0.0;
  for (const auto& c : modal_) acc += std::norm(c);
  return std::sqrt(std::pow(L_, dim_) * acc);
}

std::string SpectralField::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  if (dim_ == 1) {
    os << "x,value\n";
    for (int j = 0; j < n_; ++j) os << coordinate(j) << ',' << values_[j] << '\n';
  } else {
    os << "x,y,value\n";
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        os << coordinate(i) << ',' << coordinate(j) << ',' << values_[std::size_t(i) * n_ + j] << '\n';
  }
  return os.str();
}

}  // namespace relfrac

#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace relfrac {

// Real samples on the periodic grid x_j = -L/2 + j h, h = L/n (per axis), and
// their Fourier coefficients c_k = n^{-dim} sum_j u_j exp(-2 pi i j.k / n),
// so that u_j = sum_k c_k exp(i xi_k.(x_j - x_0)) with xi_k = 2 pi k / L,
// k in [-n/2, n/2). Storage is row-major with the last axis fastest.
class SpectralField {
 public:
  SpectralField() = default;

  static SpectralField from_values(int dim, double box_length, int grid_n, std::vector<double> values);
  static SpectralField from_function(int dim, double box_length, int grid_n,
                                     const std::function<double(const double*)>& f);
  // Imaginary parts of the synthesized samples must stay below 1e-12 of the
  // largest sample, otherwise std::invalid_argument.
  static SpectralField from_modal(int dim, double box_length, int grid_n,
                                  std::vector<std::complex<double>> modal);

  int dim() const { return dim_; }
  double box_length() const { return L_; }
  int grid_n() const { return n_; }
  double spacing() const { return L_ / n_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::complex<double>>& modal() const { return modal_; }

  double coordinate(int j) const { return -0.5 * L_ + j * spacing(); }
  // Signed wavenumber of FFT index j along one axis.
  double xi(int j) const;
  // |xi|^2 of the flat modal index.
  double xi_squared(std::size_t flat) const;

  // Multiply every coefficient by f(|xi|^2) and resynthesize.
  SpectralField map_modes(const std::function<double(double)>& f) const;

  // max |c_k - conj(c_{-k})| relative to max |c|.
  double hermitian_defect() const;
  // sqrt(h^dim sum u^2) and sqrt(L^dim sum |c|^2).
  double grid_norm() const;
  double modal_norm() const;

  // CSV with columns x,value (dim 1) or x,y,value (dim 2).
  std::string to_csv() const;

 private:
  int dim_ = 1;
  double L_ = 1.0;
  int n_ = 0;
  std::vector<double> values_;
  std::vector<std::complex<double>> modal_;
};

}  // namespace relfrac

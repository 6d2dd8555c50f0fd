#pragma once

// Discrete calculus on the unit torus R/Z sampled at N equispaced nodes.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace phasekit {

class PeriodicGrid {
 public:
  /// Requires n >= 8 and n even.
  explicit PeriodicGrid(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double node(std::size_t i) const noexcept { return static_cast<double>(i) * h_; }

  bool operator==(const PeriodicGrid& other) const noexcept { return n_ == other.n_; }

 private:
  std::size_t n_;
  double h_;
};

/// One real sample per grid node. Entries are expected to stay finite; operations that
/// consume a field check this and throw DomainError otherwise.
class GridField {
 public:
  explicit GridField(PeriodicGrid grid, double fill = 0.0);
  GridField(PeriodicGrid grid, std::vector<double> values);

  template <typename F>
  static GridField from_function(PeriodicGrid grid, F&& f) {
    GridField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.node(i));
    return out;
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  /// Periodic access, index taken modulo N.
  double wrap(std::ptrdiff_t i) const noexcept;

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  bool all_finite() const noexcept;
  double min() const;
  double max() const;
  double max_abs() const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s);

  template <typename F>
  GridField map(F&& f) const {
    GridField out(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = f(values_[i]);
    return out;
  }

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(GridField a, double s);
GridField operator*(double s, GridField a);
/// Nodal product.
GridField hadamard(const GridField& a, const GridField& b);

void require_finite(const GridField& f, const char* what);

enum class Backend { central, spectral };

/// Discrete first or second derivative. Central: second-order stencils. Spectral: exact
/// on the resolved modes; the Nyquist mode is dropped for order 1.
GridField derivative(const GridField& f, int order, Backend backend);

/// h * sum f_i.
double mean(const GridField& f);

/// Mean-free primitive via Fourier division by 2*pi*i*k. Input mean must vanish to 1e-10.
GridField primitive(const GridField& f);

enum class HelmholtzBackend { fourier, finite_difference };

/// Solves -kappa c'' + gamma c = gamma rho for the order parameter c.
GridField helmholtz_solve(const GridField& rho, double kappa, double gamma,
                          HelmholtzBackend backend = HelmholtzBackend::fourier);

/// max |-kappa c'' + gamma c - gamma rho| with the operator matching the given backend.
double helmholtz_residual(const GridField& c, const GridField& rho, double kappa, double gamma,
                          HelmholtzBackend backend = HelmholtzBackend::fourier);

/// Normalized DFT coefficients f_hat_m = (1/N) sum_i f_i exp(-2 pi i m x_i), m = 0..N/2.
std::vector<std::complex<double>> fourier_coefficients(const GridField& f);
GridField from_fourier_coefficients(const PeriodicGrid& grid,
                                    std::span<const std::complex<double>> coeffs);

/// Discrete Sobolev norm with Fourier symbols: sum_m (1 + (2 pi m)^2)^k |f_hat_m|^2 over all m.
double sobolev_norm(const GridField& f, int k);
/// sqrt(h * sum f_i^2).
double l2_norm(const GridField& f);

/// Zeroes all modes with |m| > N/3.
GridField dealias(const GridField& f);

/// Periodic cubic Lagrange interpolation at an arbitrary point (wrapped onto [0,1)).
double interpolate_cubic(const GridField& f, double x);

/// Wraps x onto [0,1).
double wrap_unit(double x) noexcept;

/// Solves the cyclic tridiagonal system
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]  (indices mod n).
/// Requires n >= 3 and a nonsingular system (diagonal dominance is the intended regime).
std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs);

}  // namespace phasekit

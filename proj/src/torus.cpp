#include "phasekit/torus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "phasekit/error.hpp"

namespace phasekit {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// FFTW planning is not thread-safe; execution with new arrays is. Plans are created once
// per size and shared.
struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

class PlanCache {
 public:
  const FftPlans& get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    const auto ni = static_cast<int>(n);
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    FftPlans p;
    p.forward = fftw_plan_dft_r2c_1d(ni, in, out, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_1d(ni, out, in, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    return plans_.emplace(n, p).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, FftPlans> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

struct FftwDeleter {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

using RealBuffer = std::unique_ptr<double, FftwDeleter>;
using ComplexBuffer = std::unique_ptr<fftw_complex, FftwDeleter>;

std::vector<std::complex<double>> forward_transform(std::span<const double> values) {
  const std::size_t n = values.size();
  const FftPlans& plans = plan_cache().get(n);
  RealBuffer in(fftw_alloc_real(n));
  ComplexBuffer out(fftw_alloc_complex(n / 2 + 1));
  std::copy(values.begin(), values.end(), in.get());
  fftw_execute_dft_r2c(plans.forward, in.get(), out.get());
  std::vector<std::complex<double>> coeffs(n / 2 + 1);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    coeffs[m] = {out.get()[m][0] * scale, out.get()[m][1] * scale};
  }
  return coeffs;
}

std::vector<double> backward_transform(std::size_t n, std::span<const std::complex<double>> coeffs) {
  const FftPlans& plans = plan_cache().get(n);
  ComplexBuffer in(fftw_alloc_complex(n / 2 + 1));
  RealBuffer out(fftw_alloc_real(n));
  for (std::size_t m = 0; m < n / 2 + 1; ++m) {
    in.get()[m][0] = coeffs[m].real();
    in.get()[m][1] = coeffs[m].imag();
  }
  fftw_execute_dft_c2r(plans.backward, in.get(), out.get());
  return std::vector<double>(out.get(), out.get() + n);
}

void require_same_grid(const GridField& a, const GridField& b) {
  if (!(a.grid() == b.grid())) throw DomainError("grid fields live on different grids");
}

// Non-periodic Thomas sweep; all spans of length n, lower[0] and upper[n-1] ignored.
std::vector<double> thomas(std::span<const double> lower, std::span<const double> diag,
                           std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n), x(n);
  c[0] = upper[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double denom = diag[i] - lower[i] * c[i - 1];
    if (denom == 0.0) throw DomainError("singular tridiagonal system");
    c[i] = upper[i] / denom;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace

PeriodicGrid::PeriodicGrid(std::size_t n) : n_(n), h_(1.0 / static_cast<double>(n)) {
  if (n < 8 || n % 2 != 0) {
    throw DomainError("periodic grid needs an even number of points >= 8, got " + std::to_string(n));
  }
}

GridField::GridField(PeriodicGrid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

GridField::GridField(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DomainError("grid field length " + std::to_string(values_.size()) +
                      " does not match grid size " + std::to_string(grid_.size()));
  }
}

double GridField::wrap(std::ptrdiff_t i) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(values_.size());
  std::ptrdiff_t j = i % n;
  if (j < 0) j += n;
  return values_[static_cast<std::size_t>(j)];
}

bool GridField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double GridField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridField& GridField::operator+=(const GridField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(GridField a, double s) { return a *= s; }
GridField operator*(double s, GridField a) { return a *= s; }

GridField hadamard(const GridField& a, const GridField& b) {
  require_same_grid(a, b);
  GridField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

void require_finite(const GridField& f, const char* what) {
  if (!f.all_finite()) throw DomainError(std::string("non-finite entries in ") + what);
}

GridField derivative(const GridField& f, int order, Backend backend) {
  require_finite(f, "derivative input");
  if (order != 1 && order != 2) throw DomainError("derivative order must be 1 or 2");
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  GridField out(f.grid());

  if (backend == Backend::central) {
    const auto values = f.values();
    for (std::size_t i = 0; i < n; ++i) {
      const double left = values[(i + n - 1) % n];
      const double right = values[(i + 1) % n];
      out[i] = order == 1 ? (right - left) / (2.0 * h) : (right - 2.0 * values[i] + left) / (h * h);
    }
    return out;
  }

  auto coeffs = fourier_coefficients(f);
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    const double k = two_pi * static_cast<double>(m);
    if (order == 1) {
      coeffs[m] = (m == n / 2) ? std::complex<double>{} : coeffs[m] * std::complex<double>(0.0, k);
    } else {
      coeffs[m] *= -k * k;
    }
  }
  return from_fourier_coefficients(f.grid(), coeffs);
}

double mean(const GridField& f) {
  require_finite(f, "mean input");
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().spacing();
}

GridField primitive(const GridField& f) {
  const double m0 = mean(f);
  if (std::abs(m0) > 1e-10) {
    throw DomainError("primitive requires a mean-free field, mean = " + std::to_string(m0));
  }
  const std::size_t n = f.size();
  auto coeffs = fourier_coefficients(f);
  coeffs[0] = 0.0;
  coeffs[n / 2] = 0.0;
  for (std::size_t m = 1; m < n / 2; ++m) {
    coeffs[m] /= std::complex<double>(0.0, two_pi * static_cast<double>(m));
  }
  return from_fourier_coefficients(f.grid(), coeffs);
}

GridField helmholtz_solve(const GridField& rho, double kappa, double gamma, HelmholtzBackend backend) {
  if (!(kappa > 0.0) || !(gamma > 0.0)) {
    throw DomainError("helmholtz_solve needs kappa > 0 and gamma > 0");
  }
  require_finite(rho, "helmholtz_solve density");

  if (backend == HelmholtzBackend::fourier) {
    auto coeffs = fourier_coefficients(rho);
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
      const double k = two_pi * static_cast<double>(m);
      coeffs[m] *= gamma / (kappa * k * k + gamma);
    }
    return from_fourier_coefficients(rho.grid(), coeffs);
  }

  const std::size_t n = rho.size();
  const double h = rho.grid().spacing();
  const double off = -kappa / (h * h);
  std::vector<double> lower(n, off), upper(n, off), diag(n, gamma + 2.0 * kappa / (h * h)), rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = gamma * rho[i];
  return GridField(rho.grid(), solve_cyclic_tridiagonal(lower, diag, upper, rhs));
}

double helmholtz_residual(const GridField& c, const GridField& rho, double kappa, double gamma,
                          HelmholtzBackend backend) {
  require_same_grid(c, rho);
  const GridField cxx =
      derivative(c, 2, backend == HelmholtzBackend::fourier ? Backend::spectral : Backend::central);
  double r = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    r = std::max(r, std::abs(-kappa * cxx[i] + gamma * c[i] - gamma * rho[i]));
  }
  return r;
}

std::vector<std::complex<double>> fourier_coefficients(const GridField& f) {
  return forward_transform(f.values());
}

GridField from_fourier_coefficients(const PeriodicGrid& grid,
                                    std::span<const std::complex<double>> coeffs) {
  if (coeffs.size() != grid.size() / 2 + 1) throw DomainError("coefficient count mismatch");
  return GridField(grid, backward_transform(grid.size(), coeffs));
}

double sobolev_norm(const GridField& f, int k) {
  require_finite(f, "sobolev_norm input");
  const std::size_t n = f.size();
  const auto coeffs = fourier_coefficients(f);
  double sum = 0.0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    const double wave = two_pi * static_cast<double>(m);
    const double weight = std::pow(1.0 + wave * wave, k);
    const double multiplicity = (m == 0 || m == n / 2) ? 1.0 : 2.0;
    sum += multiplicity * weight * std::norm(coeffs[m]);
  }
  return std::sqrt(sum);
}

double l2_norm(const GridField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v * v;
  return std::sqrt(sum * f.grid().spacing());
}

GridField dealias(const GridField& f) {
  auto coeffs = fourier_coefficients(f);
  const std::size_t cutoff = f.size() / 3;
  for (std::size_t m = cutoff + 1; m < coeffs.size(); ++m) coeffs[m] = 0.0;
  return from_fourier_coefficients(f.grid(), coeffs);
}

double wrap_unit(double x) noexcept {
  double y = x - std::floor(x);
  if (y >= 1.0) y -= 1.0;
  return y;
}

double interpolate_cubic(const GridField& f, double x) {
  const double n = static_cast<double>(f.size());
  const double s = wrap_unit(x) * n;
  const double base = std::floor(s);
  const double t = s - base;
  const auto i = static_cast<std::ptrdiff_t>(base);
  const double wm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return wm1 * f.wrap(i - 1) + w0 * f.wrap(i) + w1 * f.wrap(i + 1) + w2 * f.wrap(i + 2);
}

std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (n < 3 || lower.size() != n || upper.size() != n || rhs.size() != n) {
    throw DomainError("cyclic tridiagonal system needs n >= 3 and matching lengths");
  }
  // Sherman-Morrison: split off the two corner entries as a rank-one update.
  const double corner_top = lower[0];       // coefficient of x[n-1] in row 0
  const double corner_bottom = upper[n - 1];  // coefficient of x[0] in row n-1
  const double shift = -diag[0];

  std::vector<double> modified(diag.begin(), diag.end());
  modified[0] = diag[0] - shift;
  modified[n - 1] = diag[n - 1] - corner_bottom * corner_top / shift;

  std::vector<double> x = thomas(lower, modified, upper, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = shift;
  u[n - 1] = corner_bottom;
  const std::vector<double> z = thomas(lower, modified, upper, u);

  const double fact = (x[0] + corner_top * x[n - 1] / shift) /
                      (1.0 + z[0] + corner_top * z[n - 1] / shift);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

}  // namespace phasekit

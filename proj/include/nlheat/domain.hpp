#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace nlheat {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Box [0, L_0] x ... x [0, L_{dim-1}] with dim in {1, 2}.
class Domain {
 public:
  Domain(int dim, std::vector<double> lengths);

  int dim() const noexcept { return static_cast<int>(lengths_.size()); }
  std::span<const double> lengths() const noexcept { return lengths_; }
  double length(int axis) const { return lengths_.at(static_cast<std::size_t>(axis)); }
  double volume() const noexcept;
  double max_length() const noexcept;
  double min_length() const noexcept;

  // First positive Neumann eigenvalue, (pi / max L)^2.
  double lambda1() const noexcept;

  Domain dilated(double factor) const;
  bool contains(std::span<const double> x, double slack = 1e-12) const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  std::vector<double> lengths_;
};

Domain make_domain(int dim, const std::vector<double>& lengths);

// Midpoint-shifted tensor grid: x_j = (j + 1/2) L / M on every axis.
// Values are stored row-major with axis 0 slowest.
class Grid {
 public:
  Grid(Domain domain, std::vector<int> points_per_axis);

  const Domain& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim(); }
  std::span<const int> shape() const noexcept { return points_; }
  int points(int axis) const { return points_.at(static_cast<std::size_t>(axis)); }
  std::size_t size() const noexcept { return size_; }
  double spacing(int axis) const;
  double node(int axis, int j) const;
  double cell_volume() const noexcept;

  // lambda_k = sum_i (k_i pi / L_i)^2 per flat multi-index, same layout as values.
  std::span<const double> eigenvalues() const noexcept { return *eigenvalues_; }
  double max_eigenvalue() const noexcept;

  std::array<int, 2> unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(std::array<int, 2> index) const noexcept;

  // Same domain, each axis resized to ceil(factor * M).
  Grid scaled(double factor) const;
  Grid with_domain(Domain domain) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.domain_ == b.domain_ && a.points_ == b.points_;
  }

 private:
  Domain domain_;
  std::vector<int> points_;
  std::size_t size_ = 0;
  std::shared_ptr<const std::vector<double>> eigenvalues_;
};

class Field {
 public:
  Field(Grid grid, std::vector<double> values);
  static Field zeros(const Grid& grid);
  static Field constant(const Grid& grid, double value);
  static Field from_function(const Grid& grid,
                             const std::function<double(std::span<const double>)>& fn);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  // Throws NonFinite if any entry is NaN or infinite.
  void check_finite() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

// Coefficients in the L2-orthonormal Neumann eigenbasis
//   f_k(x) = prod_i n(k_i) cos(k_i pi x_i / L_i),  n(0) = L^{-1/2}, n(k) = (2/L)^{1/2},
// so the coefficient of mode 0 is mean(u) * |Omega|^{1/2}.
class SpectralCoeffs {
 public:
  SpectralCoeffs(Grid grid, std::vector<double> coeffs);
  static SpectralCoeffs zeros(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }
  std::span<const double> eigenvalues() const noexcept { return grid_.eigenvalues(); }
  std::size_t size() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

 private:
  Grid grid_;
  std::vector<double> coeffs_;
};

struct EigenPair {
  std::array<int, 2> index{0, 0};
  double value = 0.0;
};

// All modes with k_i < cutoff_i, sorted by eigenvalue (ties by index).
std::vector<EigenPair> neumann_eigenvalues(const Domain& domain, const std::vector<int>& cutoff);

SpectralCoeffs to_spectral(const Field& field);
Field from_spectral(const SpectralCoeffs& coeffs);

// Zero-pads or truncates coefficients onto another grid over the same domain.
SpectralCoeffs resample(const SpectralCoeffs& coeffs, const Grid& target);

double integrate(const Field& field);
double mean(const Field& field);
double inner_product(const Field& a, const Field& b);
double spectral_inner(const SpectralCoeffs& a, const SpectralCoeffs& b);

// sum_k lambda_k c_k^2 = int |grad u|^2 for band-limited u.
double grad_norm_sq(const SpectralCoeffs& coeffs);

double lp_norm(const Field& field, double p);
double linf_norm(const Field& field);
double min_value(const Field& field);
double max_value(const Field& field);

}  // namespace nlheat

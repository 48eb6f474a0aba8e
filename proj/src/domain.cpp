#include "nlheat/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dct.hpp"
#include "nlheat/error.hpp"

namespace nlheat {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonpositiveLength: return "NonpositiveLength";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFinite: return "NonFinite";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::ProjectionStall: return "ProjectionStall";
    case Errc::UnresolvedInterface: return "UnresolvedInterface";
    case Errc::SeedConstruction: return "SeedConstruction";
    case Errc::Parse: return "ParseError";
    case Errc::Validation: return "ValidationError";
    case Errc::Io: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- Domain

Domain::Domain(int dim, std::vector<double> lengths) : lengths_(std::move(lengths)) {
  if (dim != 1 && dim != 2) fail(Errc::InvalidArgument, "domain dimension must be 1 or 2");
  if (static_cast<int>(lengths_.size()) != dim)
    fail(Errc::InvalidArgument, "number of lengths must equal the dimension");
  for (double l : lengths_) {
    if (!(l > 0.0) || !std::isfinite(l)) fail(Errc::NonpositiveLength, "domain lengths must be positive");
  }
}

Domain make_domain(int dim, const std::vector<double>& lengths) { return Domain(dim, lengths); }

double Domain::volume() const noexcept {
  return std::accumulate(lengths_.begin(), lengths_.end(), 1.0, std::multiplies<>());
}

double Domain::max_length() const noexcept { return *std::max_element(lengths_.begin(), lengths_.end()); }
double Domain::min_length() const noexcept { return *std::min_element(lengths_.begin(), lengths_.end()); }

double Domain::lambda1() const noexcept {
  const double k = kPi / max_length();
  return k * k;
}

Domain Domain::dilated(double factor) const {
  if (!(factor > 0.0)) fail(Errc::InvalidArgument, "dilation factor must be positive");
  std::vector<double> l = lengths_;
  for (double& v : l) v *= factor;
  return Domain(dim(), std::move(l));
}

bool Domain::contains(std::span<const double> x, double slack) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const double tol = slack * lengths_[a];
    if (x[a] < -tol || x[a] > lengths_[a] + tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------- Grid

namespace {

std::shared_ptr<const std::vector<double>> build_eigenvalues(const Domain& d, const std::vector<int>& m) {
  auto ev = std::make_shared<std::vector<double>>();
  if (d.dim() == 1) {
    ev->resize(static_cast<std::size_t>(m[0]));
    const double w = kPi / d.length(0);
    for (int k = 0; k < m[0]; ++k) (*ev)[k] = (k * w) * (k * w);
  } else {
    ev->resize(static_cast<std::size_t>(m[0]) * m[1]);
    const double w0 = kPi / d.length(0), w1 = kPi / d.length(1);
    for (int i = 0; i < m[0]; ++i)
      for (int j = 0; j < m[1]; ++j)
        (*ev)[static_cast<std::size_t>(i) * m[1] + j] = (i * w0) * (i * w0) + (j * w1) * (j * w1);
  }
  return ev;
}

}  // namespace

Grid::Grid(Domain domain, std::vector<int> points_per_axis)
    : domain_(std::move(domain)), points_(std::move(points_per_axis)) {
  if (static_cast<int>(points_.size()) != domain_.dim())
    fail(Errc::ShapeMismatch, "grid needs one point count per axis");
  size_ = 1;
  for (int m : points_) {
    if (m < 4) fail(Errc::InvalidArgument, "grid needs at least 4 points per axis");
    size_ *= static_cast<std::size_t>(m);
  }
  eigenvalues_ = build_eigenvalues(domain_, points_);
}

double Grid::spacing(int axis) const { return domain_.length(axis) / points(axis); }

double Grid::node(int axis, int j) const { return (j + 0.5) * spacing(axis); }

double Grid::cell_volume() const noexcept {
  double w = 1.0;
  for (int a = 0; a < dim(); ++a) w *= domain_.length(a) / points_[a];
  return w;
}

double Grid::max_eigenvalue() const noexcept { return eigenvalues_->back(); }

std::array<int, 2> Grid::unflatten(std::size_t flat) const noexcept {
  if (dim() == 1) return {static_cast<int>(flat), 0};
  const auto m1 = static_cast<std::size_t>(points_[1]);
  return {static_cast<int>(flat / m1), static_cast<int>(flat % m1)};
}

std::size_t Grid::flatten(std::array<int, 2> index) const noexcept {
  if (dim() == 1) return static_cast<std::size_t>(index[0]);
  return static_cast<std::size_t>(index[0]) * points_[1] + index[1];
}

Grid Grid::scaled(double factor) const {
  std::vector<int> m = points_;
  for (int& v : m) v = static_cast<int>(std::ceil(factor * v - 1e-9));
  return Grid(domain_, std::move(m));
}

Grid Grid::with_domain(Domain domain) const { return Grid(std::move(domain), points_); }

// ---------------------------------------------------------------- Field

Field::Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) fail(Errc::ShapeMismatch, "field values do not match grid shape");
  check_finite();
}

Field Field::zeros(const Grid& grid) { return Field(grid, std::vector<double>(grid.size(), 0.0)); }

Field Field::constant(const Grid& grid, double value) {
  return Field(grid, std::vector<double>(grid.size(), value));
}

Field Field::from_function(const Grid& grid, const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> v(grid.size());
  std::array<double, 2> x{};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto idx = grid.unflatten(i);
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.node(a, idx[a]);
    v[i] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim())));
  }
  return Field(grid, std::move(v));
}

void Field::check_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) fail(Errc::NonFinite, "field contains a non-finite value");
}

Field& Field::operator+=(const Field& other) {
  if (!(other.grid_ == grid_)) fail(Errc::ShapeMismatch, "field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(other.grid_ == grid_)) fail(Errc::ShapeMismatch, "field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

// ---------------------------------------------------------------- SpectralCoeffs

SpectralCoeffs::SpectralCoeffs(Grid grid, std::vector<double> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) fail(Errc::ShapeMismatch, "coefficients do not match grid shape");
}

SpectralCoeffs SpectralCoeffs::zeros(const Grid& grid) {
  return SpectralCoeffs(grid, std::vector<double>(grid.size(), 0.0));
}

std::vector<EigenPair> neumann_eigenvalues(const Domain& domain, const std::vector<int>& cutoff) {
  if (static_cast<int>(cutoff.size()) != domain.dim())
    fail(Errc::ShapeMismatch, "one cutoff per axis is required");
  for (int c : cutoff)
    if (c < 2) fail(Errc::InvalidArgument, "eigenvalue cutoff must be at least 2");
  std::vector<EigenPair> out;
  const int m1 = domain.dim() == 2 ? cutoff[1] : 1;
  for (int i = 0; i < cutoff[0]; ++i) {
    for (int j = 0; j < m1; ++j) {
      const double a = i * kPi / domain.length(0);
      const double b = domain.dim() == 2 ? j * kPi / domain.length(1) : 0.0;
      out.push_back({{i, j}, a * a + b * b});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair& x, const EigenPair& y) { return x.value < y.value; });
  return out;
}

// ---------------------------------------------------------------- transforms

namespace {

// Per-axis factors converting unnormalized DCT-II output into orthonormal coefficients.
std::vector<double> forward_scale(const Grid& g, int axis) {
  const int m = g.points(axis);
  const double l = g.domain().length(axis);
  std::vector<double> s(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double norm = k == 0 ? 1.0 / std::sqrt(l) : std::sqrt(2.0 / l);
    s[k] = 0.5 * (l / m) * norm;
  }
  return s;
}

std::vector<double> inverse_scale(const Grid& g, int axis) {
  const int m = g.points(axis);
  const double l = g.domain().length(axis);
  std::vector<double> s(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) s[k] = k == 0 ? 1.0 / std::sqrt(l) : 0.5 * std::sqrt(2.0 / l);
  return s;
}

void apply_axis_scales(const Grid& g, std::span<double> data, const std::vector<double>& s0,
                       const std::vector<double>& s1) {
  if (g.dim() == 1) {
    for (std::size_t k = 0; k < data.size(); ++k) data[k] *= s0[k];
    return;
  }
  const auto m0 = static_cast<std::size_t>(g.points(0)), m1 = static_cast<std::size_t>(g.points(1));
  for (std::size_t i = 0; i < m0; ++i)
    for (std::size_t j = 0; j < m1; ++j) data[i * m1 + j] *= s0[i] * s1[j];
}

}  // namespace

SpectralCoeffs to_spectral(const Field& field) {
  const Grid& g = field.grid();
  std::vector<double> data(field.values().begin(), field.values().end());
  detail::dct2_inplace(data, g.shape());
  apply_axis_scales(g, data, forward_scale(g, 0), g.dim() == 2 ? forward_scale(g, 1) : std::vector<double>{});
  return SpectralCoeffs(g, std::move(data));
}

Field from_spectral(const SpectralCoeffs& coeffs) {
  const Grid& g = coeffs.grid();
  std::vector<double> data(coeffs.coeffs().begin(), coeffs.coeffs().end());
  apply_axis_scales(g, data, inverse_scale(g, 0), g.dim() == 2 ? inverse_scale(g, 1) : std::vector<double>{});
  detail::dct3_inplace(data, g.shape());
  return Field(g, std::move(data));
}

SpectralCoeffs resample(const SpectralCoeffs& coeffs, const Grid& target) {
  const Grid& src = coeffs.grid();
  if (!(src.domain() == target.domain())) fail(Errc::ShapeMismatch, "resample requires the same domain");
  SpectralCoeffs out = SpectralCoeffs::zeros(target);
  if (src.dim() == 1) {
    const int n = std::min(src.points(0), target.points(0));
    for (int k = 0; k < n; ++k) out[k] = coeffs[k];
    return out;
  }
  const int n0 = std::min(src.points(0), target.points(0));
  const int n1 = std::min(src.points(1), target.points(1));
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) out[target.flatten({i, j})] = coeffs[src.flatten({i, j})];
  return out;
}

// ---------------------------------------------------------------- quadrature & norms

double integrate(const Field& field) {
  double s = 0.0;
  for (double v : field.values()) s += v;
  return s * field.grid().cell_volume();
}

double mean(const Field& field) { return integrate(field) / field.grid().domain().volume(); }

double inner_product(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) fail(Errc::ShapeMismatch, "field grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().cell_volume();
}

double spectral_inner(const SpectralCoeffs& a, const SpectralCoeffs& b) {
  if (!(a.grid() == b.grid())) fail(Errc::ShapeMismatch, "coefficient grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double grad_norm_sq(const SpectralCoeffs& coeffs) {
  const auto ev = coeffs.eigenvalues();
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += ev[i] * coeffs[i] * coeffs[i];
  return s;
}

double lp_norm(const Field& field, double p) {
  if (!(p >= 1.0)) fail(Errc::InvalidArgument, "lp_norm requires p >= 1");
  if (std::isinf(p)) return linf_norm(field);
  double s = 0.0;
  for (double v : field.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * field.grid().cell_volume(), 1.0 / p);
}

double linf_norm(const Field& field) {
  double m = 0.0;
  for (double v : field.values()) m = std::max(m, std::abs(v));
  return m;
}

double min_value(const Field& field) {
  return *std::min_element(field.values().begin(), field.values().end());
}

double max_value(const Field& field) {
  return *std::max_element(field.values().begin(), field.values().end());
}

}  // namespace nlheat

#include "nlheat/random_field.hpp"

#include <algorithm>
#include <cmath>

#include "nlheat/error.hpp"

namespace nlheat {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

SpectralCoeffs random_mean_zero_coeffs(const Grid& grid, std::uint64_t seed, int max_mode) {
  if (max_mode < 2) fail(Errc::InvalidArgument, "random field needs max_mode >= 2");
  Rng rng(seed);
  SpectralCoeffs c = SpectralCoeffs::zeros(grid);
  const int n0 = std::min(max_mode, grid.points(0));
  const int n1 = grid.dim() == 2 ? std::min(max_mode, grid.points(1)) : 1;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const double g = rng.normal();
      if (i == 0 && j == 0) continue;
      const double k2 = static_cast<double>(i) * i + static_cast<double>(j) * j;
      c[grid.flatten({i, j})] = g / k2;
    }
  }
  return c;
}

Field random_mean_zero_field(const Grid& grid, std::uint64_t seed, int max_mode) {
  return from_spectral(random_mean_zero_coeffs(grid, seed, max_mode));
}

Field random_field_with_linf(const Grid& grid, std::uint64_t seed, double linf, int max_mode) {
  Field f = random_mean_zero_field(grid, seed, max_mode);
  const double m = linf_norm(f);
  if (m == 0.0) return f;
  f *= linf / m;
  return f;
}

}  // namespace nlheat

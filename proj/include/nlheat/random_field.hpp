#pragma once

#include <cstdint>
#include <random>

#include "nlheat/domain.hpp"

namespace nlheat {

// Portable draws on top of mt19937_64 (whose output sequence is fixed by the
// standard, unlike the std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Truncated random cosine series with Gaussian amplitudes decaying like |k|^-2,
// mode 0 removed. Modes with k_i >= max_mode on any axis are zero.
SpectralCoeffs random_mean_zero_coeffs(const Grid& grid, std::uint64_t seed, int max_mode = 16);
Field random_mean_zero_field(const Grid& grid, std::uint64_t seed, int max_mode = 16);

// Same field rescaled so that its grid maximum of |u| equals `linf`.
Field random_field_with_linf(const Grid& grid, std::uint64_t seed, double linf, int max_mode = 16);

}  // namespace nlheat

#pragma once

#include <span>

namespace nlheat::detail {

// Unnormalized FFTW transforms applied in place over a row-major tensor.
// forward = REDFT10 (DCT-II) on every axis, inverse = REDFT01 (DCT-III).
void dct2_inplace(std::span<double> data, std::span<const int> shape);
void dct3_inplace(std::span<double> data, std::span<const int> shape);

}  // namespace nlheat::detail

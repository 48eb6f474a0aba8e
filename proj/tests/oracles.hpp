#pragma once

// Test-only reference computations. None of these touch the library's
// transform or solver paths.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Composite 5-point Gauss-Legendre rule on [a, b] with n panels.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                              0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = a + (i + 0.5) * h;
    for (int q = 0; q < 5; ++q) s += w[q] * f(c + 0.5 * h * x[q]);
  }
  return 0.5 * h * s;
}

// Method-of-images Neumann heat kernel on [0, L]:
//   K = sum_n G(x - y + 2nL) + G(x + y + 2nL),  G(z) = (4 pi t)^{-1/2} exp(-z^2 / 4t).
inline double images_kernel_1d(double L, double t, double x, double y, int images = 50) {
  auto g = [t](double z) { return std::exp(-z * z / (4.0 * t)) / std::sqrt(4.0 * pi * t); };
  double s = 0.0;
  for (int n = -images; n <= images; ++n) s += g(x - y + 2.0 * n * L) + g(x + y + 2.0 * n * L);
  return s;
}

// Nodal values of f on the midpoint grid of [0, L] with M points.
inline std::vector<double> sample_1d(const std::function<double(double)>& f, double L, int M) {
  std::vector<double> v(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) v[j] = f((j + 0.5) * L / M);
  return v;
}

}  // namespace oracle

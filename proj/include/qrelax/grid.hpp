#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "errors.hpp"

namespace qrelax {

// Uniform periodic grid on [0, L)^dim with n points per axis.
//
// Point layout is flat row-major with axis 0 fastest:
//   dim 1: idx = x
//   dim 2: idx = x + n*y
//   dim 3: idx = x + n*(y + n*z)
// Fourier modes use signed integer frequencies j in {-n/2+1, ..., n/2}
// (the Nyquist index n/2 carries the positive sign; its sign never matters
// because odd-order derivatives zero it and dealiasing removes it anyway).
struct Grid {
  int dim = 1;
  int n = 0;
  double length = 1.0;
  double dx = 0.0;
  std::size_t npts = 0;

  // Signed integer frequency of axis index j.
  int freq(int j) const { return j <= n / 2 ? j : j - n; }

  // Scaled wavenumber 2*pi*freq/L of axis index j.
  double k(int j) const { return 2.0 * M_PI * freq(j) / length; }

  // Largest retained integer frequency under the 2/3 rule.
  int jcut() const { return n / 3; }

  // Largest retained scaled wavenumber.
  double kcut() const { return 2.0 * M_PI * jcut() / length; }

  double measure() const {
    double m = 1.0;
    for (int a = 0; a < dim; ++a) m *= length;
    return m;
  }

  // Coordinate of axis index j.
  double x(int j) const { return j * dx; }

  // Decompose a flat index into per-axis indices (unused axes get 0).
  std::array<int, 3> unravel(std::size_t idx) const {
    std::array<int, 3> out{0, 0, 0};
    out[0] = static_cast<int>(idx % n);
    if (dim > 1) out[1] = static_cast<int>((idx / n) % n);
    if (dim > 2) out[2] = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
    return out;
  }

  bool operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && length == o.length;
  }
};

inline Grid make_grid(int dim, int n, double length = 1.0) {
  if (dim < 1 || dim > 3)
    throw ConfigError("grid.dim: must be 1, 2, or 3, got " + std::to_string(dim));
  if (n < 8) throw ConfigError("grid.n: must be >= 8, got " + std::to_string(n));
  if (n % 2 != 0) throw ConfigError("grid.n: must be even, got " + std::to_string(n));
  if (!(length > 0.0))
    throw ConfigError("grid.length: must be positive, got " + std::to_string(length));
  Grid g;
  g.dim = dim;
  g.n = n;
  g.length = length;
  g.dx = length / n;
  g.npts = 1;
  for (int a = 0; a < dim; ++a) g.npts *= static_cast<std::size_t>(n);
  return g;
}

}  // namespace qrelax

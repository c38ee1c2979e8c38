#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"

namespace qrelax {

// Analytic initial-condition families. Checkpoint loading is listed here so
// a config can name it, but the field itself comes from the checkpoint
// reader; make_density rejects it.
enum class IcFamily { Constant, CosinePerturbation, GaussianBump, CheckpointLoad };

struct InitialSpec {
  IcFamily family = IcFamily::Constant;
  double base = 1.0;                    // constant value / background level
  double amplitude = 0.0;               // perturbation strength
  std::array<int, 3> wavenumber{1, 0, 0};  // cosine: integer mode per axis
  double width = 0.1;                   // gaussian: standard deviation
  std::array<double, 3> center{0.5, 0.5, 0.5};  // gaussian: bump center
  std::string path;                     // checkpoint: file to load
};

inline const char* to_string(IcFamily f) {
  switch (f) {
    case IcFamily::Constant: return "constant";
    case IcFamily::CosinePerturbation: return "cosine-perturbation";
    case IcFamily::GaussianBump: return "gaussian-bump-periodicized";
    case IcFamily::CheckpointLoad: return "checkpoint-load";
  }
  return "?";
}

namespace detail {

// One-dimensional Gaussian wrapped onto the circle of circumference L by
// summing over periodic images; four images each side is exact to double
// precision for widths up to about L/5.
inline double wrapped_gaussian(double x, double c, double w, double L) {
  double v = 0.0;
  for (int j = -4; j <= 4; ++j) {
    const double r = x - c + j * L;
    v += std::exp(-r * r / (2.0 * w * w));
  }
  return v;
}

}  // namespace detail

inline Field make_density(const Grid& grid, const InitialSpec& ic) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Field rho(grid.npts);
  switch (ic.family) {
    case IcFamily::Constant: {
      for (double& v : rho) v = ic.base;
      break;
    }
    case IcFamily::CosinePerturbation: {
      for (std::size_t idx = 0; idx < grid.npts; ++idx) {
        auto c = grid.unravel(idx);
        double phase = 0.0;
        for (int a = 0; a < grid.dim; ++a)
          phase += ic.wavenumber[a] * grid.x(c[a]);
        rho[idx] = ic.base +
                   ic.amplitude * std::cos(two_pi * phase / grid.length);
      }
      break;
    }
    case IcFamily::GaussianBump: {
      if (!(ic.width > 0.0))
        throw ConfigError("make_density: gaussian width must be positive");
      for (std::size_t idx = 0; idx < grid.npts; ++idx) {
        auto c = grid.unravel(idx);
        double bump = 1.0;
        for (int a = 0; a < grid.dim; ++a)
          bump *= detail::wrapped_gaussian(grid.x(c[a]), ic.center[a],
                                           ic.width, grid.length);
        rho[idx] = ic.base + ic.amplitude * bump;
      }
      break;
    }
    case IcFamily::CheckpointLoad:
      throw ConfigError(
          "make_density: checkpoint-load is resolved by the checkpoint "
          "reader, not the analytic families");
  }
  if (min_value(rho) <= 0.0)
    throw ConfigError("make_density: initial density must be positive "
                      "everywhere (min = " + std::to_string(min_value(rho)) +
                      ")");
  return rho;
}

// Uniform double in [0, 1) built directly from the top 53 bits of the
// generator output, so streams are identical across platforms and standard
// libraries for a given seed.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * uniform01(rng);
}

// Band-limited positive density on [0,1): a few low cosine modes with
// 1/j^2-weighted random amplitudes and random phases, normalized to unit
// sup and scaled by a random amplitude below smax < 1, so min(rho) stays
// well above zero by construction.
inline Field density_1d(std::uint64_t seed, int n, int jmax = 4,
                        double smin = 0.1, double smax = 0.45) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::mt19937_64 rng(seed);
  Field phi(n, 0.0);
  for (int j = 1; j <= jmax; ++j) {
    const double a = uniform(rng, 0.5, 1.0) / (j * j);
    const double ph = uniform(rng, 0.0, two_pi);
    for (int i = 0; i < n; ++i)
      phi[i] += a * std::cos(two_pi * j * (static_cast<double>(i) / n) + ph);
  }
  double mx = 0.0;
  for (double v : phi) mx = std::max(mx, std::abs(v));
  const double s = uniform(rng, smin, smax);
  Field rho(n);
  for (int i = 0; i < n; ++i) rho[i] = 1.0 + s * phi[i] / mx;
  return rho;
}

// Two-dimensional analogue; one representative mode per conjugate pair
// (j2 > 0, or j2 = 0 with j1 > 0) keeps the field real without double
// counting.
inline Field density_2d(std::uint64_t seed, int n, int jmax = 2,
                        double smin = 0.05, double smax = 0.12) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::mt19937_64 rng(seed);
  Field phi(static_cast<std::size_t>(n) * n, 0.0);
  for (int j1 = -jmax; j1 <= jmax; ++j1)
    for (int j2 = 0; j2 <= jmax; ++j2) {
      if (j2 == 0 && j1 <= 0) continue;
      const double a = uniform(rng, 0.5, 1.0) / (j1 * j1 + j2 * j2);
      const double ph = uniform(rng, 0.0, two_pi);
      for (int ix = 0; ix < n; ++ix) {
        const double x = static_cast<double>(ix) / n;
        for (int iy = 0; iy < n; ++iy) {
          const double y = static_cast<double>(iy) / n;
          phi[ix + static_cast<std::size_t>(n) * iy] +=
              a * std::cos(two_pi * (j1 * x + j2 * y) + ph);
        }
      }
    }
  double mx = 0.0;
  for (double v : phi) mx = std::max(mx, std::abs(v));
  const double s = uniform(rng, smin, smax);
  Field rho(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) rho[i] = 1.0 + s * phi[i] / mx;
  return rho;
}

// Generic smooth field (any sign) for operator identities: random constant
// plus a moderately wide band of random modes.
inline Field field_nd(std::uint64_t seed, int dim, int n, int jmax = 8) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::mt19937_64 rng(seed);
  if (dim == 1) {
    Field f(n, uniform(rng, 0.5, 2.0));
    for (int j = 1; j <= jmax; ++j) {
      const double a = uniform(rng, 0.2, 1.0) / j;
      const double ph = uniform(rng, 0.0, two_pi);
      for (int i = 0; i < n; ++i)
        f[i] += a * std::cos(two_pi * j * (static_cast<double>(i) / n) + ph);
    }
    return f;
  }
  if (dim != 2)
    throw ConfigError("field_nd: only dim 1 and 2 ensembles are defined");
  Field f(static_cast<std::size_t>(n) * n, uniform(rng, 0.5, 2.0));
  for (int j1 = -jmax; j1 <= jmax; ++j1)
    for (int j2 = 0; j2 <= jmax; ++j2) {
      if (j2 == 0 && j1 <= 0) continue;
      const double a = uniform(rng, 0.2, 1.0) / (j1 * j1 + j2 * j2);
      const double ph = uniform(rng, 0.0, two_pi);
      for (int ix = 0; ix < n; ++ix) {
        const double x = static_cast<double>(ix) / n;
        for (int iy = 0; iy < n; ++iy) {
          const double y = static_cast<double>(iy) / n;
          f[ix + static_cast<std::size_t>(n) * iy] +=
              a * std::cos(two_pi * (j1 * x + j2 * y) + ph);
        }
      }
    }
  return f;
}

}  // namespace qrelax

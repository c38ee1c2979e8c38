#pragma once

#include <cmath>
#include <utility>

#include "field.hpp"
#include "grid.hpp"
#include "spectral.hpp"

namespace qrelax {

// Evolved state shared by both systems.
//
// The fluid system evolves (rho, m) with m = rho*u; the drift-diffusion
// system evolves rho alone and keeps m allocated but zero (and eps = 0),
// so checkpoints and diagnostics have one shape. V is kept consistent with
// rho through the zero-mean Poisson solve. delta is the vacuum floor,
// applied only inside log(rho), 1/sqrt(rho), and m/rho.
struct State {
  Grid grid;
  double t = 0.0;
  double eps = 0.0;
  double gamma = 2.0;
  double delta = 1e-8;
  Field rho;
  VecField m;
  Field V;
  Field g;
};

// Default vacuum floor: a fixed small fraction of the initial density peak.
inline double default_delta(const Field& rho0, double relative_floor = 1e-8) {
  return relative_floor * max_value(rho0);
}

inline Field enforce_floor(const Field& rho, double delta) {
  return floored(rho, delta);
}

// u = m / max(rho, delta), pointwise; the floor fixes u = 0 on vacuum
// where m vanishes too.
inline VecField velocity_from_momentum(const VecField& m, const Field& rho,
                                       double delta) {
  VecField u(m.size(), Field(rho.size()));
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t i = 0; i < rho.size(); ++i)
      u[a][i] = m[a][i] / std::max(rho[i], delta);
  return u;
}

// Shift the doping profile so mean(g) = mean(rho0); idempotent.
inline Field project_doping(const Spectral& sp, const Field& g_raw,
                            const Field& rho0) {
  const double meas = sp.grid().measure();
  const double shift =
      (sp.integrate(rho0) - sp.integrate(g_raw)) / meas;
  Field g(g_raw);
  for (double& v : g) v += shift;
  return g;
}

inline double mass(const Spectral& sp, const Field& rho) {
  return sp.integrate(rho);
}

}  // namespace qrelax

#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include "errors.hpp"
#include "field.hpp"
#include "spectral.hpp"

namespace qrelax {

// Solve -Lap V = rho - g on the torus with mean(V) = 0, exactly in Fourier
// space: V_hat(k) = (rho_hat - g_hat)(k)/|k|^2 for k != 0, V_hat(0) = 0.
// The source must have zero mean or no periodic solution exists.
inline Field solve_poisson(const Spectral& sp, const Field& rho, const Field& g,
                           double compat_tol = 1e-10) {
  const Grid& gr = sp.grid();
  const double mean_src =
      (sp.integrate(rho) - sp.integrate(g)) / gr.measure();
  if (std::abs(mean_src) > compat_tol)
    throw CompatibilityError(
        "solve_poisson: |mean(rho - g)| = " + std::to_string(std::abs(mean_src)) +
        " exceeds " + std::to_string(compat_tol) +
        "; state corrupted or doping profile incompatible");
  Field src(rho);
  for (std::size_t i = 0; i < src.size(); ++i) src[i] -= g[i];
  Spectral::Hat h = sp.to_hat(src);
  std::size_t idx = 0;
  const int n = gr.n;
  const int loops_y = gr.dim > 1 ? n : 1;
  const int loops_z = gr.dim > 2 ? n : 1;
  for (int z = 0; z < loops_z; ++z) {
    for (int y = 0; y < loops_y; ++y) {
      for (int x = 0; x < n; ++x, ++idx) {
        double k2 = gr.k(x) * gr.k(x);
        if (gr.dim > 1) k2 += gr.k(y) * gr.k(y);
        if (gr.dim > 2) k2 += gr.k(z) * gr.k(z);
        if (k2 > 0.0)
          h[idx] /= k2;
        else
          h[idx] = 0.0;
      }
    }
  }
  return sp.from_hat(std::move(h));
}

// ||-Lap V - (rho - g)||_{L2}, the strong-form residual of the solve.
inline double poisson_residual(const Spectral& sp, const Field& V,
                               const Field& rho, const Field& g) {
  Field r = sp.lap(V);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -r[i] - (rho[i] - g[i]);
  return sp.l2(r);
}

}  // namespace qrelax

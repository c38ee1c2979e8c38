#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "initial.hpp"
#include "poisson.hpp"
#include "quantum.hpp"
#include "spectral.hpp"

namespace qrelax {

struct PropertyResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // observed worst value of the checked quantity
  double limit = 0.0;  // the bound it must not exceed
  std::string detail;
};

namespace detail {

inline double rel_l2_vec(const Spectral& sp, const VecField& A,
                         const VecField& B) {
  double num = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t a = 0; a < A.size(); ++a) {
    Field d(A[a].size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = A[a][i] - B[a][i];
    const double dn = sp.l2(d), an = sp.l2(A[a]), bn = sp.l2(B[a]);
    num += dn * dn;
    na += an * an;
    nb += bn * bn;
  }
  const double den = std::sqrt(std::max(na, nb));
  return den > 0.0 ? std::sqrt(num) / den : 0.0;
}

inline PropertyResult make_result(const std::string& name, double worst,
                                  double limit, const std::string& detail) {
  PropertyResult r;
  r.name = name;
  r.worst = worst;
  r.limit = limit;
  r.pass = worst <= limit;
  r.detail = detail;
  return r;
}

}  // namespace detail

// Pairwise agreement of the three analytically equivalent assemblies of the
// quantum force over a seeded band-limited ensemble.
inline PropertyResult verify_bohm_forms(std::uint64_t seed, int dim, int n,
                                        int count) {
  Grid grid = make_grid(dim, n, 1.0);
  Spectral sp(grid);
  const double delta = 1e-8;
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Field rho = dim == 1 ? density_1d(seed + i, n) : density_2d(seed + i, n);
    VecField bv = bohm_force(sp, rho, BohmForm::Variational, delta);
    VecField bl = bohm_force(sp, rho, BohmForm::LogHessianDiv, delta);
    VecField bs = bohm_force(sp, rho, BohmForm::SqrtTensorDiv, delta);
    worst = std::max({worst, detail::rel_l2_vec(sp, bv, bl),
                      detail::rel_l2_vec(sp, bv, bs),
                      detail::rel_l2_vec(sp, bl, bs)});
  }
  return detail::make_result(
      dim == 1 ? "bohm-three-form-1d" : "bohm-three-form-2d", worst, 1e-7,
      std::to_string(count) + " densities, dim " + std::to_string(dim) +
          ", n " + std::to_string(n));
}

// Sharp form of the dimension-independent inequality between the quartic
// gradient term, the Hessian of sqrt(rho), and the log-Hessian dissipation.
inline PropertyResult verify_fourth_order_inequality(std::uint64_t seed, int dim,
                                                 int n, int count) {
  Grid grid = make_grid(dim, n, 1.0);
  Spectral sp(grid);
  const double delta = 1e-8;
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Field rho = dim == 1 ? density_1d(seed + i, n) : density_2d(seed + i, n);
    FourthOrderReport rep = fourth_order_check(sp, rho, delta);
    worst = std::max(worst, rep.chain_ratio);
  }
  return detail::make_result(
      dim == 1 ? "fourth-order-inequality-1d" : "fourth-order-inequality-2d", worst,
      1.0 + 1e-6,
      "sharp-ratio sup over " + std::to_string(count) + " densities");
}

// Calibration constant of the same inequality in its conservative reading;
// the acceptance bound is C <= 3.
inline PropertyResult verify_fourth_order_calibration(std::uint64_t seed, int dim,
                                                  int n, int count) {
  Grid grid = make_grid(dim, n, 1.0);
  Spectral sp(grid);
  const double delta = 1e-8;
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Field rho = dim == 1 ? density_1d(seed + i, n) : density_2d(seed + i, n);
    FourthOrderReport rep = fourth_order_check(sp, rho, delta);
    worst = std::max(worst, rep.ratio);
  }
  return detail::make_result(
      dim == 1 ? "fourth-order-calibration-1d" : "fourth-order-calibration-2d", worst,
      3.0, "report-ratio sup over " + std::to_string(count) + " densities");
}

// Exact identity between int rho |grad(grad sqrt rho / sqrt rho)|^2 and a
// quarter of the log-Hessian dissipation.
inline PropertyResult verify_curvature_identity(std::uint64_t seed, int dim,
                                               int n, int count) {
  Grid grid = make_grid(dim, n, 1.0);
  Spectral sp(grid);
  const double delta = 1e-8;
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Field rho = dim == 1 ? density_1d(seed + i, n) : density_2d(seed + i, n);
    FourthOrderReport rep = fourth_order_check(sp, rho, delta);
    worst = std::max(worst, std::abs(rep.identity_lhs - rep.identity_rhs) /
                                rep.identity_rhs);
  }
  return detail::make_result(
      dim == 1 ? "curvature-identity-1d" : "curvature-identity-2d", worst, 1e-8,
      "relative identity error over " + std::to_string(count) + " densities");
}

// ||f||_H1 <= sqrt(||f||_L2 ||f||_H2) on generic multi-shell fields. The
// additive norms make this fail for single-shell spectra (the constant-1
// claim needs spectral variance at least the spectral mean), so the
// ensemble deliberately carries a nonzero mean and eight shells.
inline PropertyResult verify_interpolation(std::uint64_t seed, int n,
                                           int count) {
  Grid grid = make_grid(1, n, 1.0);
  Spectral sp(grid);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Field f = field_nd(seed + i, 1, n);
    const double h1 = sp.h1(f);
    const double bound = std::sqrt(sp.l2(f) * sp.h2(f));
    worst = std::max(worst, (h1 - bound) / h1);
  }
  return detail::make_result(
      "interpolation-inequality", worst, 1e-12,
      "relative violation over " + std::to_string(count) + " fields");
}

// Poisson solve contract: residual, zero mean, the quadratic-form identity
// int |grad V|^2 = int V (rho - g), and rejection of incompatible sources.
inline PropertyResult verify_poisson(std::uint64_t seed, int n, int count) {
  Grid grid = make_grid(1, n, 1.0);
  Spectral sp(grid);
  double worst = 0.0;
  std::string fail;
  for (int i = 0; i < count; ++i) {
    Field rho = density_1d(seed + i, n);
    Field g(rho.size(), sp.integrate(rho) / grid.measure());
    Field V = solve_poisson(sp, rho, g);
    worst = std::max(worst, poisson_residual(sp, V, rho, g));
    worst = std::max(worst,
                     std::abs(sp.integrate(V)) / grid.measure() / 1e-3);
    // scale mean(V) by 1e3 so the shared limit 1e-10 enforces 1e-13 on it
    VecField gV = sp.grad(V);
    double quad = 0.0;
    for (const Field& c : gV) {
      Field q(c.size());
      for (std::size_t j = 0; j < q.size(); ++j) q[j] = c[j] * c[j];
      quad += sp.integrate(q);
    }
    Field src(rho);
    for (std::size_t j = 0; j < src.size(); ++j)
      src[j] = V[j] * (rho[j] - g[j]);
    const double rhsq = sp.integrate(src);
    worst = std::max(worst, std::abs(quad - rhsq) / std::max(quad, 1e-30));
  }
  bool rejected = false;
  try {
    Field rho(grid.npts, 1.0);
    Field g(grid.npts, 1.1);
    solve_poisson(sp, rho, g);
  } catch (const CompatibilityError&) {
    rejected = true;
  }
  if (!rejected) {
    PropertyResult r = detail::make_result("poisson-identities", 1.0, 1e-10,
                                           "incompatible source not rejected");
    r.pass = false;
    return r;
  }
  return detail::make_result("poisson-identities", worst, 1e-10,
                             "residual, mean, quadratic identity, "
                             "compatibility rejection");
}

// Discrete integration by parts: int f dg/dx_a + int df/dx_a g = 0 for
// dealiased products, int div(v) = 0, and idempotence of the dealias
// projector. The fault parameter feeds the derivative corruption hook; any
// nonzero value must make this property fail.
inline PropertyResult verify_ibp(std::uint64_t seed, int n, int count,
                                 double fault = 0.0) {
  Grid grid = make_grid(1, n, 1.0);
  Spectral sp(grid, fault);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Field f = sp.dealias(field_nd(seed + 2 * i, 1, n));
    Field h = sp.dealias(field_nd(seed + 2 * i + 1, 1, n));
    std::array<int, 3> od{1, 0, 0};
    Field df = sp.deriv(f, od);
    Field dh = sp.deriv(h, od);
    Field prod(f.size());
    for (std::size_t j = 0; j < prod.size(); ++j)
      prod[j] = f[j] * dh[j] + df[j] * h[j];
    double scale = sp.l2(f) * sp.l2(h);
    worst = std::max(worst, std::abs(sp.integrate(prod)) / std::max(scale, 1e-30));
    VecField v(1, df);
    worst = std::max(worst,
                     std::abs(sp.integrate(sp.div(v))) / std::max(scale, 1e-30));
    Field d1 = sp.dealias(f);
    Field d2 = sp.dealias(d1);
    for (std::size_t j = 0; j < d1.size(); ++j)
      worst = std::max(worst, std::abs(d1[j] - d2[j]));
  }
  return detail::make_result("integration-by-parts", worst, 1e-10,
                             "pairing, divergence integral, dealias "
                             "idempotence");
}

// Full default property suite. The seed offsets keep the sub-ensembles
// disjoint but reproducible from the single base seed.
inline std::vector<PropertyResult> verify_all(std::uint64_t seed,
                                              double fault = 0.0) {
  std::vector<PropertyResult> out;
  out.push_back(verify_bohm_forms(seed, 1, 128, 100));
  out.push_back(verify_bohm_forms(seed + 1000, 2, 32, 25));
  out.push_back(verify_fourth_order_inequality(seed, 1, 128, 100));
  out.push_back(verify_fourth_order_inequality(seed + 1000, 2, 32, 25));
  out.push_back(verify_fourth_order_calibration(seed, 1, 128, 100));
  out.push_back(verify_fourth_order_calibration(seed + 1000, 2, 32, 25));
  out.push_back(verify_curvature_identity(seed, 1, 128, 100));
  out.push_back(verify_curvature_identity(seed + 1000, 2, 32, 25));
  out.push_back(verify_interpolation(seed + 2000, 128, 200));
  out.push_back(verify_poisson(seed + 3000, 128, 20));
  out.push_back(verify_ibp(seed + 4000, 128, 50, fault));
  return out;
}

}  // namespace qrelax

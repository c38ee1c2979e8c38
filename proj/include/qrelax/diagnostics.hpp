#pragma once

#include <cmath>

#include "field.hpp"
#include "poisson.hpp"
#include "quantum.hpp"
#include "spectral.hpp"
#include "state.hpp"

namespace qrelax {

// One row of the monitored functionals, recorded along every run.
//
// Instantaneous integrals:
//   mass             int rho
//   energy           fluid runs: int( rho|u|^2/2 + rho^g/(g-1)
//                                     + 2|grad sqrt rho|^2 + |grad V|^2/2 )
//                    drift-diffusion runs: int( 2|grad sqrt rho|^2
//                                     + rho^g/(g-1) + |grad V|^2/2 )
//   aug_entropy       fluid runs: eps*( int rho|w|^2/2 + pressure + 2*fisher
//                                     + potential ) + free_energy,
//                    w = u + grad log rho; drift-diffusion runs: free_energy
//   fisher           int |grad sqrt rho|^2
//   pressure_energy  int rho^gamma/(gamma-1)
//   potential_energy int |grad V|^2/2
//   kinetic          int rho|u|^2/2
//   free_energy      int (rho(log rho - 1) + 1)
// Dissipation rates (time integrands of the balance laws):
//   diss_visc        int rho|Du|^2, Du the symmetric velocity gradient
//   diss_rot         int rho|Au|^2, Au the antisymmetric part
//   diss_damp        int rho|u|^2
//   diss_log         int rho|Hess log rho|^2
//   diss_pressure    int |grad rho^(gamma/2)|^2
//   diss_charge      int rho(rho - g), the only sign-indefinite rate
//   qdd_diss         int rho|2 grad(Lap sqrt rho / sqrt rho)
//                            - gamma rho^(gamma-2) grad rho - grad V|^2
// fourth_order_lhs/rhs  the fourth-root inequality sides
//                    (1/16)int |grad sqrt rho|^4/rho + int |Hess sqrt rho|^2
//                    and int rho|Hess log rho|^2
// cum_*              running trapezoid integrals of the matching rates,
//                    accumulated once per internal step so balance defects
//                    do not depend on the record cadence.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double aug_entropy = 0.0;
  double fisher = 0.0;
  double pressure_energy = 0.0;
  double potential_energy = 0.0;
  double kinetic = 0.0;
  double free_energy = 0.0;
  double diss_visc = 0.0;
  double diss_rot = 0.0;
  double diss_damp = 0.0;
  double diss_log = 0.0;
  double diss_pressure = 0.0;
  double diss_charge = 0.0;
  double qdd_diss = 0.0;
  double fourth_order_lhs = 0.0;
  double fourth_order_rhs = 0.0;
  double cum_diss_visc = 0.0;
  double cum_diss_rot = 0.0;
  double cum_diss_damp = 0.0;
  double cum_diss_log = 0.0;
  double cum_diss_pressure = 0.0;
  double cum_diss_charge = 0.0;
  double cum_qdd_diss = 0.0;

  bool finite() const {
    const double* p = &t;
    for (int i = 0; i < 25; ++i)
      if (!std::isfinite(p[i])) return false;
    return true;
  }
};

namespace detail {

inline double integral_of_square(const Spectral& sp, const Field& f) {
  double n = sp.l2(f);
  return n * n;
}

// Shared instantaneous functionals of (rho, V): everything except the
// velocity-dependent entries and the quantum dissipation.
inline void fill_common(const Spectral& sp, const Field& rho, const Field& V,
                        const Field& g, double gamma, double delta,
                        DiagnosticsRecord& r) {
  const int d = sp.grid().dim;
  Field rf = floored(rho, delta);
  Field s = sqrt_dealiased(sp, rho);
  VecField gs = sp.grad(s);
  VecField gV = sp.grad(V);

  r.mass = sp.integrate(rho);
  r.fisher = 0.0;
  for (const Field& c : gs) r.fisher += integral_of_square(sp, c);
  {
    Field q(rf);
    for (double& v : q) v = std::pow(v, gamma);
    r.pressure_energy = sp.integrate(q) / (gamma - 1.0);
  }
  r.potential_energy = 0.0;
  for (const Field& c : gV) r.potential_energy += integral_of_square(sp, c);
  r.potential_energy *= 0.5;
  {
    Field q(rf);
    for (double& v : q) v = v * (std::log(v) - 1.0) + 1.0;
    r.free_energy = sp.integrate(q);
  }

  Field ell(rf);
  for (double& v : ell) v = std::log(v);
  ell = sp.dealias(ell);
  TensorField Hl = sp.hess(ell);
  r.diss_log = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Field q(rho.size());
      const Field& H = Hl[a * d + b];
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = rho[i] * H[i] * H[i];
      r.diss_log += sp.integrate(q);
    }
  {
    Field pg(rf);
    for (double& v : pg) v = std::pow(v, gamma / 2.0);
    pg = sp.dealias(pg);
    r.diss_pressure = 0.0;
    for (const Field& c : sp.grad(pg)) r.diss_pressure += integral_of_square(sp, c);
  }
  {
    Field q(rho.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = rho[i] * (rho[i] - g[i]);
    r.diss_charge = sp.integrate(q);
  }

  // fourth-root inequality sides on the current density
  {
    Field gs2(rho.size(), 0.0);
    for (int a = 0; a < d; ++a)
      for (std::size_t i = 0; i < gs2.size(); ++i)
        gs2[i] += gs[a][i] * gs[a][i];
    Field q(rho.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = gs2[i] * gs2[i] / rf[i];
    double quartic_scaled = sp.integrate(q) / 16.0;
    double hess_sq = 0.0;
    TensorField Hs = sp.hess(s);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        hess_sq += integral_of_square(sp, Hs[a * d + b]);
    r.fourth_order_lhs = quartic_scaled + hess_sq;
    r.fourth_order_rhs = r.diss_log;
  }
}

}  // namespace detail

// Full record for a fluid state. V must already solve the Poisson problem
// for rho (the integrators maintain that).
inline DiagnosticsRecord qnsp_diagnostics(const Spectral& sp, const Field& rho,
                                          const VecField& m, const Field& V,
                                          const Field& g, double t, double eps,
                                          double gamma, double delta) {
  const int d = sp.grid().dim;
  DiagnosticsRecord r;
  r.t = t;
  detail::fill_common(sp, rho, V, g, gamma, delta, r);

  Field rf = floored(rho, delta);
  VecField u(d);
  for (int a = 0; a < d; ++a) {
    Field q(rho.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = m[a][i] / rf[i];
    u[a] = sp.dealias(q);
  }

  r.kinetic = 0.0;
  for (int a = 0; a < d; ++a) {
    Field q(rho.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = m[a][i] * m[a][i] / rf[i];
    r.kinetic += sp.integrate(q);
  }
  r.kinetic *= 0.5;
  r.energy = r.kinetic + r.pressure_energy + 2.0 * r.fisher + r.potential_energy;

  VecField w = effective_velocity(sp, rho, u, delta);
  double wkin = 0.0;
  for (int a = 0; a < d; ++a) {
    Field q(rho.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = rho[i] * w[a][i] * w[a][i];
    wkin += sp.integrate(q);
  }
  r.aug_entropy = eps * (0.5 * wkin + r.pressure_energy + 2.0 * r.fisher +
                        r.potential_energy) +
                 r.free_energy;

  std::vector<VecField> G(d);
  for (int a = 0; a < d; ++a) G[a] = sp.grad(u[a]);
  r.diss_visc = 0.0;
  r.diss_rot = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Field qs(rho.size()), qa(rho.size());
      for (std::size_t i = 0; i < rho.size(); ++i) {
        const double Dab = 0.5 * (G[a][b][i] + G[b][a][i]);
        const double Aab = 0.5 * (G[a][b][i] - G[b][a][i]);
        qs[i] = rho[i] * Dab * Dab;
        qa[i] = rho[i] * Aab * Aab;
      }
      r.diss_visc += sp.integrate(qs);
      r.diss_rot += sp.integrate(qa);
    }
  r.diss_damp = 0.0;
  for (int a = 0; a < d; ++a) {
    Field q(rho.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = rho[i] * u[a][i] * u[a][i];
    r.diss_damp += sp.integrate(q);
  }
  return r;
}

// Full record for a drift-diffusion state: energy is the gradient-flow
// functional, aug_entropy coincides with the free energy, and the velocity
// entries are zero.
inline DiagnosticsRecord qdd_diagnostics(const Spectral& sp, const Field& rho,
                                         const Field& V, const Field& g,
                                         double t, double gamma, double delta) {
  const int d = sp.grid().dim;
  DiagnosticsRecord r;
  r.t = t;
  detail::fill_common(sp, rho, V, g, gamma, delta, r);
  r.energy = 2.0 * r.fisher + r.pressure_energy + r.potential_energy;
  r.aug_entropy = r.free_energy;

  Field rf = floored(rho, delta);
  Field s = sqrt_dealiased(sp, rho);
  Field sf = floored(s, std::sqrt(delta));
  Field q = sp.lap(s);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] /= sf[i];
  q = sp.dealias(q);
  VecField gq = sp.grad(q);
  VecField grho = sp.grad(rho);
  VecField gV = sp.grad(V);
  r.qdd_diss = 0.0;
  for (int a = 0; a < d; ++a) {
    Field pg(rho.size());
    for (std::size_t i = 0; i < pg.size(); ++i)
      pg[i] = gamma * std::pow(rf[i], gamma - 2.0) * grho[a][i];
    pg = sp.dealias(pg);
    Field v(rho.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double w = 2.0 * gq[a][i] - pg[i] - gV[a][i];
      v[i] = rho[i] * w * w;
    }
    r.qdd_diss += sp.integrate(v);
  }
  return r;
}

// Balance defects at the end of a run, relative to the initial functional.
// Each is the discrete residual of an exact identity of the smooth flow, so
// refinement in dt must shrink it at the integrator's order.

inline double qnsp_energy_defect(const DiagnosticsRecord& first,
                                 const DiagnosticsRecord& last, double eps) {
  return (last.energy + last.cum_diss_visc / eps +
          last.cum_diss_damp / (eps * eps) - first.energy) /
         first.energy;
}

inline double qnsp_entropy_defect(const DiagnosticsRecord& first,
                             const DiagnosticsRecord& last, double eps,
                             double gamma) {
  return (last.aug_entropy + last.cum_diss_rot + last.cum_diss_log +
          (4.0 / gamma) * last.cum_diss_pressure + last.cum_diss_charge +
          last.cum_diss_damp / eps - first.aug_entropy) /
         first.aug_entropy;
}

inline double qdd_energy_defect(const DiagnosticsRecord& first,
                                const DiagnosticsRecord& last) {
  return (last.energy + last.cum_qdd_diss - first.energy) / first.energy;
}

inline double qdd_free_energy_defect(const DiagnosticsRecord& first,
                                     const DiagnosticsRecord& last,
                                     double gamma) {
  return (last.free_energy + last.cum_diss_log +
          (4.0 / gamma) * last.cum_diss_pressure + last.cum_diss_charge -
          first.free_energy) /
         first.free_energy;
}

}  // namespace qrelax

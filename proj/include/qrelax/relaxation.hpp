#pragma once

#include <cmath>
#include <future>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "poisson.hpp"
#include "qdd.hpp"
#include "qnsp.hpp"
#include "quantum.hpp"
#include "spectral.hpp"
#include "state.hpp"

namespace qrelax {

// First-order corrector velocity of the friction-dominated regime,
//   u = eps ( 2 grad(lap s / s) - grad(rho^gamma)/rho - grad V ),
// with s = sqrt(rho); the pressure term is written with the chain rule so
// the division by rho never happens on a bare gradient. Momenta prepared as
// rho*u start on the slow manifold instead of ringing against the friction.
inline VecField hilbert_velocity(const Spectral& sp, const Field& rho,
                                 const Field& V, double eps, double gamma,
                                 double delta) {
  const int d = sp.grid().dim;
  const std::size_t npts = rho.size();
  Field rf = floored(rho, delta);
  Field s = sqrt_dealiased(sp, rho);
  Field sf = floored(s, std::sqrt(delta));
  Field q(npts);
  {
    Field ls = sp.lap(s);
    for (std::size_t i = 0; i < npts; ++i) q[i] = ls[i] / sf[i];
  }
  q = sp.dealias(q);
  VecField gq = sp.grad(q);
  VecField grho = sp.grad(rho);
  VecField gV = sp.grad(V);
  VecField u(d);
  for (int a = 0; a < d; ++a) {
    Field pg(npts);
    for (std::size_t i = 0; i < npts; ++i)
      pg[i] = gamma * std::pow(rf[i], gamma - 2.0) * grho[a][i];
    pg = sp.dealias(pg);
    Field ua(npts);
    for (std::size_t i = 0; i < npts; ++i)
      ua[i] = eps * (2.0 * gq[a][i] - pg[i] - gV[a][i]);
    u[a] = sp.dealias(ua);
  }
  return u;
}

struct TrajectoryErrors {
  double err_rho = 0.0;  // L2 in time of the H1 distance between sqrt-densities
  double err_V = 0.0;    // sup in time of the L2 distance between grad V
};

namespace detail {

inline void require_comparable(const Trajectory& a, const Trajectory& b) {
  if (!(a.grid == b.grid))
    throw MismatchError("error_norms: trajectories live on different grids");
  if (a.snaps.size() != b.snaps.size())
    throw MismatchError("error_norms: snapshot counts differ (" +
                        std::to_string(a.snaps.size()) + " vs " +
                        std::to_string(b.snaps.size()) + ")");
  if (a.snaps.size() < 2)
    throw DegenerateError("error_norms: need at least two snapshots");
  const double T = a.snaps.back().t - a.snaps.front().t;
  for (std::size_t i = 0; i < a.snaps.size(); ++i)
    if (std::abs(a.snaps[i].t - b.snaps[i].t) > 1e-10 * std::max(1.0, T))
      throw MismatchError("error_norms: snapshot times differ at index " +
                          std::to_string(i));
}

inline std::vector<double> trapezoid_weights(const Trajectory& tr) {
  const std::size_t n = tr.snaps.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = tr.snaps[i + 1].t - tr.snaps[i].t;
    w[i] += h / 2;
    w[i + 1] += h / 2;
  }
  return w;
}

}  // namespace detail

// Distance between a relaxation trajectory and its diffusive limit, measured
// on matched snapshot times: the sqrt-density gap in L2(0,T; H1) by the
// trapezoid rule, and the field gap sup_t || grad V_a - grad V_b ||_L2.
// Stored potentials are used; each snapshot's V is the solve of its rho.
inline TrajectoryErrors error_norms(const Spectral& sp, const Trajectory& a,
                                    const Trajectory& b) {
  detail::require_comparable(a, b);
  TrajectoryErrors out;
  std::vector<double> w = detail::trapezoid_weights(a);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.snaps.size(); ++i) {
    Field sa = sqrt_dealiased(sp, a.snaps[i].rho);
    Field sb = sqrt_dealiased(sp, b.snaps[i].rho);
    for (std::size_t j = 0; j < sa.size(); ++j) sa[j] -= sb[j];
    const double h1 = sp.h1(sa);
    acc += w[i] * h1 * h1;
    Field dv(a.snaps[i].V);
    for (std::size_t j = 0; j < dv.size(); ++j) dv[j] -= b.snaps[i].V[j];
    out.err_V = std::max(out.err_V, sp.l2vec(sp.grad(dv)));
  }
  out.err_rho = std::sqrt(acc);
  return out;
}

// Time-averaged H^-1 norm of the residual of the limiting momentum balance,
//   r = dealias(rho u)/eps - ( divT(sqrt rho) - grad rho^gamma - rho grad V ),
// evaluated along the relaxation trajectory itself. The average uses
// trapezoid weights over the snapshot times, endpoints included.
inline double lambda_recovery(const Spectral& sp, const Trajectory& tr) {
  if (!(tr.eps > 0.0))
    throw ConfigError("lambda_recovery: trajectory must carry eps > 0");
  if (tr.snaps.size() < 2)
    throw DegenerateError("lambda_recovery: need at least two snapshots");
  const int d = tr.grid.dim;
  const std::size_t npts = tr.g.size();
  std::vector<double> w = detail::trapezoid_weights(tr);
  const double T = tr.snaps.back().t - tr.snaps.front().t;
  if (!(T > 0.0))
    throw DegenerateError("lambda_recovery: zero-length time window");

  double acc = 0.0;
  for (std::size_t i = 0; i < tr.snaps.size(); ++i) {
    const Snapshot& sn = tr.snaps[i];
    Field rf = floored(sn.rho, tr.delta);
    VecField B = bohm_force(sp, sn.rho, BohmForm::SqrtTensorDiv, tr.delta);
    Field p(rf);
    for (double& v : p) v = std::pow(v, tr.gamma);
    p = sp.dealias(p);
    VecField gp = sp.grad(p);
    VecField gV = sp.grad(sn.V);
    VecField r(d);
    for (int a = 0; a < d; ++a) {
      Field u(npts);
      for (std::size_t j = 0; j < npts; ++j) u[j] = sn.m[a][j] / rf[j];
      u = sp.dealias(u);
      Field ru(npts);
      for (std::size_t j = 0; j < npts; ++j) ru[j] = sn.rho[j] * u[j];
      ru = sp.dealias(ru);
      Field rgV(npts);
      for (std::size_t j = 0; j < npts; ++j) rgV[j] = sn.rho[j] * gV[a][j];
      rgV = sp.dealias(rgV);
      Field ra(npts);
      for (std::size_t j = 0; j < npts; ++j)
        ra[j] = ru[j] / tr.eps - (B[a][j] - gp[a][j] - rgV[j]);
      r[a] = std::move(ra);
    }
    acc += w[i] * sp.hminus1_vec(r);
  }
  return acc / T;
}

// Least-squares slope of log(err) against log(eps). Guards against inputs
// the fit cannot survive rather than returning a quiet NaN.
inline double fit_rate(const std::vector<double>& eps,
                       const std::vector<double>& err) {
  if (eps.size() != err.size())
    throw DegenerateError("fit_rate: eps and err lengths differ");
  if (eps.size() < 2)
    throw DegenerateError("fit_rate: need at least two points");
  const std::size_t n = eps.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0) || !(err[i] > 0.0))
      throw DegenerateError("fit_rate: values must be positive for a log fit");
    x[i] = std::log(eps[i]);
    y[i] = std::log(err[i]);
  }
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0))
    throw DegenerateError("fit_rate: eps values are all equal");
  return sxy / sxx;
}

// Sup-in-time values of the quantities the entropy balance bounds uniformly
// in eps, plus the accumulated friction dissipation scaled by its 1/eps^2
// weight. The envelope (the per-eps maximum entry) is what stays flat as
// eps shrinks; individual entries are reported for the table.
struct BoundsTable {
  double mass = 0.0;      // sup_t integral of rho
  double rhou2 = 0.0;     // sup_t integral of |m|^2 / rho
  double fisher = 0.0;    // sup_t integral of |grad sqrt(rho)|^2
  double pres = 0.0;      // sup_t integral of rho^gamma
  double hessV = 0.0;     // sup_t integral of (rho - g)^2, i.e. |lap V|^2
  double damp_cum = 0.0;  // cumulative friction dissipation / eps^2

  double envelope() const {
    double m = mass;
    for (double v : {rhou2, fisher, pres, hessV, damp_cum}) m = std::max(m, v);
    return m;
  }
};

inline BoundsTable bounds_table(const Spectral& sp, const Trajectory& tr,
                                double cum_damp, double eps) {
  BoundsTable bt;
  for (const Snapshot& sn : tr.snaps) {
    Field rf = floored(sn.rho, tr.delta);
    bt.mass = std::max(bt.mass, sp.integrate(sn.rho));
    double ru2 = 0.0;
    for (const Field& c : sn.m) {
      Field q(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) q[i] = c[i] * c[i] / rf[i];
      ru2 += sp.integrate(q);
    }
    bt.rhou2 = std::max(bt.rhou2, ru2);
    bt.fisher = std::max(bt.fisher, fisher_information(sp, sn.rho));
    Field pg(rf);
    for (double& v : pg) v = std::pow(v, tr.gamma);
    bt.pres = std::max(bt.pres, sp.integrate(pg));
    Field src(sn.rho);
    for (std::size_t i = 0; i < src.size(); ++i) {
      src[i] -= tr.g[i];
      src[i] *= src[i];
    }
    bt.hessV = std::max(bt.hessV, sp.integrate(src));
  }
  bt.damp_cum = cum_damp / (eps * eps);
  return bt;
}

enum class Preparation { Ill, Well };

struct SweepLeg {
  double eps = 0.0;
  RunResult run;
  double err_rho = 0.0;
  double err_V = 0.0;
  double err_lambda = 0.0;
  double defect_energy = 0.0;
  double defect_entropy = 0.0;
  BoundsTable bounds;
};

struct SweepReport {
  std::vector<double> eps_list;
  RunResult qdd;
  std::vector<SweepLeg> legs;
  double fitted_rate = 0.0;
  Preparation prep = Preparation::Ill;
};

struct SweepSetup {
  Field rho0;
  Field g;
  double gamma = 2.0;
  double delta = 0.0;  // 0 selects the default floor from rho0
  std::vector<double> eps_list;
  double t_end = 0.05;
  double record_every = 0.0;  // 0 selects t_end/25
  double cfl = 0.4;
  Preparation prep = Preparation::Ill;
  bool sequential = false;
};

namespace detail {

inline SweepLeg sweep_leg(const Spectral& sp, const SweepSetup& su,
                          double delta, double record_every, double eps,
                          const Trajectory& limit) {
  State st;
  st.grid = sp.grid();
  st.eps = eps;
  st.gamma = su.gamma;
  st.delta = delta;
  st.rho = su.rho0;
  st.g = su.g;
  st.V = solve_poisson(sp, st.rho, st.g);
  if (su.prep == Preparation::Well) {
    VecField u =
        hilbert_velocity(sp, st.rho, st.V, eps, su.gamma, delta);
    st.m = u;
    for (Field& c : st.m)
      for (std::size_t i = 0; i < c.size(); ++i) c[i] *= st.rho[i];
  } else {
    st.m = zeros_vec(sp.grid().dim, st.rho.size());
  }

  SweepLeg leg;
  leg.eps = eps;
  leg.run = qnsp_run(sp, std::move(st), su.t_end, record_every, su.cfl);
  TrajectoryErrors te = error_norms(sp, leg.run.traj, limit);
  leg.err_rho = te.err_rho;
  leg.err_V = te.err_V;
  leg.err_lambda = lambda_recovery(sp, leg.run.traj);
  leg.defect_energy =
      qnsp_energy_defect(leg.run.records.front(), leg.run.records.back(), eps);
  leg.defect_entropy = qnsp_entropy_defect(leg.run.records.front(),
                                 leg.run.records.back(), eps, su.gamma);
  leg.bounds = bounds_table(sp, leg.run.traj,
                            leg.run.records.back().cum_diss_damp, eps);
  return leg;
}

}  // namespace detail

// Runs the diffusive-limit reference once, then one relaxation leg per eps,
// and reports matched-time error norms, the recovered momentum residual,
// balance defects, and the uniform-bound table for each leg. Legs are
// independent, so by default they run on separate threads; results are
// identical either way because nothing here draws random numbers and each
// leg owns its state.
inline SweepReport run_sweep(const Spectral& sp, const SweepSetup& su) {
  if (su.eps_list.size() < 2)
    throw ConfigError("run_sweep: need at least two eps values");
  for (std::size_t i = 0; i + 1 < su.eps_list.size(); ++i)
    if (!(su.eps_list[i + 1] < su.eps_list[i]))
      throw ConfigError("run_sweep: eps_list must be strictly decreasing");
  for (double e : su.eps_list)
    if (!(e > 0.0)) throw ConfigError("run_sweep: eps values must be positive");

  const double delta =
      su.delta > 0.0 ? su.delta : default_delta(su.rho0);
  const double record_every =
      su.record_every > 0.0 ? su.record_every : su.t_end / 25.0;

  SweepReport rep;
  rep.eps_list = su.eps_list;
  rep.prep = su.prep;

  State limit_state;
  limit_state.grid = sp.grid();
  limit_state.eps = 0.0;
  limit_state.gamma = su.gamma;
  limit_state.delta = delta;
  limit_state.rho = su.rho0;
  limit_state.g = su.g;
  rep.qdd = qdd_run(sp, std::move(limit_state), su.t_end, record_every, su.cfl);

  const std::size_t nlegs = su.eps_list.size();
  rep.legs.resize(nlegs);
  if (su.sequential || nlegs == 1 || std::thread::hardware_concurrency() <= 1) {
    for (std::size_t i = 0; i < nlegs; ++i)
      rep.legs[i] = detail::sweep_leg(sp, su, delta, record_every,
                                      su.eps_list[i], rep.qdd.traj);
  } else {
    std::vector<std::future<SweepLeg>> futs;
    futs.reserve(nlegs);
    for (std::size_t i = 0; i < nlegs; ++i)
      futs.push_back(std::async(std::launch::async, [&, i] {
        return detail::sweep_leg(sp, su, delta, record_every, su.eps_list[i],
                                 rep.qdd.traj);
      }));
    for (std::size_t i = 0; i < nlegs; ++i) rep.legs[i] = futs[i].get();
  }

  std::vector<double> errs;
  errs.reserve(nlegs);
  for (const SweepLeg& l : rep.legs) errs.push_back(l.err_rho);
  rep.fitted_rate = fit_rate(su.eps_list, errs);
  return rep;
}

}  // namespace qrelax

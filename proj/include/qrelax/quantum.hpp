#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "field.hpp"
#include "spectral.hpp"

namespace qrelax {

// The quantum pressure term admits three algebraically equivalent forms:
//   Variational:   2*rho*grad(Lap(sqrt(rho))/sqrt(rho))
//   LogHessianDiv: div(rho * Hess(log rho))
//   SqrtTensorDiv: div(2*sqrt(rho)*Hess(sqrt(rho))
//                      - 2*grad(sqrt(rho)) (x) grad(sqrt(rho)))
// SqrtTensorDiv is the solver default; it stays meaningful down to very small
// densities and its tensor is the one whose divergence the limiting flux
// identity uses. The other two are kept for cross-validation.
enum class BohmForm { Variational, LogHessianDiv, SqrtTensorDiv };

inline const char* to_string(BohmForm f) {
  switch (f) {
    case BohmForm::Variational:
      return "variational";
    case BohmForm::LogHessianDiv:
      return "log-hessian-div";
    case BohmForm::SqrtTensorDiv:
      return "sqrt-tensor-div";
  }
  return "?";
}

// sqrt(rho) evaluated pointwise and then re-projected onto the retained
// band: the square root is not band-limited and would otherwise alias
// every downstream derivative.
inline Field sqrt_dealiased(const Spectral& sp, const Field& rho) {
  Field s(rho);
  for (double& v : s) v = std::sqrt(std::max(v, 0.0));
  return sp.dealias(s);
}

namespace detail {

inline void require_above_floor(const Field& rho, double delta, bool strict,
                                const char* who) {
  if (!strict) return;
  if (min_value(rho) < delta)
    throw VacuumError(std::string(who) +
                      ": density fell below the vacuum floor in strict mode");
}

}  // namespace detail

inline VecField bohm_force(const Spectral& sp, const Field& rho, BohmForm form,
                           double delta, bool strict = false) {
  detail::require_above_floor(rho, delta, strict, "bohm_force");
  const int d = sp.grid().dim;
  if (form == BohmForm::Variational) {
    Field s = sqrt_dealiased(sp, rho);
    Field sf = floored(s, std::sqrt(delta));
    Field q = sp.lap(s);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] /= sf[i];
    q = sp.dealias(q);
    VecField gq = sp.grad(q);
    VecField out(d);
    for (int a = 0; a < d; ++a) {
      Field p(rho.size());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = 2.0 * rho[i] * gq[a][i];
      out[a] = sp.dealias(p);
    }
    return out;
  }
  if (form == BohmForm::LogHessianDiv) {
    Field ell = floored(rho, delta);
    for (double& v : ell) v = std::log(v);
    ell = sp.dealias(ell);
    TensorField H = sp.hess(ell);
    VecField out(d, Field(rho.size(), 0.0));
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        Field P(rho.size());
        for (std::size_t i = 0; i < P.size(); ++i)
          P[i] = rho[i] * H[a * d + b][i];
        P = sp.dealias(P);
        std::array<int, 3> od{0, 0, 0};
        od[b] = 1;
        add_scaled(out[a], sp.deriv(P, od), 1.0);
      }
    }
    return out;
  }
  // SqrtTensorDiv
  Field s = sqrt_dealiased(sp, rho);
  VecField gs = sp.grad(s);
  TensorField Hs = sp.hess(s);
  VecField out(d, Field(rho.size(), 0.0));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Field T(rho.size());
      for (std::size_t i = 0; i < T.size(); ++i)
        T[i] = 2.0 * s[i] * Hs[a * d + b][i] - 2.0 * gs[a][i] * gs[b][i];
      T = sp.dealias(T);
      std::array<int, 3> od{0, 0, 0};
      od[b] = 1;
      add_scaled(out[a], sp.deriv(T, od), 1.0);
    }
  }
  return out;
}

// w = u + grad(log(max(rho, delta))), the drift-corrected velocity whose
// kinetic energy controls the extra density regularity.
inline VecField effective_velocity(const Spectral& sp, const Field& rho,
                                   const VecField& u, double delta) {
  Field ell = floored(rho, delta);
  for (double& v : ell) v = std::log(v);
  ell = sp.dealias(ell);
  VecField gl = sp.grad(ell);
  VecField w(u);
  for (std::size_t a = 0; a < w.size(); ++a) add_scaled(w[a], gl[a], 1.0);
  return w;
}

// S = (2*sqrt(rho)*Hess(sqrt(rho)) - 2*grad sqrt(rho) (x) grad sqrt(rho))
//     / max(sqrt(rho), sqrt(delta));
// equals sqrt(rho)*Hess(log rho) wherever rho >= delta. The division is
// pointwise and undone exactly by multiplying with the same floored root,
// which is what the identity test checks.
inline TensorField entropy_tensor_S(const Spectral& sp, const Field& rho,
                                    double delta) {
  const int d = sp.grid().dim;
  Field s = sqrt_dealiased(sp, rho);
  Field sf = floored(s, std::sqrt(delta));
  VecField gs = sp.grad(s);
  TensorField Hs = sp.hess(s);
  TensorField S(static_cast<std::size_t>(d) * d, Field(rho.size()));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (std::size_t i = 0; i < rho.size(); ++i)
        S[a * d + b][i] =
            (2.0 * s[i] * Hs[a * d + b][i] - 2.0 * gs[a][i] * gs[b][i]) / sf[i];
  return S;
}

// Fisher information: integral of |grad sqrt(rho)|^2.
inline double fisher_information(const Spectral& sp, const Field& rho) {
  Field s = sqrt_dealiased(sp, rho);
  double acc = 0.0;
  for (const Field& c : sp.grad(s)) {
    double n = sp.l2(c);
    acc += n * n;
  }
  return acc;
}

// Everything the fourth-root inequality needs, evaluated on one density:
//   lhs_quartic        integral of |grad rho^(1/4)|^4, computed directly
//   lhs_quartic_scaled (1/16) * integral of |grad sqrt(rho)|^4 / rho,
//                      the chain-rule-consistent value of the same quantity
//   lhs_hessian        integral of |Hess sqrt(rho)|^2
//   rhs                integral of rho*|Hess log rho|^2
//   ratio              (lhs_quartic_scaled + lhs_hessian)/rhs, 0/0 -> 0
//   chain_ratio        ((1/2) int |grad sqrt rho|^4/rho + lhs_hessian)
//                      / ((3/4) rhs), the sharp proof-chain comparison
//   identity_lhs/rhs   both sides of
//                      int rho*|grad(grad sqrt(rho)/sqrt(rho))|^2
//                        = (1/4) int rho*|Hess log rho|^2
struct FourthOrderReport {
  double lhs_quartic = 0.0;
  double lhs_quartic_scaled = 0.0;
  double lhs_hessian = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double chain_ratio = 0.0;
  double identity_lhs = 0.0;
  double identity_rhs = 0.0;
};

inline FourthOrderReport fourth_order_check(const Spectral& sp,
                                                 const Field& rho,
                                                 double delta) {
  const int d = sp.grid().dim;
  FourthOrderReport rep;
  Field s = sqrt_dealiased(sp, rho);
  VecField gs = sp.grad(s);
  TensorField Hs = sp.hess(s);

  Field r4(rho);
  for (double& v : r4) v = std::pow(std::max(v, 0.0), 0.25);
  r4 = sp.dealias(r4);
  VecField g4 = sp.grad(r4);

  Field rf = floored(rho, delta);
  Field gs2(rho.size(), 0.0);
  for (int a = 0; a < d; ++a)
    for (std::size_t i = 0; i < gs2.size(); ++i)
      gs2[i] += gs[a][i] * gs[a][i];

  {
    Field q(rho.size(), 0.0);
    for (int a = 0; a < d; ++a)
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += g4[a][i] * g4[a][i];
    for (double& v : q) v = v * v;
    rep.lhs_quartic = sp.integrate(q);
  }
  {
    Field q(rho.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = gs2[i] * gs2[i] / rf[i];
    rep.lhs_quartic_scaled = sp.integrate(q) / 16.0;
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Field q(rho.size());
      const Field& H = Hs[a * d + b];
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = H[i] * H[i];
      rep.lhs_hessian += sp.integrate(q);
    }

  Field ell(rf);
  for (double& v : ell) v = std::log(v);
  ell = sp.dealias(ell);
  TensorField Hl = sp.hess(ell);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Field q(rho.size());
      const Field& H = Hl[a * d + b];
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = rho[i] * H[i] * H[i];
      rep.rhs += sp.integrate(q);
    }

  rep.ratio = rep.rhs > 0.0
                  ? (rep.lhs_quartic_scaled + rep.lhs_hessian) / rep.rhs
                  : 0.0;
  // chain numerator (1/2)*int |grad sqrt|^4/rho equals 8*lhs_quartic_scaled
  rep.chain_ratio =
      rep.rhs > 0.0
          ? (8.0 * rep.lhs_quartic_scaled + rep.lhs_hessian) / (0.75 * rep.rhs)
          : 0.0;

  Field sf = floored(s, std::sqrt(delta));
  for (int a = 0; a < d; ++a) {
    Field X(rho.size());
    for (std::size_t i = 0; i < X.size(); ++i) X[i] = gs[a][i] / sf[i];
    X = sp.dealias(X);
    for (int b = 0; b < d; ++b) {
      std::array<int, 3> od{0, 0, 0};
      od[b] = 1;
      Field J = sp.deriv(X, od);
      Field q(rho.size());
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = rho[i] * J[i] * J[i];
      rep.identity_lhs += sp.integrate(q);
    }
  }
  rep.identity_rhs = rep.rhs / 4.0;
  return rep;
}

}  // namespace qrelax

// Acceptance gate: runs every numbered acceptance check at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit code 0 only
// if all pass. An optional integer argument restricts the run to that
// criterion (heavy shared computations are still done if it needs them).

#include <qrelax/qrelax.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

using namespace qrelax;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Gate {
  std::vector<std::string> lines;
  bool all_pass = true;

  void report(int id, bool pass, const std::string& text) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s criterion %2d: %s",
                  pass ? "PASS" : "FAIL", id, text.c_str());
    lines.push_back(buf);
    if (!pass) all_pass = false;
    std::printf("%s\n", buf);
    std::fflush(stdout);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

// The single shared scenario: unit torus, 128 points, a 30% cosine bump
// over a neutral background, stiff pressure, gamma = 2.
struct Scenario {
  Grid grid = make_grid(1, 128, 1.0);
  Spectral sp{grid};
  Field rho0, bg;
  double gamma = 2.0;
  double delta = 0.0;

  Scenario() {
    rho0 = Field(grid.npts);
    for (std::size_t i = 0; i < grid.npts; ++i)
      rho0[i] = 1.0 + 0.3 * std::cos(2.0 * kPi * grid.x(i));
    bg = Field(grid.npts, 1.0);
    delta = default_delta(rho0);
  }

  State initial(double eps) const {
    State st;
    st.grid = grid;
    st.eps = eps;
    st.gamma = gamma;
    st.delta = delta;
    st.rho = rho0;
    st.m = zeros_vec(grid.dim, grid.npts);
    st.g = bg;
    st.V = solve_poisson(sp, st.rho, st.g);
    return st;
  }
};

// Heavy results computed once and shared between criteria.
struct SharedRuns {
  std::optional<RunResult> qnsp_base, qnsp_fine;
  std::optional<RunResult> qdd_base, qdd_fine;
  std::optional<SweepReport> ill, well;

  const Scenario& sc;
  explicit SharedRuns(const Scenario& s) : sc(s) {}

  void need_qnsp() {
    if (qnsp_base) return;
    std::fprintf(stderr, "[acceptance] fluid balance runs...\n");
    State st = sc.initial(0.2);
    const double t_end = 0.02;
    qnsp_base = qnsp_run(sc.sp, st, t_end, t_end / 25.0);
    qnsp_fine = qnsp_run(sc.sp, st, t_end, t_end / 25.0, 0.4,
                         2 * qnsp_base->nsteps);
  }

  void need_qdd() {
    if (qdd_base) return;
    std::fprintf(stderr, "[acceptance] diffusion balance runs...\n");
    State st = sc.initial(0.0);
    const double t_end = 0.02;
    qdd_base = qdd_run(sc.sp, st, t_end, t_end / 25.0);
    qdd_fine =
        qdd_run(sc.sp, st, t_end, t_end / 25.0, 0.4, 2 * qdd_base->nsteps);
  }

  SweepSetup sweep_setup(Preparation prep) const {
    SweepSetup su;
    su.rho0 = sc.rho0;
    su.g = sc.bg;
    su.gamma = sc.gamma;
    su.eps_list = {0.4, 0.2, 0.1, 0.05};
    su.t_end = 0.05;
    su.prep = prep;
    su.sequential = true;
    return su;
  }

  void need_ill() {
    if (ill) return;
    std::fprintf(stderr, "[acceptance] relaxation sweep, data at rest...\n");
    ill = run_sweep(sc.sp, sweep_setup(Preparation::Ill));
  }

  void need_well() {
    if (well) return;
    std::fprintf(stderr, "[acceptance] relaxation sweep, prepared data...\n");
    well = run_sweep(sc.sp, sweep_setup(Preparation::Well));
  }
};

bool wanted(int only, int id) { return only == 0 || only == id; }

void criterion_1(Gate& gate) {
  PropertyResult r = verify_bohm_forms(1, 1, 128, 100);
  gate.report(1, r.worst <= r.limit,
              "quantum-force form equivalence, worst pairwise rel L2 " +
                  fmt(r.worst) + " <= 1e-7 over 100 densities");
}

void criterion_2(Gate& gate) {
  PropertyResult a = verify_fourth_order_inequality(1, 1, 128, 100);
  PropertyResult b = verify_fourth_order_inequality(1, 2, 32, 25);
  const double worst = std::max(a.worst, b.worst);
  gate.report(2, worst <= 1.0 + 1e-6,
              "fourth-order inequality sharp ratio " + fmt(worst) +
                  " <= 1+1e-6 over 100 1D + 25 2D densities");
}

void criterion_3(Gate& gate) {
  PropertyResult a = verify_curvature_identity(1, 1, 128, 100);
  PropertyResult b = verify_curvature_identity(1, 2, 32, 25);
  const double worst = std::max(a.worst, b.worst);
  gate.report(3, worst <= 1e-8,
              "curvature-energy identity, worst rel err " + fmt(worst) +
                  " <= 1e-8 over the same ensemble");
}

void criterion_4(Gate& gate, SharedRuns& sh) {
  sh.need_qnsp();
  const double eps = 0.2;
  const double d1 = qnsp_energy_defect(sh.qnsp_base->records.front(),
                                       sh.qnsp_base->records.back(), eps);
  const double d2 = qnsp_energy_defect(sh.qnsp_fine->records.front(),
                                       sh.qnsp_fine->records.back(), eps);
  const double factor = std::abs(d1) / std::abs(d2);
  gate.report(4, std::abs(d1) <= 1e-4 && factor >= 2.0,
              "fluid energy balance defect " + fmt(std::abs(d1)) +
                  " <= 1e-4, dt/2 shrink factor " + fmt(factor) + " >= 2");
}

void criterion_5(Gate& gate, SharedRuns& sh) {
  sh.need_qnsp();
  const double eps = 0.2, gamma = 2.0;
  const double d1 =
      qnsp_entropy_defect(sh.qnsp_base->records.front(),
                     sh.qnsp_base->records.back(), eps, gamma);
  const double d2 =
      qnsp_entropy_defect(sh.qnsp_fine->records.front(),
                     sh.qnsp_fine->records.back(), eps, gamma);
  const double factor = std::abs(d1) / std::abs(d2);
  gate.report(5, std::abs(d1) <= 1e-4 && factor >= 2.0,
              "fluid entropy balance defect " + fmt(std::abs(d1)) +
                  " <= 1e-4, dt/2 shrink factor " + fmt(factor) + " >= 2");
}

void criterion_6(Gate& gate, SharedRuns& sh) {
  sh.need_qdd();
  const double e1 = qdd_energy_defect(sh.qdd_base->records.front(),
                                      sh.qdd_base->records.back());
  const double e2 = qdd_energy_defect(sh.qdd_fine->records.front(),
                                      sh.qdd_fine->records.back());
  const double f1 = qdd_free_energy_defect(sh.qdd_base->records.front(),
                                           sh.qdd_base->records.back(), 2.0);
  const double f2 = qdd_free_energy_defect(sh.qdd_fine->records.front(),
                                           sh.qdd_fine->records.back(), 2.0);
  const double fe = std::abs(e1) / std::abs(e2);
  const double ff = std::abs(f1) / std::abs(f2);
  const bool pass = std::abs(e1) <= 1e-4 && std::abs(f1) <= 1e-4 &&
                    fe >= 2.0 && ff >= 2.0;
  gate.report(6, pass,
              "diffusion balance defects " + fmt(std::abs(e1)) + ", " +
                  fmt(std::abs(f1)) + " <= 1e-4, shrink factors " + fmt(fe) +
                  ", " + fmt(ff) + " >= 2");
}

void criterion_7(Gate& gate, SharedRuns& sh) {
  sh.need_ill();
  const auto& legs = sh.ill->legs;
  bool rho_dec = true, v_dec = true;
  for (std::size_t i = 1; i < legs.size(); ++i) {
    rho_dec = rho_dec && legs[i].err_rho < legs[i - 1].err_rho;
    v_dec = v_dec && legs[i].err_V < legs[i - 1].err_V;
  }
  const bool third = legs.back().err_rho <= legs.front().err_rho / 3.0;
  gate.report(7, rho_dec && v_dec && third,
              "relaxation convergence: err_rho " + fmt(legs.front().err_rho) +
                  " -> " + fmt(legs.back().err_rho) +
                  (rho_dec ? " strictly down" : " NOT monotone") +
                  ", 3x margin " +
                  fmt(legs.front().err_rho / legs.back().err_rho) +
                  ", err_V " + (v_dec ? "strictly down" : "NOT monotone") +
                  ", fitted rate " + fmt(sh.ill->fitted_rate) +
                  " (reported, not asserted)");
}

void criterion_8(Gate& gate, SharedRuns& sh) {
  sh.need_ill();
  sh.need_well();
  bool pass = true;
  double worst_ratio = 0.0, worst_eps = 0.0;
  for (std::size_t i = 0; i < sh.ill->legs.size(); ++i) {
    const double ratio =
        sh.well->legs[i].err_rho / sh.ill->legs[i].err_rho;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_eps = sh.ill->legs[i].eps;
    }
    pass = pass && sh.well->legs[i].err_rho <= sh.ill->legs[i].err_rho;
  }
  gate.report(8, pass,
              "prepared-data improvement: worst err_rho ratio well/ill " +
                  fmt(worst_ratio) + " at eps " + fmt(worst_eps) +
                  " (needs <= 1 at every eps)");
}

void criterion_9(Gate& gate, SharedRuns& sh) {
  sh.need_ill();
  const auto& legs = sh.ill->legs;
  bool dec = true;
  for (std::size_t i = 1; i < legs.size(); ++i)
    dec = dec && legs[i].err_lambda < legs[i - 1].err_lambda;
  gate.report(9, dec,
              "friction-flux recovery residual " +
                  fmt(legs.front().err_lambda) + " -> " +
                  fmt(legs.back().err_lambda) +
                  (dec ? " strictly decreasing" : " NOT monotone"));
}

void criterion_10(Gate& gate, SharedRuns& sh) {
  sh.need_qnsp();
  sh.need_qdd();
  sh.need_ill();
  sh.need_well();
  const Scenario& sc = sh.sc;

  double worst_mass = 0.0, worst_meanV = 0.0, worst_res = 0.0;
  auto scan = [&](const RunResult& res) {
    const double m0 = res.records.front().mass;
    for (const auto& r : res.records)
      worst_mass = std::max(worst_mass, std::abs(r.mass - m0) / m0);
    for (const auto& sn : res.traj.snaps) {
      worst_meanV =
          std::max(worst_meanV, std::abs(sc.sp.integrate(sn.V)) /
                                    sc.grid.measure());
      worst_res = std::max(
          worst_res, poisson_residual(sc.sp, sn.V, sn.rho, res.traj.g));
    }
  };
  scan(*sh.qnsp_base);
  scan(*sh.qnsp_fine);
  scan(*sh.qdd_base);
  scan(*sh.qdd_fine);
  scan(sh.ill->qdd);
  scan(sh.well->qdd);
  for (const auto& leg : sh.ill->legs) scan(leg.run);
  for (const auto& leg : sh.well->legs) scan(leg.run);

  // constant density matching its background must not move at all
  std::fprintf(stderr, "[acceptance] stationary-state endurance...\n");
  const int nsteps = 1000;
  double worst_stat = 0.0;
  {
    State st = sc.initial(0.2);
    st.rho = Field(sc.grid.npts, 1.1);
    st.g = Field(sc.grid.npts, 1.1);
    st.delta = default_delta(st.rho);
    st.V = solve_poisson(sc.sp, st.rho, st.g);
    const double dt = qnsp_dt_policy(sc.sp, st, 0.4);
    for (int k = 0; k < nsteps; ++k) qnsp_step(sc.sp, st, dt);
    for (std::size_t i = 0; i < st.rho.size(); ++i) {
      worst_stat = std::max(worst_stat, std::abs(st.rho[i] - 1.1));
      worst_stat = std::max(worst_stat, std::abs(st.m[0][i]));
    }
  }
  {
    State st = sc.initial(0.0);
    st.rho = Field(sc.grid.npts, 1.1);
    st.g = Field(sc.grid.npts, 1.1);
    st.delta = default_delta(st.rho);
    st.V = solve_poisson(sc.sp, st.rho, st.g);
    const double dt = qdd_dt_policy(sc.sp, st, 0.4);
    Field k4 = detail::biharmonic_symbol(sc.grid);
    for (int k = 0; k < nsteps; ++k) qdd_step(sc.sp, st, dt, k4);
    for (double v : st.rho)
      worst_stat = std::max(worst_stat, std::abs(v - 1.1));
  }
  const double stat_limit = 1e-12 * nsteps;

  const bool pass = worst_mass <= 1e-10 && worst_meanV <= 1e-13 &&
                    worst_res <= 1e-10 && worst_stat <= stat_limit;
  gate.report(10, pass,
              "structure: mass drift " + fmt(worst_mass) +
                  " <= 1e-10, mean potential " + fmt(worst_meanV) +
                  " <= 1e-13, field residual " + fmt(worst_res) +
                  " <= 1e-10, stationary drift " + fmt(worst_stat) + " <= " +
                  fmt(stat_limit));
}

void criterion_11(Gate& gate, SharedRuns& sh) {
  sh.need_ill();
  double lo = 1e300, hi = 0.0;
  for (const auto& leg : sh.ill->legs) {
    const double e = leg.bounds.envelope();
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  const double var = hi / lo - 1.0;
  gate.report(11, var <= 0.20,
              "uniform-bound envelope varies by " + fmt(var) +
                  " (<= 0.20) across the sweep, range [" + fmt(lo) + ", " +
                  fmt(hi) + "]");
}

void criterion_12(Gate& gate) {
  PropertyResult r = verify_interpolation(1, 128, 200);
  gate.report(12, r.worst <= r.limit,
              "interpolation bound, worst relative violation " +
                  fmt(r.worst) + " <= 1e-12 over 200 fields");
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  if (argc > 2 || (argc == 2 && (only < 1 || only > 12))) {
    std::fprintf(stderr, "usage: %s [criterion 1..12]\n", argv[0]);
    return 2;
  }

  Gate gate;
  Scenario sc;
  SharedRuns sh(sc);

  try {
    if (wanted(only, 1)) criterion_1(gate);
    if (wanted(only, 2)) criterion_2(gate);
    if (wanted(only, 3)) criterion_3(gate);
    if (wanted(only, 4)) criterion_4(gate, sh);
    if (wanted(only, 5)) criterion_5(gate, sh);
    if (wanted(only, 6)) criterion_6(gate, sh);
    if (wanted(only, 7)) criterion_7(gate, sh);
    if (wanted(only, 8)) criterion_8(gate, sh);
    if (wanted(only, 9)) criterion_9(gate, sh);
    if (wanted(only, 10)) criterion_10(gate, sh);
    if (wanted(only, 11)) criterion_11(gate, sh);
    if (wanted(only, 12)) criterion_12(gate);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
    return 2;
  }

  std::size_t passed = 0;
  for (const auto& l : gate.lines)
    if (l.rfind("PASS", 0) == 0) ++passed;
  std::printf("%zu/%zu criteria passed\n", passed, gate.lines.size());
  return gate.all_pass ? 0 : 1;
}

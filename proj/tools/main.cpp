#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <qrelax/qrelax.hpp>

namespace {

using namespace qrelax;

struct CliOptions {
  std::string config_path;
  std::string out_override;
  std::uint64_t seed = 0;
  bool sequential = false;
  bool plots = false;
  double fault = 0.0;  // verify-only corruption hook
};

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Config load_config(const CliOptions& opt, const std::string& subcommand) {
  Config cfg;
  if (!opt.config_path.empty()) {
    cfg = parse_config(slurp(opt.config_path));
  } else if (subcommand == "verify") {
    cfg.mode = "verify";  // verify runs fine with built-in defaults
  } else {
    throw ConfigError("--config is required for mode " + subcommand);
  }
  if (cfg.mode != subcommand)
    throw ConfigError("config mode '" + cfg.mode +
                      "' does not match subcommand '" + subcommand + "'");
  if (!opt.out_override.empty()) cfg.out_dir = opt.out_override;
  if (opt.plots) cfg.plots = true;
  return cfg;
}

// Builds the initial state a run starts from. Analytic families come from
// the config; a checkpoint brings its own fields and clock, with the config
// supplying the physics parameters so a restart may change eps or gamma.
State build_state(const Spectral& sp, const Config& cfg) {
  const Grid& grid = sp.grid();
  State st;
  st.grid = grid;
  st.gamma = cfg.gamma;
  st.eps = cfg.eps;

  if (cfg.rho0.family == IcFamily::CheckpointLoad) {
    State loaded = read_checkpoint(cfg.rho0.path);
    if (!(loaded.grid == grid))
      throw ConfigError("checkpoint grid (dim " +
                        std::to_string(loaded.grid.dim) + ", n " +
                        std::to_string(loaded.grid.n) +
                        ") does not match the configured grid");
    st.t = loaded.t;
    st.rho = std::move(loaded.rho);
    st.m = std::move(loaded.m);
    st.g = std::move(loaded.g);
  } else {
    st.rho = make_density(grid, cfg.rho0);
    st.m = zeros_vec(grid.dim, grid.npts);
  }

  if (cfg.g_given || st.g.empty()) {
    Field g_raw = cfg.g_given ? make_density(grid, cfg.g)
                              : Field(grid.npts, 1.0);
    st.g = project_doping(sp, g_raw, st.rho);
  }
  st.delta = cfg.delta_floor * max_value(st.rho);
  st.V = solve_poisson(sp, st.rho, st.g);

  if (cfg.u0 == "hilbert") {
    VecField u = hilbert_velocity(sp, st.rho, st.V, st.eps, st.gamma, st.delta);
    st.m = u;
    for (Field& c : st.m)
      for (std::size_t i = 0; i < c.size(); ++i) c[i] *= st.rho[i];
  }
  return st;
}

void report_plot_result(const PlotResult& pr) {
  for (const std::string& f : pr.files) std::printf("wrote %s\n", f.c_str());
  for (const std::string& w : pr.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const std::string& e : pr.errors)
    std::fprintf(stderr, "error: %s\n", e.c_str());
}

int run_qnsp(const CliOptions& opt) {
  Config cfg = load_config(opt, "qnsp");
  Grid grid = make_grid(cfg.dim, cfg.n, cfg.length);
  Spectral sp(grid);
  State st = build_state(sp, cfg);
  const double eps = st.eps;
  const double record_every =
      cfg.record_every > 0.0 ? cfg.record_every : cfg.t_end / 25.0;

  RunResult res = qnsp_run(sp, std::move(st), cfg.t_end, record_every, cfg.cfl);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string series_path = cfg.out_dir + "/series.ndjson";
  write_series(res.records, series_path);
  std::printf("wrote %s\n", series_path.c_str());

  State fin;
  fin.grid = grid;
  fin.t = res.traj.snaps.back().t;
  fin.eps = eps;
  fin.gamma = cfg.gamma;
  fin.delta = res.traj.delta;
  fin.rho = res.traj.snaps.back().rho;
  fin.m = res.traj.snaps.back().m;
  fin.V = res.traj.snaps.back().V;
  fin.g = res.traj.g;
  const std::string ckpt_path = cfg.out_dir + "/final.ckpt";
  write_checkpoint(ckpt_path, fin);
  std::printf("wrote %s\n", ckpt_path.c_str());

  if (cfg.plots) {
    PlotResult pr;
    plot_series(res.records, cfg.out_dir + "/energy_entropy.svg", pr);
    plot_density(res.traj, cfg.out_dir + "/density.svg", pr);
    report_plot_result(pr);
  }

  const DiagnosticsRecord& first = res.records.front();
  const DiagnosticsRecord& last = res.records.back();
  std::printf("qnsp: %d steps, dt %.3e, t_end %g\n", res.nsteps, res.dt,
              cfg.t_end);
  std::printf("mass drift (relative):   %.3e\n",
              std::abs(last.mass - first.mass) / first.mass);
  std::printf("energy balance defect:   %.3e\n",
              qnsp_energy_defect(first, last, eps));
  std::printf("entropy balance defect: %.3e\n",
              qnsp_entropy_defect(first, last, eps, cfg.gamma));
  return 0;
}

int run_qdd(const CliOptions& opt) {
  Config cfg = load_config(opt, "qdd");
  Grid grid = make_grid(cfg.dim, cfg.n, cfg.length);
  Spectral sp(grid);
  State st = build_state(sp, cfg);
  const double record_every =
      cfg.record_every > 0.0 ? cfg.record_every : cfg.t_end / 25.0;

  RunResult res = qdd_run(sp, std::move(st), cfg.t_end, record_every, cfg.cfl);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string series_path = cfg.out_dir + "/series.ndjson";
  write_series(res.records, series_path);
  std::printf("wrote %s\n", series_path.c_str());

  State fin;
  fin.grid = grid;
  fin.t = res.traj.snaps.back().t;
  fin.eps = 0.0;
  fin.gamma = cfg.gamma;
  fin.delta = res.traj.delta;
  fin.rho = res.traj.snaps.back().rho;
  fin.m = res.traj.snaps.back().m;
  fin.V = res.traj.snaps.back().V;
  fin.g = res.traj.g;
  const std::string ckpt_path = cfg.out_dir + "/final.ckpt";
  write_checkpoint(ckpt_path, fin);
  std::printf("wrote %s\n", ckpt_path.c_str());

  if (cfg.plots) {
    PlotResult pr;
    plot_series(res.records, cfg.out_dir + "/energy_entropy.svg", pr);
    plot_density(res.traj, cfg.out_dir + "/density.svg", pr);
    report_plot_result(pr);
  }

  const DiagnosticsRecord& first = res.records.front();
  const DiagnosticsRecord& last = res.records.back();
  std::printf("qdd: %d steps, dt %.3e, t_end %g\n", res.nsteps, res.dt,
              cfg.t_end);
  std::printf("mass drift (relative):     %.3e\n",
              std::abs(last.mass - first.mass) / first.mass);
  std::printf("energy balance defect:     %.3e\n",
              qdd_energy_defect(first, last));
  std::printf("free-energy balance defect: %.3e\n",
              qdd_free_energy_defect(first, last, cfg.gamma));
  return 0;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", eps);
  std::string s(buf);
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

int run_sweep(const CliOptions& opt) {
  Config cfg = load_config(opt, "sweep");
  Grid grid = make_grid(cfg.dim, cfg.n, cfg.length);
  Spectral sp(grid);

  SweepSetup su;
  su.rho0 = make_density(grid, cfg.rho0);
  Field g_raw = cfg.g_given ? make_density(grid, cfg.g) : Field(grid.npts, 1.0);
  su.g = project_doping(sp, g_raw, su.rho0);
  su.gamma = cfg.gamma;
  su.delta = cfg.delta_floor * max_value(su.rho0);
  su.eps_list = cfg.eps_list;
  su.t_end = cfg.t_end;
  su.record_every = cfg.record_every;
  su.cfl = cfg.cfl;
  su.prep = cfg.u0 == "hilbert" ? Preparation::Well : Preparation::Ill;
  su.sequential = opt.sequential;

  SweepReport rep = run_sweep(sp, su);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string report_path = cfg.out_dir + "/sweep_report.json";
  write_sweep_report(rep, report_path);
  std::printf("wrote %s\n", report_path.c_str());
  write_series(rep.qdd.records, cfg.out_dir + "/qdd_series.ndjson");
  for (const SweepLeg& leg : rep.legs)
    write_series(leg.run.records,
                 cfg.out_dir + "/qnsp_eps_" + eps_tag(leg.eps) + ".ndjson");

  if (cfg.plots) {
    PlotResult pr;
    plot_convergence(rep, cfg.out_dir + "/convergence.svg", pr);
    plot_series(rep.qdd.records, cfg.out_dir + "/qdd_energy_entropy.svg", pr);
    plot_density(rep.qdd.traj, cfg.out_dir + "/qdd_density.svg", pr);
    report_plot_result(pr);
  }

  std::printf("sweep (%s-prepared), fitted rate %.3f\n",
              rep.prep == Preparation::Well ? "well" : "ill", rep.fitted_rate);
  for (const SweepLeg& leg : rep.legs)
    std::printf("eps %-6g err_rho %.5e  err_V %.5e  lambda %.5e  "
                "bound-envelope %.4f\n",
                leg.eps, leg.err_rho, leg.err_V, leg.err_lambda,
                leg.bounds.envelope());
  return 0;
}

int run_verify(const CliOptions& opt) {
  Config cfg = load_config(opt, "verify");
  (void)cfg;
  std::vector<PropertyResult> results = verify_all(opt.seed, opt.fault);
  bool all_pass = true;
  for (const PropertyResult& r : results) {
    std::printf("%-26s %s  worst %.6e  limit %.6e  (%s)\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.worst, r.limit, r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  if (!all_pass) throw PropertyError("one or more properties failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving pseudospectral solvers for a quantum "
               "fluid with stiff friction and its drift-diffusion limit"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string subcommand;
  for (const char* name : {"qnsp", "qdd", "sweep", "verify"}) {
    CLI::App* sub = app.add_subcommand(
        name, std::string("run mode '") + name + "'");
    sub->add_option("--config", opt.config_path, "path to a JSON config");
    sub->add_option("--out", opt.out_override, "output directory override");
    sub->add_option("--seed", opt.seed, "base seed for randomized ensembles");
    sub->add_flag("--sequential", opt.sequential,
                  "run sweep legs one at a time");
    sub->add_flag("--plots", opt.plots, "emit SVG plots");
    if (std::string(name) == "verify")
      sub->add_option("--fault", opt.fault,
                      "derivative corruption hook (nonzero must fail)")
          ->group("");
    sub->callback([&subcommand, name] { subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (subcommand == "qnsp") return run_qnsp(opt);
    if (subcommand == "qdd") return run_qdd(opt);
    if (subcommand == "sweep") return run_sweep(opt);
    if (subcommand == "verify") return run_verify(opt);
    std::fprintf(stderr, "error: no subcommand selected\n");
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const PropertyError& e) {
    std::fprintf(stderr, "property failure: %s\n", e.what());
    return 3;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 1;
  }
}

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "relaxation.hpp"

namespace qrelax {

namespace detail {

// Key order of the NDJSON series format; one DiagnosticsRecord per line.
// Order is part of the format: readers may rely on it, and diffs stay
// line-stable across runs.
struct SeriesKey {
  const char* name;
  double DiagnosticsRecord::* member;
};

inline const std::vector<SeriesKey>& series_keys() {
  static const std::vector<SeriesKey> keys = {
      {"t", &DiagnosticsRecord::t},
      {"mass", &DiagnosticsRecord::mass},
      {"energy", &DiagnosticsRecord::energy},
      {"aug_entropy", &DiagnosticsRecord::aug_entropy},
      {"fisher", &DiagnosticsRecord::fisher},
      {"pressure_energy", &DiagnosticsRecord::pressure_energy},
      {"potential_energy", &DiagnosticsRecord::potential_energy},
      {"kinetic", &DiagnosticsRecord::kinetic},
      {"free_energy", &DiagnosticsRecord::free_energy},
      {"diss_visc", &DiagnosticsRecord::diss_visc},
      {"diss_rot", &DiagnosticsRecord::diss_rot},
      {"diss_damp", &DiagnosticsRecord::diss_damp},
      {"diss_log", &DiagnosticsRecord::diss_log},
      {"diss_pressure", &DiagnosticsRecord::diss_pressure},
      {"diss_charge", &DiagnosticsRecord::diss_charge},
      {"qdd_diss", &DiagnosticsRecord::qdd_diss},
      {"fourth_order_lhs", &DiagnosticsRecord::fourth_order_lhs},
      {"fourth_order_rhs", &DiagnosticsRecord::fourth_order_rhs},
      {"cum_diss_visc", &DiagnosticsRecord::cum_diss_visc},
      {"cum_diss_rot", &DiagnosticsRecord::cum_diss_rot},
      {"cum_diss_damp", &DiagnosticsRecord::cum_diss_damp},
      {"cum_diss_log", &DiagnosticsRecord::cum_diss_log},
      {"cum_diss_pressure", &DiagnosticsRecord::cum_diss_pressure},
      {"cum_diss_charge", &DiagnosticsRecord::cum_diss_charge},
      {"cum_qdd_diss", &DiagnosticsRecord::cum_qdd_diss},
  };
  return keys;
}

}  // namespace detail

inline std::string record_to_line(const DiagnosticsRecord& rec) {
  nlohmann::ordered_json j;
  for (const auto& k : detail::series_keys()) j[k.name] = rec.*(k.member);
  return j.dump();
}

inline DiagnosticsRecord record_from_line(const std::string& line,
                                          const std::string& where) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("series: " + where + ": JSON parse error: " + e.what());
  }
  DiagnosticsRecord rec;
  for (const auto& k : detail::series_keys()) {
    if (!j.contains(k.name))
      throw ConfigError("series: " + where + ": missing key '" +
                        std::string(k.name) + "'");
    if (!j.at(k.name).is_number())
      throw ConfigError("series: " + where + ": key '" + std::string(k.name) +
                        "' is not a number");
    rec.*(k.member) = j.at(k.name).get<double>();
  }
  return rec;
}

inline void write_series(const std::vector<DiagnosticsRecord>& records,
                         const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("series: cannot open for writing: " + path);
  for (const DiagnosticsRecord& rec : records) os << record_to_line(rec) << '\n';
  if (!os) throw ConfigError("series: write failed: " + path);
}

inline std::vector<DiagnosticsRecord> read_series(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("series: cannot open: " + path);
  std::vector<DiagnosticsRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    out.push_back(
        record_from_line(line, path + ":" + std::to_string(lineno)));
  }
  return out;
}

namespace detail {

inline nlohmann::ordered_json bounds_to_json(const BoundsTable& bt) {
  nlohmann::ordered_json j;
  j["mass"] = bt.mass;
  j["rhou2"] = bt.rhou2;
  j["fisher"] = bt.fisher;
  j["pres"] = bt.pres;
  j["hessV"] = bt.hessV;
  j["damp_cum"] = bt.damp_cum;
  j["envelope"] = bt.envelope();
  return j;
}

}  // namespace detail

// Single structured document summarizing a sweep: the per-eps error norms,
// residuals, balance defects, and uniform-bound tables, plus the fitted
// convergence rate. Per-leg time series go to separate NDJSON files.
inline std::string sweep_report_to_json(const SweepReport& rep) {
  nlohmann::ordered_json root;
  root["preparation"] = rep.prep == Preparation::Well ? "well" : "ill";
  root["eps_list"] = rep.eps_list;
  root["fitted_rate"] = rep.fitted_rate;
  nlohmann::ordered_json legs = nlohmann::ordered_json::array();
  for (const SweepLeg& l : rep.legs) {
    nlohmann::ordered_json jl;
    jl["eps"] = l.eps;
    jl["err_rho"] = l.err_rho;
    jl["err_V"] = l.err_V;
    jl["err_lambda"] = l.err_lambda;
    jl["defect_energy"] = l.defect_energy;
    jl["defect_entropy"] = l.defect_entropy;
    jl["nsteps"] = l.run.nsteps;
    jl["dt"] = l.run.dt;
    jl["bounds"] = detail::bounds_to_json(l.bounds);
    legs.push_back(jl);
  }
  root["legs"] = legs;
  root["qdd_nsteps"] = rep.qdd.nsteps;
  root["qdd_dt"] = rep.qdd.dt;
  return root.dump(2) + "\n";
}

inline void write_sweep_report(const SweepReport& rep,
                               const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("sweep report: cannot open for writing: " + path);
  os << sweep_report_to_json(rep);
  if (!os) throw ConfigError("sweep report: write failed: " + path);
}

}  // namespace qrelax

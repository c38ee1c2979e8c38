#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "initial.hpp"

namespace qrelax {

// Parsed and validated run configuration. delta_floor is relative: the
// solver floor is delta_floor * max(rho0). record_every = 0 resolves to
// t_end / 25 when the run starts.
struct Config {
  std::string mode = "qnsp";  // qnsp | qdd | sweep | verify

  int dim = 1;
  int n = 128;
  double length = 1.0;

  double gamma = 2.0;
  double eps = 0.0;              // qnsp mode
  std::vector<double> eps_list;  // sweep mode
  double delta_floor = 1e-8;

  InitialSpec rho0;
  std::string u0 = "zero";  // zero | hilbert
  InitialSpec g;
  bool g_given = false;  // absent g defaults to the compatible constant

  double t_end = 0.02;
  double cfl = 0.4;
  double record_every = 0.0;

  std::string out_dir = "out";
  bool plots = false;
};

inline bool operator==(const InitialSpec& a, const InitialSpec& b) {
  return a.family == b.family && a.base == b.base &&
         a.amplitude == b.amplitude && a.wavenumber == b.wavenumber &&
         a.width == b.width && a.center == b.center && a.path == b.path;
}

inline bool operator==(const Config& a, const Config& b) {
  return a.mode == b.mode && a.dim == b.dim && a.n == b.n &&
         a.length == b.length && a.gamma == b.gamma && a.eps == b.eps &&
         a.eps_list == b.eps_list && a.delta_floor == b.delta_floor &&
         a.rho0 == b.rho0 && a.u0 == b.u0 && a.g == b.g &&
         a.g_given == b.g_given && a.t_end == b.t_end && a.cfl == b.cfl &&
         a.record_every == b.record_every && a.out_dir == b.out_dir &&
         a.plots == b.plots;
}

namespace detail {

using json = nlohmann::ordered_json;

[[noreturn]] inline void cfg_fail(const std::string& path,
                                  const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) cfg_fail(path.empty() ? it.key() : path + "." + it.key(),
                      "unknown field");
  }
}

inline double get_num(const json& obj, const std::string& path,
                      const char* key, double dflt, bool required = false) {
  if (!obj.contains(key)) {
    if (required) cfg_fail(path + "." + key, "required field is missing");
    return dflt;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) cfg_fail(path + "." + key, "expected a number");
  return v.get<double>();
}

inline int get_int(const json& obj, const std::string& path, const char* key,
                   int dflt, bool required = false) {
  if (!obj.contains(key)) {
    if (required) cfg_fail(path + "." + key, "required field is missing");
    return dflt;
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) cfg_fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

inline std::string get_str(const json& obj, const std::string& path,
                           const char* key, const std::string& dflt,
                           bool required = false) {
  if (!obj.contains(key)) {
    if (required) cfg_fail(path + "." + key, "required field is missing");
    return dflt;
  }
  const json& v = obj.at(key);
  if (!v.is_string()) cfg_fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline bool get_bool(const json& obj, const std::string& path, const char* key,
                     bool dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_boolean()) cfg_fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

inline InitialSpec parse_ic(const json& obj, const std::string& path) {
  if (!obj.is_object()) cfg_fail(path, "expected an object");
  InitialSpec ic;
  const std::string fam = get_str(obj, path, "family", "", true);
  if (fam == "constant") {
    ic.family = IcFamily::Constant;
    check_keys(obj, path, {"family", "base"});
  } else if (fam == "cosine-perturbation") {
    ic.family = IcFamily::CosinePerturbation;
    check_keys(obj, path, {"family", "base", "amplitude", "wavenumber"});
  } else if (fam == "gaussian-bump-periodicized") {
    ic.family = IcFamily::GaussianBump;
    check_keys(obj, path, {"family", "base", "amplitude", "width", "center"});
  } else if (fam == "checkpoint-load") {
    ic.family = IcFamily::CheckpointLoad;
    check_keys(obj, path, {"family", "path"});
  } else {
    cfg_fail(path + ".family",
             "unknown family '" + fam +
                 "' (expected constant, cosine-perturbation, "
                 "gaussian-bump-periodicized, or checkpoint-load)");
  }
  ic.base = get_num(obj, path, "base", ic.base);
  ic.amplitude = get_num(obj, path, "amplitude", ic.amplitude);
  ic.width = get_num(obj, path, "width", ic.width);
  ic.path = get_str(obj, path, "path", ic.path);
  if (obj.contains("wavenumber")) {
    const json& w = obj.at("wavenumber");
    if (!w.is_array() || w.size() < 1 || w.size() > 3)
      cfg_fail(path + ".wavenumber", "expected an array of 1 to 3 integers");
    ic.wavenumber = {0, 0, 0};
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!w[i].is_number_integer())
        cfg_fail(path + ".wavenumber", "expected integer entries");
      ic.wavenumber[i] = w[i].get<int>();
    }
  }
  if (obj.contains("center")) {
    const json& c = obj.at("center");
    if (!c.is_array() || c.size() < 1 || c.size() > 3)
      cfg_fail(path + ".center", "expected an array of 1 to 3 numbers");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i].is_number())
        cfg_fail(path + ".center", "expected numeric entries");
      ic.center[i] = c[i].get<double>();
    }
  }
  if (ic.family == IcFamily::CheckpointLoad && ic.path.empty())
    cfg_fail(path + ".path", "checkpoint-load requires a file path");
  return ic;
}

inline json ic_to_json(const InitialSpec& ic) {
  json j;
  j["family"] = to_string(ic.family);
  switch (ic.family) {
    case IcFamily::Constant:
      j["base"] = ic.base;
      break;
    case IcFamily::CosinePerturbation:
      j["base"] = ic.base;
      j["amplitude"] = ic.amplitude;
      j["wavenumber"] = ic.wavenumber;
      break;
    case IcFamily::GaussianBump:
      j["base"] = ic.base;
      j["amplitude"] = ic.amplitude;
      j["width"] = ic.width;
      j["center"] = ic.center;
      break;
    case IcFamily::CheckpointLoad:
      j["path"] = ic.path;
      break;
  }
  return j;
}

}  // namespace detail

inline void validate_config(const Config& c) {
  using detail::cfg_fail;
  if (c.mode != "qnsp" && c.mode != "qdd" && c.mode != "sweep" &&
      c.mode != "verify")
    cfg_fail("mode", "must be one of qnsp, qdd, sweep, verify (got '" +
                         c.mode + "')");
  make_grid(c.dim, c.n, c.length);  // reuses the grid preconditions
  if (!(c.gamma > 1.0))
    cfg_fail("physics.gamma",
             "gamma > 1 required by the pressure energy rho^gamma/(gamma-1)");
  if (!(c.delta_floor > 0.0))
    cfg_fail("physics.delta_floor", "must be positive");
  if (c.mode == "qnsp" && !(c.eps > 0.0))
    cfg_fail("physics.eps", "a positive eps is required for mode qnsp");
  if (c.mode == "sweep") {
    if (c.eps_list.size() < 2)
      cfg_fail("physics.eps_list",
               "a sweep needs at least two eps values");
    for (double e : c.eps_list)
      if (!(e > 0.0)) cfg_fail("physics.eps_list", "entries must be positive");
    for (std::size_t i = 0; i + 1 < c.eps_list.size(); ++i)
      if (!(c.eps_list[i + 1] < c.eps_list[i]))
        cfg_fail("physics.eps_list", "must be strictly decreasing");
  }
  if (c.mode != "verify") {
    if (!(c.t_end > 0.0)) cfg_fail("time.t_end", "must be positive");
    if (!(c.cfl > 0.0)) cfg_fail("time.cfl", "must be positive");
    if (c.record_every < 0.0)
      cfg_fail("time.record_every", "must be nonnegative (0 = default cadence)");
  }
  if (c.u0 != "zero" && c.u0 != "hilbert")
    cfg_fail("initial.u0", "must be 'zero' or 'hilbert' (got '" + c.u0 + "')");
  if (c.mode == "qdd" && c.u0 == "hilbert")
    cfg_fail("initial.u0", "hilbert preparation applies only to qnsp/sweep");
}

inline Config parse_config(const std::string& text) {
  using detail::cfg_fail;
  detail::json root;
  try {
    root = detail::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  detail::check_keys(root, "",
                     {"mode", "grid", "physics", "initial", "time", "output"});

  Config c;
  c.mode = detail::get_str(root, "", "mode", "", true);

  if (root.contains("grid")) {
    const auto& g = root.at("grid");
    if (!g.is_object()) cfg_fail("grid", "expected an object");
    detail::check_keys(g, "grid", {"dim", "n", "length"});
    c.dim = detail::get_int(g, "grid", "dim", c.dim);
    c.n = detail::get_int(g, "grid", "n", c.n);
    c.length = detail::get_num(g, "grid", "length", c.length);
  }
  if (root.contains("physics")) {
    const auto& p = root.at("physics");
    if (!p.is_object()) cfg_fail("physics", "expected an object");
    detail::check_keys(p, "physics",
                       {"gamma", "eps", "eps_list", "delta_floor"});
    c.gamma = detail::get_num(p, "physics", "gamma", c.gamma);
    c.eps = detail::get_num(p, "physics", "eps", c.eps);
    c.delta_floor = detail::get_num(p, "physics", "delta_floor", c.delta_floor);
    if (p.contains("eps_list")) {
      const auto& el = p.at("eps_list");
      if (!el.is_array()) cfg_fail("physics.eps_list", "expected an array");
      for (const auto& v : el) {
        if (!v.is_number())
          cfg_fail("physics.eps_list", "expected numeric entries");
        c.eps_list.push_back(v.get<double>());
      }
    }
  }
  if (root.contains("initial")) {
    const auto& ini = root.at("initial");
    if (!ini.is_object()) cfg_fail("initial", "expected an object");
    detail::check_keys(ini, "initial", {"rho0", "u0", "g"});
    if (ini.contains("rho0"))
      c.rho0 = detail::parse_ic(ini.at("rho0"), "initial.rho0");
    c.u0 = detail::get_str(ini, "initial", "u0", c.u0);
    if (ini.contains("g")) {
      c.g = detail::parse_ic(ini.at("g"), "initial.g");
      c.g_given = true;
    }
  }
  if (root.contains("time")) {
    const auto& t = root.at("time");
    if (!t.is_object()) cfg_fail("time", "expected an object");
    detail::check_keys(t, "time", {"t_end", "cfl", "record_every"});
    c.t_end = detail::get_num(t, "time", "t_end", c.t_end);
    c.cfl = detail::get_num(t, "time", "cfl", c.cfl);
    c.record_every = detail::get_num(t, "time", "record_every", c.record_every);
  }
  if (root.contains("output")) {
    const auto& o = root.at("output");
    if (!o.is_object()) cfg_fail("output", "expected an object");
    detail::check_keys(o, "output", {"dir", "plots"});
    c.out_dir = detail::get_str(o, "output", "dir", c.out_dir);
    c.plots = detail::get_bool(o, "output", "plots", c.plots);
  }
  validate_config(c);
  return c;
}

inline std::string serialize_config(const Config& c) {
  detail::json root;
  root["mode"] = c.mode;
  root["grid"] = {{"dim", c.dim}, {"n", c.n}, {"length", c.length}};
  detail::json phys;
  phys["gamma"] = c.gamma;
  if (c.eps > 0.0) phys["eps"] = c.eps;
  if (!c.eps_list.empty()) phys["eps_list"] = c.eps_list;
  phys["delta_floor"] = c.delta_floor;
  root["physics"] = phys;
  detail::json ini;
  ini["rho0"] = detail::ic_to_json(c.rho0);
  ini["u0"] = c.u0;
  if (c.g_given) ini["g"] = detail::ic_to_json(c.g);
  root["initial"] = ini;
  root["time"] = {{"t_end", c.t_end},
                  {"cfl", c.cfl},
                  {"record_every", c.record_every}};
  root["output"] = {{"dir", c.out_dir}, {"plots", c.plots}};
  return root.dump(2) + "\n";
}

}  // namespace qrelax

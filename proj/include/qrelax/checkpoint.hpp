#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "state.hpp"

namespace qrelax {

// Flat binary state checkpoint. Layout, little endian:
//   bytes 0..7   magic "QRLXCKPT"
//   u32          format version (1)
//   u32          dim
//   u64          n (points per axis)
//   f64          length, t, eps, gamma, delta
//   f64[npts]    rho
//   f64[dim*npts] m (component-major)
//   f64[npts]    V
//   f64[npts]    g
// Raw IEEE doubles make the round-trip bit-exact by construction.

namespace detail {

constexpr char kCkptMagic[8] = {'Q', 'R', 'L', 'X', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCkptVersion = 1;

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get(std::ifstream& is, T& v, const std::string& path) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is)
    throw ConfigError("checkpoint: truncated file: " + path);
}

inline void put_field(std::ofstream& os, const Field& f) {
  os.write(reinterpret_cast<const char*>(f.data()),
           static_cast<std::streamsize>(f.size() * sizeof(double)));
}

inline void get_field(std::ifstream& is, Field& f, std::size_t npts,
                      const std::string& path) {
  f.resize(npts);
  is.read(reinterpret_cast<char*>(f.data()),
          static_cast<std::streamsize>(npts * sizeof(double)));
  if (!is)
    throw ConfigError("checkpoint: truncated field data: " + path);
}

}  // namespace detail

inline void write_checkpoint(const std::string& path, const State& st) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw ConfigError("checkpoint: cannot open for writing: " + path);
  os.write(detail::kCkptMagic, sizeof(detail::kCkptMagic));
  detail::put(os, detail::kCkptVersion);
  detail::put(os, static_cast<std::uint32_t>(st.grid.dim));
  detail::put(os, static_cast<std::uint64_t>(st.grid.n));
  detail::put(os, st.grid.length);
  detail::put(os, st.t);
  detail::put(os, st.eps);
  detail::put(os, st.gamma);
  detail::put(os, st.delta);
  detail::put_field(os, st.rho);
  for (const Field& c : st.m) detail::put_field(os, c);
  detail::put_field(os, st.V);
  detail::put_field(os, st.g);
  if (!os)
    throw ConfigError("checkpoint: write failed: " + path);
}

inline State read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw ConfigError("checkpoint: cannot open: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, detail::kCkptMagic, sizeof(magic)) != 0)
    throw ConfigError("checkpoint: bad magic, not a checkpoint file: " + path);
  std::uint32_t version = 0, dim = 0;
  std::uint64_t n = 0;
  detail::get(is, version, path);
  if (version != detail::kCkptVersion)
    throw ConfigError("checkpoint: unsupported format version " +
                      std::to_string(version) + ": " + path);
  detail::get(is, dim, path);
  detail::get(is, n, path);
  State st;
  double length = 0.0;
  detail::get(is, length, path);
  detail::get(is, st.t, path);
  detail::get(is, st.eps, path);
  detail::get(is, st.gamma, path);
  detail::get(is, st.delta, path);
  st.grid = make_grid(static_cast<int>(dim), static_cast<int>(n), length);
  detail::get_field(is, st.rho, st.grid.npts, path);
  st.m.resize(st.grid.dim);
  for (Field& c : st.m) detail::get_field(is, c, st.grid.npts, path);
  detail::get_field(is, st.V, st.grid.npts, path);
  detail::get_field(is, st.g, st.grid.npts, path);
  return st;
}

}  // namespace qrelax

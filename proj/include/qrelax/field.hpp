#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "grid.hpp"

namespace qrelax {

// Scalar samples on a Grid, in the Grid's flat layout.
using Field = std::vector<double>;

// One Field per spatial axis (size = grid.dim).
using VecField = std::vector<Field>;

// dim*dim Fields in row-major order: component (a,b) at index a*dim + b.
using TensorField = std::vector<Field>;

inline Field zeros(const Grid& g) { return Field(g.npts, 0.0); }

inline VecField zeros_vec(const Grid& g) {
  return VecField(static_cast<std::size_t>(g.dim), Field(g.npts, 0.0));
}

inline VecField zeros_vec(int dim, std::size_t npts) {
  return VecField(static_cast<std::size_t>(dim), Field(npts, 0.0));
}

inline bool all_finite(const Field& f) {
  for (double v : f)
    if (!std::isfinite(v)) return false;
  return true;
}

inline bool all_finite(const VecField& v) {
  for (const Field& c : v)
    if (!all_finite(c)) return false;
  return true;
}

// y += c*x
inline void add_scaled(Field& y, const Field& x, double c) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

inline Field scaled(const Field& x, double c) {
  Field y(x);
  for (double& v : y) v *= c;
  return y;
}

// Pointwise max(f, floor); the floor is applied only inside divisions,
// square roots, and logarithms, never written back to an evolved density.
inline Field floored(const Field& f, double floor_value) {
  Field out(f);
  for (double& v : out) v = std::max(v, floor_value);
  return out;
}

inline double min_value(const Field& f) {
  double m = f.empty() ? 0.0 : f[0];
  for (double v : f) m = std::min(m, v);
  return m;
}

inline double max_value(const Field& f) {
  double m = f.empty() ? 0.0 : f[0];
  for (double v : f) m = std::max(m, v);
  return m;
}

}  // namespace qrelax

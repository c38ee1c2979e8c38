#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "grid.hpp"

namespace qrelax {
namespace fft {

// Process-wide FFTW plan cache keyed by (dim, n, sign).
//
// Plans are created once under a mutex with FFTW_ESTIMATE | FFTW_UNALIGNED
// and executed through the new-array interface, which FFTW guarantees to be
// thread-safe as long as no plan is created or destroyed concurrently.
// All plans are in-place complex-to-complex; executions must therefore pass
// the same pointer for input and output, which exec() does.
inline fftw_plan plan_for(int dim, int n, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(dim, n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::size_t npts = 1;
  for (int a = 0; a < dim; ++a) npts *= static_cast<std::size_t>(n);
  std::vector<std::complex<double>> scratch(npts);
  int dims[3] = {n, n, n};
  fftw_complex* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p =
      fftw_plan_dft(dim, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, p);
  return p;
}

// In-place unnormalized transform of a complex buffer laid out per Grid.
inline void exec(const Grid& g, std::complex<double>* buf, int sign) {
  fftw_plan p = plan_for(g.dim, g.n, sign);
  fftw_complex* b = reinterpret_cast<fftw_complex*>(buf);
  fftw_execute_dft(p, b, b);
}

inline void forward(const Grid& g, std::complex<double>* buf) {
  exec(g, buf, FFTW_FORWARD);
}

// Unnormalized inverse; callers divide by g.npts.
inline void backward(const Grid& g, std::complex<double>* buf) {
  exec(g, buf, FFTW_BACKWARD);
}

}  // namespace fft
}  // namespace qrelax

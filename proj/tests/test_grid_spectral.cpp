#include <catch2/catch_amalgamated.hpp>
#include <qrelax/qrelax.hpp>

#include <cmath>
#include <vector>

using namespace qrelax;

namespace {
constexpr double kPi = 3.14159265358979323846;

Field sampled(const Grid& g, double (*f)(double)) {
  Field out(g.npts);
  for (std::size_t i = 0; i < g.npts; ++i) out[i] = f(g.x(g.unravel(i)[0]));
  return out;
}
}  // namespace

TEST_CASE("grid construction and preconditions", "[grid]") {
  Grid g = make_grid(1, 64, 1.0);
  REQUIRE(g.dim == 1);
  REQUIRE(g.n == 64);
  REQUIRE(g.npts == 64);
  REQUIRE(g.dx == Catch::Approx(1.0 / 64.0));
  REQUIRE(g.measure() == Catch::Approx(1.0));

  Grid g3 = make_grid(3, 16, 2.0);
  REQUIRE(g3.npts == 16u * 16u * 16u);
  REQUIRE(g3.measure() == Catch::Approx(8.0));

  SECTION("signed frequencies cover -n/2+1 .. n/2") {
    Grid h = make_grid(1, 8, 1.0);
    std::vector<int> fs;
    for (int j = 0; j < 8; ++j) fs.push_back(h.freq(j));
    REQUIRE(fs == std::vector<int>{0, 1, 2, 3, 4, -3, -2, -1});
  }

  SECTION("unravel inverts the x-fastest layout") {
    Grid h = make_grid(2, 8, 1.0);
    auto idx = h.unravel(3 + 8 * 5);
    REQUIRE(idx[0] == 3);
    REQUIRE(idx[1] == 5);
  }

  SECTION("invalid parameters are rejected") {
    REQUIRE_THROWS_AS(make_grid(0, 64, 1.0), ConfigError);
    REQUIRE_THROWS_AS(make_grid(4, 64, 1.0), ConfigError);
    REQUIRE_THROWS_AS(make_grid(1, 64, -1.0), ConfigError);
    REQUIRE_THROWS_AS(make_grid(1, 7, 1.0), ConfigError);  // odd n
    REQUIRE_THROWS_AS(make_grid(1, 2, 1.0), ConfigError);  // too small
  }
}

TEST_CASE("derivatives of trigonometric modes are exact", "[spectral]") {
  Grid g = make_grid(1, 64, 1.0);
  Spectral sp(g);
  const double w = 2.0 * kPi;

  Field f = sampled(g, [](double x) { return std::sin(2.0 * kPi * x); });
  Field df = sp.deriv(f, {1, 0, 0});
  Field d2f = sp.deriv(f, {2, 0, 0});
  for (std::size_t i = 0; i < g.npts; ++i) {
    const double x = g.x(g.unravel(i)[0]);
    REQUIRE(df[i] == Catch::Approx(w * std::cos(w * x)).margin(1e-11));
    REQUIRE(d2f[i] == Catch::Approx(-w * w * std::sin(w * x)).margin(1e-9));
  }

  SECTION("laplacian matches second derivative in 1D") {
    Field lap = sp.lap(f);
    for (std::size_t i = 0; i < g.npts; ++i)
      REQUIRE(lap[i] == Catch::Approx(d2f[i]).margin(1e-10));
  }

  SECTION("gradient and hessian in 2D") {
    Grid g2 = make_grid(2, 32, 1.0);
    Spectral sp2(g2);
    Field u(g2.npts);
    for (std::size_t i = 0; i < g2.npts; ++i) {
      auto id = g2.unravel(i);
      u[i] = std::sin(w * g2.x(id[0])) * std::cos(w * g2.x(id[1]));
    }
    VecField gu = sp2.grad(u);
    TensorField Hu = sp2.hess(u);
    for (std::size_t i = 0; i < g2.npts; ++i) {
      auto id = g2.unravel(i);
      const double x = g2.x(id[0]), y = g2.x(id[1]);
      REQUIRE(gu[0][i] ==
              Catch::Approx(w * std::cos(w * x) * std::cos(w * y)).margin(1e-10));
      REQUIRE(gu[1][i] ==
              Catch::Approx(-w * std::sin(w * x) * std::sin(w * y)).margin(1e-10));
      // mixed partial, symmetric slot
      REQUIRE(Hu[1][i] == Catch::Approx(-w * w * std::cos(w * x) *
                                        std::sin(w * y)).margin(1e-8));
      REQUIRE(Hu[1][i] == Catch::Approx(Hu[2][i]).margin(1e-12));
    }
  }
}

TEST_CASE("integration and norms reproduce closed forms", "[spectral]") {
  Grid g = make_grid(1, 128, 1.0);
  Spectral sp(g);
  Field f = sampled(g, [](double x) { return std::sin(2.0 * kPi * x); });

  // int sin^2 = 1/2 over one period
  Field f2(f);
  for (std::size_t i = 0; i < f2.size(); ++i) f2[i] *= f[i];
  REQUIRE(sp.integrate(f2) == Catch::Approx(0.5).margin(1e-13));
  REQUIRE(sp.integrate(f) == Catch::Approx(0.0).margin(1e-13));

  // ||sin||_L2 = sqrt(1/2); H1 and H2 add derivative energies
  const double l2 = std::sqrt(0.5);
  const double h1 = std::sqrt(0.5 + 2.0 * kPi * kPi);
  const double w = 2.0 * kPi;
  const double h2 = std::sqrt(0.5 * (1.0 + w * w + w * w * w * w));
  REQUIRE(sp.l2(f) == Catch::Approx(l2).margin(1e-12));
  REQUIRE(sp.h1(f) == Catch::Approx(h1).margin(1e-10));
  REQUIRE(sp.h2(f) == Catch::Approx(h2).margin(1e-8));

  SECTION("H^-1 norm of a single mode divides by sqrt(1+|k|^2)") {
    VecField v(1, f);
    const double expect = l2 / std::sqrt(1.0 + w * w);
    REQUIRE(sp.hminus1_vec(v) == Catch::Approx(expect).margin(1e-12));
  }
}

TEST_CASE("dealiasing is an idempotent band projection", "[spectral]") {
  Grid g = make_grid(1, 96, 1.0);
  Spectral sp(g);
  Field f = field_nd(7, 1, 96);

  Field once = sp.dealias(f);
  Field twice = sp.dealias(once);
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    diff += (twice[i] - once[i]) * (twice[i] - once[i]);
    ref += once[i] * once[i];
  }
  REQUIRE(std::sqrt(diff / ref) < 1e-14);

  SECTION("kept band is untouched, cut band is annihilated") {
    // jcut = floor(96/3) = 32; mode 32 survives, mode 33 dies
    Field keep(g.npts), cut(g.npts);
    for (std::size_t i = 0; i < g.npts; ++i) {
      const double x = g.x(g.unravel(i)[0]);
      keep[i] = std::cos(2.0 * kPi * 32.0 * x);
      cut[i] = std::cos(2.0 * kPi * 33.0 * x);
    }
    Field dk = sp.dealias(keep), dc = sp.dealias(cut);
    for (std::size_t i = 0; i < g.npts; ++i) {
      REQUIRE(dk[i] == Catch::Approx(keep[i]).margin(1e-12));
      REQUIRE(dc[i] == Catch::Approx(0.0).margin(1e-12));
    }
  }
}

TEST_CASE("discrete integration by parts holds to roundoff", "[spectral][property]") {
  for (int dim : {1, 2}) {
    const int n = (dim == 1) ? 64 : 24;
    Grid g = make_grid(dim, n, 1.0);
    Spectral sp(g);
    for (std::uint64_t seed = 40; seed < 45; ++seed) {
      Field f = field_nd(seed, dim, n);
      Field h = field_nd(seed + 1000, dim, n);
      for (int a = 0; a < dim; ++a) {
        std::array<int, 3> ord{0, 0, 0};
        ord[static_cast<std::size_t>(a)] = 1;
        Field fa = sp.deriv(f, ord);
        Field ha = sp.deriv(h, ord);
        Field prod(g.npts);
        for (std::size_t i = 0; i < g.npts; ++i)
          prod[i] = fa[i] * h[i] + f[i] * ha[i];
        REQUIRE(std::abs(sp.integrate(prod)) < 1e-10);
      }
      // divergence of any gradient integrates to zero
      REQUIRE(std::abs(sp.integrate(sp.div(sp.grad(f)))) < 1e-8);
    }
  }
}

TEST_CASE("symbol corruption hook breaks integration by parts", "[spectral][fault]") {
  Grid g = make_grid(1, 64, 1.0);
  Spectral clean(g);
  Spectral broken(g, 1e-6);
  Field f = field_nd(99, 1, 64);
  Field h = field_nd(1099, 1, 64);

  auto pairing = [&](const Spectral& sp) {
    Field fa = sp.deriv(f, {1, 0, 0});
    Field ha = sp.deriv(h, {1, 0, 0});
    Field prod(g.npts);
    for (std::size_t i = 0; i < g.npts; ++i)
      prod[i] = fa[i] * h[i] + f[i] * ha[i];
    return std::abs(sp.integrate(prod));
  };

  REQUIRE(pairing(clean) < 1e-12);
  REQUIRE(pairing(broken) > 1e-9);
}

TEST_CASE("interpolation bound between L2, H1, H2", "[spectral][property]") {
  Grid g = make_grid(1, 128, 1.0);
  Spectral sp(g);
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    Field f = field_nd(seed, 1, 128);
    const double lhs = sp.h1(f);
    const double rhs = std::sqrt(sp.l2(f) * sp.h2(f));
    REQUIRE(lhs <= rhs * (1.0 + 1e-12));
  }

  SECTION("a pure mode exceeds the bound under additive norms") {
    // With the additive convention ||f||_{H2}^2 = ||f||^2 + ||f'||^2 + ||f''||^2
    // a single shell |k| = w gives lhs/rhs = sqrt((1+w^2)/sqrt(1+w^2+w^4)) > 1,
    // about 1.0061 at w = 2*pi. The bound therefore needs spectral spread,
    // which the seeded ensemble above has; this pins the convention so a
    // change in the norm definitions shows up here first.
    Field f = sampled(g, [](double x) { return std::sin(2.0 * kPi * x); });
    const double lhs = sp.h1(f);
    const double rhs = std::sqrt(sp.l2(f) * sp.h2(f));
    const double w2 = 4.0 * kPi * kPi;
    const double expected =
        std::sqrt((1.0 + w2) / std::sqrt(1.0 + w2 + w2 * w2));
    REQUIRE(lhs / rhs == Catch::Approx(expected).epsilon(1e-10));
    REQUIRE(lhs / rhs > 1.0);
  }
}

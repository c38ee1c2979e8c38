#include <catch2/catch_amalgamated.hpp>
#include <qrelax/qrelax.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace qrelax;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Config sample_qnsp() {
  Config c;
  c.mode = "qnsp";
  c.dim = 1;
  c.n = 64;
  c.length = 2.0;
  c.gamma = 1.8;
  c.eps = 0.25;
  c.delta_floor = 1e-7;
  c.rho0.family = IcFamily::CosinePerturbation;
  c.rho0.base = 1.0;
  c.rho0.amplitude = 0.3;
  c.rho0.wavenumber = {2, 0, 0};
  c.u0 = "hilbert";
  c.t_end = 0.01;
  c.cfl = 0.3;
  c.record_every = 0.002;
  c.out_dir = "somewhere";
  c.plots = true;
  return c;
}

}  // namespace

TEST_CASE("config serialization round-trips exactly", "[config]") {
  SECTION("fluid run with every field set") {
    Config c = sample_qnsp();
    Config d = parse_config(serialize_config(c));
    REQUIRE(d == c);
  }

  SECTION("diffusion run with a gaussian profile and explicit background") {
    Config c;
    c.mode = "qdd";
    c.n = 128;
    c.rho0.family = IcFamily::GaussianBump;
    c.rho0.base = 0.8;
    c.rho0.amplitude = 0.5;
    c.rho0.width = 0.07;
    c.rho0.center = {0.25, 0.5, 0.5};
    c.g.family = IcFamily::Constant;
    c.g.base = 1.0;
    c.g_given = true;
    Config d = parse_config(serialize_config(c));
    REQUIRE(d == c);
  }

  SECTION("sweep with an eps ladder") {
    Config c;
    c.mode = "sweep";
    c.eps_list = {0.4, 0.2, 0.1, 0.05};
    c.rho0.family = IcFamily::CosinePerturbation;
    c.rho0.amplitude = 0.3;
    c.t_end = 0.05;
    Config d = parse_config(serialize_config(c));
    REQUIRE(d == c);
  }

  SECTION("restart from a stored state") {
    Config c;
    c.mode = "qnsp";
    c.eps = 0.1;
    c.rho0.family = IcFamily::CheckpointLoad;
    c.rho0.path = "runs/final.ckpt";
    Config d = parse_config(serialize_config(c));
    REQUIRE(d == c);
  }
}

TEST_CASE("config validation speaks in field paths", "[config]") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_config(text);
      FAIL("expected a ConfigError for: " << text);
    } catch (const ConfigError& e) {
      REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect_error(R"({"mode":"qnsp","physics":{"eps":0.2,"gamma":1.0}})",
               "physics.gamma");
  expect_error(R"({"mode":"qnsp"})", "physics.eps");
  expect_error(R"({"mode":"sweep","physics":{"eps_list":[0.1,0.4]}})",
               "strictly decreasing");
  expect_error(R"({"mode":"sweep","physics":{"eps_list":[0.4]}})",
               "at least two");
  expect_error(R"({"mode":"nope"})", "mode");
  expect_error(R"({"mode":"qdd","grid":{"n":63}})", "");
  expect_error(R"({"mode":"qdd","grid":{"dims":1}})", "grid.dims");
  expect_error(R"({"mode":"qdd","banana":1})", "banana");
  expect_error(
      R"({"mode":"qdd","initial":{"rho0":{"family":"constant","width":0.1}}})",
      "width");
  expect_error(R"({"mode":"qdd","time":{"t_end":-1}})", "time.t_end");
  expect_error(R"(not json)", "parse error");
}

TEST_CASE("minimal config fills documented defaults", "[config]") {
  Config c = parse_config(R"({"mode":"qdd"})");
  REQUIRE(c.dim == 1);
  REQUIRE(c.n == 128);
  REQUIRE(c.length == 1.0);
  REQUIRE(c.gamma == 2.0);
  REQUIRE(c.delta_floor == 1e-8);
  REQUIRE(c.u0 == "zero");
  REQUIRE_FALSE(c.g_given);
  REQUIRE(c.t_end == 0.02);
  REQUIRE(c.cfl == 0.4);
  REQUIRE(c.record_every == 0.0);
  REQUIRE(c.out_dir == "out");
  REQUIRE_FALSE(c.plots);
  REQUIRE(c.rho0.family == IcFamily::Constant);
}

TEST_CASE("diagnostics series round-trips bit-exactly", "[series]") {
  std::vector<DiagnosticsRecord> recs(3);
  for (int i = 0; i < 3; ++i) {
    DiagnosticsRecord& r = recs[static_cast<std::size_t>(i)];
    r.t = 0.1 * i + 1e-17;  // exercise shortest-representation printing
    r.mass = 1.0 / 3.0;
    r.energy = std::sqrt(2.0) * (i + 1);
    r.cum_diss_damp = 1e-300;  // denormal-adjacent magnitude survives
    r.fourth_order_rhs = 12345.6789e77;
  }
  const std::string path = tmp_path("qrelax_series_test.ndjson");
  write_series(recs, path);
  std::vector<DiagnosticsRecord> back = read_series(path);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    REQUIRE(back[i].t == recs[i].t);
    REQUIRE(back[i].mass == recs[i].mass);
    REQUIRE(back[i].energy == recs[i].energy);
    REQUIRE(back[i].cum_diss_damp == recs[i].cum_diss_damp);
    REQUIRE(back[i].fourth_order_rhs == recs[i].fourth_order_rhs);
  }
  std::remove(path.c_str());
}

TEST_CASE("a long series survives with ordering intact", "[series]") {
  std::vector<DiagnosticsRecord> recs(1000);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].t = 1e-4 * static_cast<double>(i);
    recs[i].mass = 1.0;
  }
  const std::string path = tmp_path("qrelax_series_long.ndjson");
  write_series(recs, path);
  std::vector<DiagnosticsRecord> back = read_series(path);
  REQUIRE(back.size() == 1000);
  for (std::size_t i = 1; i < back.size(); ++i)
    REQUIRE(back[i].t > back[i - 1].t);
  std::remove(path.c_str());
}

TEST_CASE("series reader reports the offending line", "[series]") {
  const std::string path = tmp_path("qrelax_series_bad.ndjson");
  {
    std::ofstream os(path);
    os << record_to_line(DiagnosticsRecord{}) << "\n";
    os << "{\"t\": 1.0}\n";  // missing every other key
  }
  try {
    read_series(path);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find(":2") != std::string::npos);
  }

  {
    std::ofstream os(path);
    os << "{\"t\": \"zero\"}\n";
  }
  REQUIRE_THROWS_AS(read_series(path), ConfigError);

  {
    std::ofstream os(path);  // truncate to empty
  }
  REQUIRE(read_series(path).empty());
  std::remove(path.c_str());
}

TEST_CASE("checkpoint round-trips the full state bit-exactly",
          "[checkpoint]") {
  Grid g = make_grid(2, 16, 1.5);
  Spectral sp(g);
  State st;
  st.grid = g;
  st.t = 0.375;
  st.eps = 0.2;
  st.gamma = 1.9;
  st.delta = 3e-8;
  st.rho = field_nd(17, 2, 16);
  st.m = VecField(2, Field(g.npts));
  for (int a = 0; a < 2; ++a) st.m[static_cast<std::size_t>(a)] =
      field_nd(18 + static_cast<std::uint64_t>(a), 2, 16);
  st.g = Field(g.npts, sp.integrate(st.rho) / g.measure());
  st.V = solve_poisson(sp, st.rho, st.g);

  const std::string path = tmp_path("qrelax_ckpt_test.bin");
  write_checkpoint(path, st);
  State back = read_checkpoint(path);

  REQUIRE(back.grid == g);
  REQUIRE(back.t == st.t);
  REQUIRE(back.eps == st.eps);
  REQUIRE(back.gamma == st.gamma);
  REQUIRE(back.delta == st.delta);
  REQUIRE(back.rho == st.rho);
  REQUIRE(back.m == st.m);
  REQUIRE(back.V == st.V);
  REQUIRE(back.g == st.g);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint reader rejects damaged files", "[checkpoint]") {
  const std::string path = tmp_path("qrelax_ckpt_bad.bin");

  SECTION("missing file") {
    REQUIRE_THROWS_AS(read_checkpoint(tmp_path("does_not_exist.bin")),
                      ConfigError);
  }
  SECTION("wrong magic") {
    std::ofstream os(path, std::ios::binary);
    os << "NOTACKPTxxxxxxxxxxxxxxxxxxxxxxxxxxxx";
    os.close();
    REQUIRE_THROWS_AS(read_checkpoint(path), ConfigError);
    std::remove(path.c_str());
  }
  SECTION("truncated payload") {
    Grid g = make_grid(1, 32, 1.0);
    State st;
    st.grid = g;
    st.rho = Field(g.npts, 1.0);
    st.m = zeros_vec(1, g.npts);
    st.V = Field(g.npts, 0.0);
    st.g = Field(g.npts, 1.0);
    write_checkpoint(path, st);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
    REQUIRE_THROWS_AS(read_checkpoint(path), ConfigError);
    std::remove(path.c_str());
  }
}

TEST_CASE("plots flag problems instead of failing a run", "[plot]") {
  const std::string path = tmp_path("qrelax_plot_test.svg");

  SECTION("empty series is a warning, not an error") {
    PlotResult pr;
    plot_series({}, path, pr);
    REQUIRE_FALSE(pr.warnings.empty());
    REQUIRE(pr.errors.empty());
    REQUIRE(pr.files.empty());
  }

  SECTION("nonfinite values are reported and the file is skipped") {
    std::vector<DiagnosticsRecord> recs(3);
    for (std::size_t i = 0; i < 3; ++i) {
      recs[i].t = 0.1 * static_cast<double>(i);
      recs[i].energy = 1.0;
      recs[i].aug_entropy = 1.0;
    }
    recs[1].energy = std::nan("");
    PlotResult pr;
    plot_series(recs, path, pr);
    REQUIRE_FALSE(pr.errors.empty());
    REQUIRE(pr.files.empty());
  }

  SECTION("a healthy series writes one marked-up file") {
    std::vector<DiagnosticsRecord> recs(5);
    for (std::size_t i = 0; i < 5; ++i) {
      recs[i].t = 0.1 * static_cast<double>(i);
      recs[i].energy = 1.0 + 0.01 * static_cast<double>(i);
      recs[i].aug_entropy = 0.5;
    }
    PlotResult pr;
    plot_series(recs, path, pr);
    REQUIRE(pr.errors.empty());
    REQUIRE(pr.files.size() == 1);
    std::ifstream is(path);
    std::string svg((std::istreambuf_iterator<char>(is)),
                    std::istreambuf_iterator<char>());
    REQUIRE(svg.find("<svg") != std::string::npos);
    REQUIRE(svg.find("polyline") != std::string::npos);
    std::remove(path.c_str());
  }
}

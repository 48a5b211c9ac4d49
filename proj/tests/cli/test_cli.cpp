#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "commands.hpp"
#include "config.hpp"
#include "io.hpp"

namespace fs = std::filesystem;
using namespace dampwave;
using namespace dampwave::cli;

namespace {

fs::path scratch(const std::string& name) {
  static std::atomic<int> counter{0};
  const fs::path p = fs::temp_directory_path() /
                     ("dampwave_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const Json& j, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) { return read_text(p); }

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

template <class F>
Run run(F&& f, unsigned threads = 1, std::optional<fs::path> out_dir = std::nullopt) {
  std::ostringstream o, e;
  CommandContext ctx{o, e, threads, out_dir};
  Run r;
  r.code = f(ctx);
  r.out = o.str();
  r.err = e.str();
  return r;
}

Json constant_config(double w0) {
  Json j = Json::parse(R"({
    "scenario": "c", "seed": 0,
    "geometry": {"dim": 1, "n": 16},
    "damping": {"type": "constant", "w0": 0.2},
    "initial_data": {"type": "single_mode", "k": [1], "amplitude": 1.0, "phase": 0.0, "velocity_amplitude": 0.0},
    "time": {"dt": 0.01, "t_end": 30.0, "record_every": 1},
    "gcc": {"T_values": [5, 10], "alpha_count": 1, "n_pos": 4, "n_dir": 2, "dt_quad": 0.05},
    "analysis": {"window_T": 10, "expect_decay": true, "dissipation_rel_tol": 1e-4}
  })");
  j["damping"]["w0"] = w0;
  return j;
}

Json traveling_config(double speed) {
  Json j = Json::parse(R"({
    "scenario": "tb", "seed": 0,
    "geometry": {"dim": 1, "n": 512},
    "damping": {"type": "traveling_bump", "center": 0.0, "width": 1.0, "amplitude": 2.0, "speed": 1.0},
    "initial_data": {"type": "traveling_packet", "center": [3.141592653589793], "width": 1.5, "direction": [1.0]},
    "time": {"dt": 0.02, "t_end": 100.0, "record_every": 1},
    "gcc": {"T_values": [10, 20, 40], "alpha_count": 4, "n_pos": 32, "n_dir": 2, "dt_quad": 0.05},
    "analysis": {"window_T": 40, "alpha_count": 4, "expect_decay": "auto", "dissipation_rel_tol": 1e-3,
                 "observability_seeds": [1, 2], "observability_decay": 3.0}
  })");
  j["damping"]["speed"] = speed;
  return j;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto c = line.find(',', start);
      cols.push_back(line.substr(start, c == std::string::npos ? std::string::npos : c - start));
      if (c == std::string::npos) break;
      start = c + 1;
    }
    rows.push_back(cols);
  }
  return rows;
}

Json without_wall_time(Json j) {
  j.erase("wall_time_s");
  return j;
}

}  // namespace

TEST_CASE("config: shipped scenarios round-trip") {
  for (const auto& entry : fs::directory_iterator(fs::path(DAMPWAVE_SOURCE_DIR) / "scenarios")) {
    CAPTURE(entry.path().string());
    const auto c = load_config(entry.path());
    const Json once = to_json(c);
    const Json twice = to_json(parse_config(once));
    CHECK(once == twice);
  }
}

TEST_CASE("config: strict validation names the key") {
  auto expect_key = [](Json j, const std::string& key) {
    try {
      (void)parse_config(j);
      FAIL("expected ConfigError for " << key);
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
      CHECK(std::string(e.what()).find(key) != std::string::npos);
    }
  };
  Json j = constant_config(0.2);
  j["geometry"]["bogus"] = 1;
  expect_key(j, "geometry.bogus");

  j = constant_config(0.2);
  j["time"]["dt"] = 0.0;
  expect_key(j, "time.dt");

  j = constant_config(0.2);
  j["damping"].erase("w0");
  expect_key(j, "damping.w0");

  j = constant_config(0.2);
  j["geometry"]["n"] = 24;
  expect_key(j, "geometry.n");

  j = constant_config(0.2);
  j["initial_data"]["k"] = Json::array({8});
  expect_key(j, "initial_data.k");

  j = constant_config(0.2);
  j["damping"]["w0"] = -1.0;
  expect_key(j, "damping");

  j = constant_config(0.2);
  j["analysis"]["expect_decay"] = "maybe";
  expect_key(j, "analysis.expect_decay");

  j = constant_config(0.2);
  j["extra"] = true;
  expect_key(j, "extra");

  CHECK_THROWS_AS(with_override(constant_config(0.2), "damping.speed", 1.0), ConfigError);
  CHECK(with_override(constant_config(0.2), "damping.w0", 0.5)["damping"]["w0"] == 0.5);
}

TEST_CASE("simulate: free waves, determinism, errors") {
  const auto dir = scratch("simulate");
  Json j = constant_config(0.0);
  j["initial_data"] = Json::parse(R"({"type": "random_sobolev", "decay": 2.0})");
  j["geometry"]["n"] = 64;
  const auto cfg = write_config(dir, j);

  const auto a = run([&](auto& ctx) { return cmd_simulate(cfg, ctx); }, 1, dir / "a");
  const auto b = run([&](auto& ctx) { return cmd_simulate(cfg, ctx); }, 1, dir / "b");
  REQUIRE(a.code == kOk);
  REQUIRE(b.code == kOk);
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));

  const auto tr = parse_trace_csv(slurp(dir / "a" / "trace.csv"));
  for (double e : tr.energy) CHECK(std::abs(e - tr.energy[0]) <= 1e-10 * tr.energy[0]);

  const auto m1 = Json::parse(slurp(dir / "a" / "manifest.json"));
  const auto m2 = Json::parse(slurp(dir / "b" / "manifest.json"));
  CHECK(without_wall_time(m1) == without_wall_time(m2));
  CHECK(m1["config_sha256"].get<std::string>().size() == 64);

  j["time"]["dt"] = -0.1;
  const auto bad = write_config(dir, j, "bad.json");
  const auto r = run([&](auto& ctx) { return cmd_simulate(bad, ctx); }, 1, dir / "c");
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("dt") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "c"));

  const auto missing = run([&](auto& ctx) { return cmd_simulate(dir / "nope.json", ctx); });
  CHECK(missing.code == kIoError);

  std::ofstream(dir / "file") << "x";
  const auto unwritable = run([&](auto& ctx) { return cmd_simulate(cfg, ctx); }, 1, dir / "file" / "sub");
  CHECK(unwritable.code == kIoError);

  std::ofstream(dir / "garbage.json") << "{ not json";
  CHECK(run([&](auto& ctx) { return cmd_simulate(dir / "garbage.json", ctx); }).code == kConfigError);
}

TEST_CASE("simulate: blowup exits 3") {
  const auto dir = scratch("blowup");
  Json j = constant_config(0.0);
  j["geometry"]["n"] = 32;
  j["initial_data"]["k"] = Json::array({10});
  j["initial_data"]["amplitude"] = 1e308;
  const auto r = run([&](auto& ctx) { return cmd_simulate(write_config(dir, j), ctx); }, 1, dir / "out");
  CHECK(r.code == kBlowup);
}

TEST_CASE("simulate: snapshots carry a JSON header") {
  const auto dir = scratch("snap");
  Json j = constant_config(0.2);
  j["output"] = Json{{"snapshot_every", 1000}};
  const auto r = run([&](auto& ctx) { return cmd_simulate(write_config(dir, j), ctx); }, 1, dir / "out");
  REQUIRE(r.code == kOk);
  const auto snap = slurp(dir / "out" / "snapshots" / "snapshot_001000.csv");
  const auto header = Json::parse(snap.substr(2, snap.find('\n') - 2));
  CHECK(header["t"].get<double>() == doctest::Approx(10.0));
  CHECK(header["n"] == 16);
  CHECK(fs::exists(dir / "out" / "snapshots" / "snapshot_003000.csv"));
}

TEST_CASE("gcc command") {
  const auto dir = scratch("gcc");
  Json c = constant_config(0.3);
  REQUIRE(run([&](auto& ctx) { return cmd_gcc(write_config(dir, c, "c.json"), ctx); }, 1, dir / "c").code == kOk);
  const auto rows = read_csv(dir / "c" / "min_average_vs_T.csv");
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) == doctest::Approx(0.3).epsilon(1e-12));

  const auto v1 = run([&](auto& ctx) { return cmd_gcc(write_config(dir, traveling_config(1.0), "v1.json"), ctx); }, 2,
                      dir / "v1");
  REQUIRE(v1.code == kOk);
  CHECK(v1.out.find("t-GCC violated") != std::string::npos);
  const auto rep = Json::parse(slurp(dir / "v1" / "gcc_report.json"));
  CHECK(rep["status"] == "t-GCC violated");
  CHECK(rep["witness"]["average"].get<double>() < 1e-6);
  for (const auto& w : rep["argmin"]) CHECK(w["average"].get<double>() < 1e-6);

  Json half = traveling_config(0.5);
  half["gcc"]["T_values"] = Json::array({50, 100, 200, 400});
  REQUIRE(run([&](auto& ctx) { return cmd_gcc(write_config(dir, half, "v05.json"), ctx); }, 1, dir / "v05").code == kOk);
  const auto rep2 = Json::parse(slurp(dir / "v05" / "gcc_report.json"));
  const double mean = 2.0 * 1.2069003224378765 / (2.0 * std::numbers::pi);
  CHECK(std::abs(rep2["estimated_C"].get<double>() - mean) <= 0.05 * mean);
  CHECK(rep2["violated"] == false);

  Json none = constant_config(0.3);
  none.erase("gcc");
  const auto r = run([&](auto& ctx) { return cmd_gcc(write_config(dir, none, "n.json"), ctx); }, 1, dir / "n");
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("gcc") != std::string::npos);
}

TEST_CASE("verify command") {
  const auto dir = scratch("verify");
  const auto ok = run([&](auto& ctx) { return cmd_verify(write_config(dir, constant_config(0.2), "c.json"), ctx); }, 1,
                      dir / "c");
  CHECK(ok.code == kOk);
  int pass_lines = 0;
  std::istringstream lines(ok.out);
  for (std::string l; std::getline(lines, l);) pass_lines += l.rfind("PASS ", 0) == 0;
  CHECK(pass_lines == 5);
  const auto report = Json::parse(slurp(dir / "c" / "report.json"));
  for (const char* key : {"scenario", "B1", "B2_empirical", "C_p", "T", "epsilon_star", "predicted_factor",
                          "measured_factors", "fitted_rate", "r_squared", "prop22_margins", "dissipation_residuals"}) {
    CHECK(report.contains(key));
  }
  CHECK(report["B2_empirical"].get<double>() == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(report["B1"] == 3.0);
  CHECK(report["C_p"] == 1.0);

  const auto nongcc = run([&](auto& ctx) { return cmd_verify(write_config(dir, traveling_config(1.0), "v1.json"), ctx); },
                          1, dir / "v1");
  CHECK(nongcc.code == kOk);
  const auto r1 = Json::parse(slurp(dir / "v1" / "report.json"));
  CHECK(r1["expect_decay"] == false);
  CHECK(r1["B2_empirical"] == "inf");
  CHECK(r1["epsilon_star"].is_null());

  Json wrong = constant_config(0.2);
  wrong["analysis"]["expect_decay"] = false;
  const auto fail = run([&](auto& ctx) { return cmd_verify(write_config(dir, wrong, "w.json"), ctx); }, 1, dir / "w");
  CHECK(fail.code == kVerifyFailed);
  CHECK(fail.out.find("FAIL ") != std::string::npos);

  std::ofstream(dir / "corrupt.json") << R"({"scenario": "x", "seed": 0, "geometry": )";
  const auto corrupt = run([&](auto& ctx) { return cmd_verify(dir / "corrupt.json", ctx); }, 1, dir / "corrupt");
  CHECK(corrupt.code == kConfigError);
  CHECK_FALSE(fs::exists(dir / "corrupt"));
}

TEST_CASE("plot command") {
  const auto dir = scratch("plot");
  EnergyTrace tr;
  for (int i = 0; i <= 300; ++i) {
    const double t = 0.1 * i;
    tr.append(t, 5.0 * std::exp(-0.3 * t), 0.0, 1.0, 0.0, 1.0);
  }
  write_text(dir / "trace.csv", trace_csv(tr));
  REQUIRE(run([&](auto& ctx) { return cmd_plot(dir / "trace.csv", dir / "a.svg", ctx); }).code == kOk);
  REQUIRE(run([&](auto& ctx) { return cmd_plot(dir / "trace.csv", dir / "b.svg", ctx); }).code == kOk);
  const auto svg = slurp(dir / "a.svg");
  CHECK(svg == slurp(dir / "b.svg"));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("id=\"fitted-line\"") != std::string::npos);
  CHECK(svg.find("c = 0.3,") != std::string::npos);

  write_text(dir / "empty.csv", "t,E,D,ut_sq,mean_abs,poincare_ratio\n");
  const auto empty = run([&](auto& ctx) { return cmd_plot(dir / "empty.csv", dir / "e.svg", ctx); });
  CHECK(empty.code == kIoError);
  CHECK(empty.err.find("empty trace") != std::string::npos);

  CHECK(run([&](auto& ctx) { return cmd_plot(dir / "missing.csv", dir / "m.svg", ctx); }).code == kIoError);

  REQUIRE(run([&](auto& ctx) { return cmd_gcc(write_config(dir, constant_config(0.3)), ctx); }, 1, dir / "g").code == kOk);
  REQUIRE(run([&](auto& ctx) { return cmd_plot(dir / "g" / "gcc_report.json", dir / "g.svg", ctx); }).code == kOk);
  CHECK(slurp(dir / "g.svg").find("class=\"min-average\"") != std::string::npos);
}

TEST_CASE("sweep command") {
  const auto dir = scratch("sweep");

  SUBCASE("one cell matches verify") {
    Json j = traveling_config(0.5);
    j["sweep"] = Json{{"parameters", Json::array({Json{{"path", "damping.speed"}, {"values", {0.5}}}})}};
    const auto cfg = write_config(dir, j);
    REQUIRE(run([&](auto& ctx) { return cmd_sweep(cfg, ctx); }, 1, dir / "s").code == kOk);
    REQUIRE(run([&](auto& ctx) { return cmd_verify(cfg, ctx); }, 1, dir / "v").code == kOk);
    for (const char* f : {"trace.csv", "report.json", "gcc_report.json", "min_average_vs_T.csv"}) {
      CAPTURE(f);
      CHECK(slurp(dir / "s" / "cell_000" / f) == slurp(dir / "v" / f));
    }
    CHECK(without_wall_time(Json::parse(slurp(dir / "s" / "cell_000" / "manifest.json"))) ==
          without_wall_time(Json::parse(slurp(dir / "v" / "manifest.json"))));
  }

  SUBCASE("speed grid including the co-moving speed") {
    Json j = traveling_config(0.5);
    j["sweep"] = Json{{"parameters", Json::array({Json{{"path", "damping.speed"}, {"values", {0.25, 0.5, 0.75, 1.0}}}})}};
    const auto cfg = write_config(dir, j);
    REQUIRE(run([&](auto& ctx) { return cmd_sweep(cfg, ctx); }, 1, dir / "t1").code == kOk);
    REQUIRE(run([&](auto& ctx) { return cmd_sweep(cfg, ctx); }, 3, dir / "t3").code == kOk);
    const auto rows = read_csv(dir / "t1" / "summary.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[0][4] == "t_gcc_violated");
    for (std::size_t i = 1; i <= 3; ++i) {
      CHECK(std::isfinite(std::stod(rows[i][3])));
      CHECK(std::stod(rows[i][3]) > 0.0);
      CHECK(rows[i][4] == "false");
    }
    CHECK(rows[4][4] == "true");
    CHECK(std::abs(std::stod(rows[4][5])) <= 1e-6);
    CHECK(slurp(dir / "t1" / "summary.csv") == slurp(dir / "t3" / "summary.csv"));
    for (int c = 0; c < 4; ++c) {
      const auto cell = "cell_00" + std::to_string(c);
      CHECK(slurp(dir / "t1" / cell / "trace.csv") == slurp(dir / "t3" / cell / "trace.csv"));
      CHECK(slurp(dir / "t1" / cell / "report.json") == slurp(dir / "t3" / cell / "report.json"));
    }
  }

  SUBCASE("a failing cell is recorded and the sweep continues") {
    Json j = constant_config(0.2);
    j["sweep"] = Json{{"parameters", Json::array({Json{{"path", "damping.w0"}, {"values", {0.2, -1.0, 0.3}}}})}};
    const auto r = run([&](auto& ctx) { return cmd_sweep(write_config(dir, j), ctx); }, 2, dir / "f");
    CHECK(r.code == kVerifyFailed);
    const auto rows = read_csv(dir / "f" / "summary.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[1][2] == "ok");
    CHECK(rows[2][2] == "error(2)");
    CHECK(rows[3][2] == "ok");
    CHECK(fs::exists(dir / "f" / "cell_002" / "report.json"));
  }
}

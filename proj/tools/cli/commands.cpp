#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include "config.hpp"
#include "dampwave/error.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "plot.hpp"

namespace dampwave::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int guarded(const CommandContext& ctx, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    ctx.err << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const IntegrationBlowup& e) {
    ctx.err << "integration blew up at step " << e.step() << ": " << e.what() << "\n";
    return kBlowup;
  } catch (const ResolutionError& e) {
    ctx.err << "config error at '" << e.parameter() << "': " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    ctx.err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InsufficientData& e) {
    ctx.err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InterpolationNotAllowed& e) {
    ctx.err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const HypothesisViolation& e) {
    ctx.err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnderflowError& e) {
    ctx.err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kIoError;
  }
}

fs::path output_dir(const ScenarioConfig& c, const CommandContext& ctx) {
  return ctx.out_dir ? *ctx.out_dir : fs::path(c.output.dir);
}

std::string padded(std::size_t i, int width) {
  std::string s = std::to_string(i);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

StateObserver snapshot_writer(const ScenarioConfig& c, const fs::path& dir) {
  if (!c.output.snapshot_every) return {};
  const std::size_t every = *c.output.snapshot_every;
  auto count = std::make_shared<std::size_t>(0);
  return [=](const WaveState& s) {
    const std::size_t k = (*count)++;
    if (k % every == 0) write_text(dir / "snapshots" / ("snapshot_" + padded(k, 6) + ".csv"), snapshot_csv(s, k));
  };
}

void write_gcc_outputs(const fs::path& dir, const GccOutcome& g) {
  write_text(dir / "gcc_report.json", dump(gcc_report_json(g)));
  write_text(dir / "min_average_vs_T.csv", min_average_csv(g));
}

void write_verify_outputs(const fs::path& dir, const ScenarioConfig& c, const VerifyOutcome& v, double wall) {
  write_text(dir / "trace.csv", trace_csv(v.run.trace));
  if (v.gcc) write_gcc_outputs(dir, *v.gcc);
  write_text(dir / "report.json", dump(report_json(c, v)));
  write_text(dir / "manifest.json", dump(manifest_json(c, "verify", wall)));
}

void print_gcc_status(std::ostream& out, const GccOutcome& g) {
  const auto& r = g.report;
  if (r.violated()) {
    const auto& w = r.witness();
    out << "t-GCC violated: witness ray x=(" << format_double(w.point.x[0]) << ", " << format_double(w.point.x[1])
        << ") xi=(" << format_double(w.point.xi[0]) << ", " << format_double(w.point.xi[1])
        << ") alpha=" << format_double(w.alpha) << " average=" << format_double(w.average) << "\n";
  } else {
    out << "t-GCC holds on the sampled lattice: estimated C = " << format_double(r.estimated_C) << ", T0 = "
        << (g.attained_T0 ? format_double(*g.attained_T0) : std::string("not attained")) << "\n";
  }
}

std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

std::optional<unsigned> parse_thread_count(const char* value) {
  if (value == nullptr) return 1u;
  unsigned n = 0;
  const char* end = value + std::strlen(value);
  const auto [ptr, ec] = std::from_chars(value, end, n);
  if (ec != std::errc{} || ptr != end || n == 0 || n > 1024) return std::nullopt;
  return n;
}

int cmd_simulate(const fs::path& config_path, const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const auto start = Clock::now();
    const auto c = load_config(config_path);
    const fs::path dir = output_dir(c, ctx);
    const auto geom = build_geometry(c);
    const auto model = build_damping(geom, c.damping);
    auto grid = SpectralGrid::create(geom, static_cast<std::size_t>(c.geometry.n));
    const auto res = simulate(grid, model, build_initial_data(c), c.time.dt, c.time.t_end, c.time.record_every,
                              snapshot_writer(c, dir));
    write_text(dir / "trace.csv", trace_csv(res.trace));
    write_text(dir / "manifest.json", dump(manifest_json(c, "simulate", seconds_since(start))));
    ctx.out << "simulated " << c.scenario << ": " << res.trace.size() << " samples, E(0)="
            << format_double(res.trace.energy.front()) << " E(end)=" << format_double(res.trace.energy.back())
            << " -> " << dir.string() << "\n";
    return kOk;
  });
}

int cmd_gcc(const fs::path& config_path, const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const auto start = Clock::now();
    const auto c = load_config(config_path);
    if (!c.gcc) throw ConfigError("gcc", "the gcc command needs a gcc block");
    const fs::path dir = output_dir(c, ctx);
    const auto model = build_damping(build_geometry(c), c.damping);
    const auto g = run_gcc(c, model, ctx.threads);
    write_gcc_outputs(dir, g);
    write_text(dir / "manifest.json", dump(manifest_json(c, "gcc", seconds_since(start))));
    print_gcc_status(ctx.out, g);
    return kOk;
  });
}

int cmd_verify(const fs::path& config_path, const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const auto start = Clock::now();
    const auto c = load_config(config_path);
    const fs::path dir = output_dir(c, ctx);
    const auto v = run_verify(c, ctx.threads, snapshot_writer(c, dir));
    write_verify_outputs(dir, c, v, seconds_since(start));
    if (v.gcc) print_gcc_status(ctx.out, *v.gcc);
    for (const auto& chk : v.checks) ctx.out << (chk.pass ? "PASS " : "FAIL ") << chk.name << ": " << chk.detail << "\n";
    return v.all_pass() ? kOk : kVerifyFailed;
  });
}

int cmd_plot(const fs::path& input, const fs::path& output, const CommandContext& ctx) {
  return guarded(ctx, [&] {
    write_text(output, render_svg(read_text(input)));
    ctx.out << "wrote " << output.string() << "\n";
    return kOk;
  });
}

int cmd_sweep(const fs::path& config_path, const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const auto c = load_config(config_path);
    if (c.sweep.empty()) throw ConfigError("sweep", "the sweep command needs a sweep block");
    const fs::path dir = output_dir(c, ctx);
    Json base = to_json(c);
    base.erase("sweep");

    // Cartesian product, first parameter slowest.
    std::size_t cells = 1;
    for (const auto& p : c.sweep) cells *= p.values.size();
    std::vector<Json> cell_configs(cells);
    std::vector<std::vector<std::string>> cell_values(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      std::size_t rem = i;
      std::vector<std::size_t> idx(c.sweep.size());
      for (std::size_t p = c.sweep.size(); p-- > 0;) {
        idx[p] = rem % c.sweep[p].values.size();
        rem /= c.sweep[p].values.size();
      }
      Json j = base;
      for (std::size_t p = 0; p < c.sweep.size(); ++p) {
        const Json& value = c.sweep[p].values[idx[p]];
        j = with_override(j, c.sweep[p].path, value);
        cell_values[i].push_back(value.dump());
      }
      j["output"]["dir"] = (dir / ("cell_" + padded(i, 3))).string();
      cell_configs[i] = std::move(j);
    }

    struct Row {
      std::string status = "error";
      std::string message;
      std::string estimated_C, violated, fitted_rate, max_factor, verdict;
    };
    std::vector<Row> rows(cells);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < cells; i = next++) {
        Row& row = rows[i];
        const auto start = Clock::now();
        std::ostringstream sink;
        CommandContext cell_ctx{sink, sink, 1, std::nullopt};
        const int code = guarded(cell_ctx, [&] {
          const auto cc = parse_config(cell_configs[i]);
          const fs::path cell_dir = cc.output.dir;
          const auto v = run_verify(cc, 1, snapshot_writer(cc, cell_dir));
          write_verify_outputs(cell_dir, cc, v, seconds_since(start));
          row.status = "ok";
          if (v.gcc) {
            row.estimated_C = format_double(v.gcc->report.estimated_C);
            row.violated = v.gcc->report.violated() ? "true" : "false";
          }
          if (v.fit) row.fitted_rate = format_double(v.fit->c);
          double hi = 0.0;
          for (const auto& f : v.measured) hi = std::max(hi, f.factor);
          row.max_factor = format_double(hi);
          row.verdict = v.all_pass() ? "PASS" : "FAIL";
          return kOk;
        });
        if (code != kOk) {
          row.status = "error(" + std::to_string(code) + ")";
          std::string msg = sink.str();
          while (!msg.empty() && msg.back() == '\n') msg.pop_back();
          row.message = csv_field(msg);
        }
      }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(ctx.threads, static_cast<unsigned>(cells)));
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
      worker();
    }

    std::string summary = "cell";
    for (const auto& p : c.sweep) summary += "," + csv_field(p.path);
    summary += ",status,estimated_C,t_gcc_violated,fitted_rate,max_contraction_factor,verify,message\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < cells; ++i) {
      const Row& r = rows[i];
      summary += padded(i, 3);
      for (const auto& v : cell_values[i]) summary += "," + csv_field(v);
      summary += "," + r.status + "," + r.estimated_C + "," + r.violated + "," + r.fitted_rate + "," + r.max_factor + "," +
                 r.verdict + "," + r.message + "\n";
      all_ok = all_ok && r.status == "ok" && r.verdict == "PASS";
      ctx.out << "cell " << padded(i, 3) << ": " << (r.status == "ok" ? r.verdict : r.status + " " + r.message) << "\n";
    }
    write_text(dir / "summary.csv", summary);
    return all_ok ? kOk : kVerifyFailed;
  });
}

}  // namespace dampwave::cli

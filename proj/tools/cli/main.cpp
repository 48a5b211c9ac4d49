#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace cli = dampwave::cli;

int main(int argc, char** argv) {
  CLI::App app{"Damped wave simulator and verification harness"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string input;

  struct Sub {
    const char* name;
    const char* help;
  };
  std::vector<std::pair<CLI::App*, std::string>> config_commands;
  for (const Sub s : {Sub{"simulate", "integrate a scenario and write trace.csv"},
                      Sub{"gcc", "scan ray averages of the damping"},
                      Sub{"verify", "simulate, scan and run every analysis check"},
                      Sub{"sweep", "verify over a cartesian parameter grid"}}) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config, "scenario JSON")->required();
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    config_commands.emplace_back(sub, s.name);
  }
  CLI::App* plot = app.add_subcommand("plot", "render trace.csv or gcc_report.json as SVG");
  plot->add_option("--input", input, "trace.csv or gcc_report.json")->required();
  plot->add_option("--out", out, "SVG path (default: input with .svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  const auto threads = cli::parse_thread_count(std::getenv("DAMPWAVE_THREADS"));
  if (!threads) {
    std::cerr << "config error at 'DAMPWAVE_THREADS': expected an integer in [1, 1024]\n";
    return cli::kConfigError;
  }
  cli::CommandContext ctx{std::cout, std::cerr, *threads, std::nullopt};
  if (!out.empty()) ctx.out_dir = out;

  if (plot->parsed()) {
    std::filesystem::path target = out.empty() ? std::filesystem::path(input).replace_extension(".svg")
                                               : std::filesystem::path(out);
    return cli::cmd_plot(input, target, ctx);
  }
  for (const auto& [sub, name] : config_commands) {
    if (!sub->parsed()) continue;
    if (name == "simulate") return cli::cmd_simulate(config, ctx);
    if (name == "gcc") return cli::cmd_gcc(config, ctx);
    if (name == "verify") return cli::cmd_verify(config, ctx);
    return cli::cmd_sweep(config, ctx);
  }
  return cli::kConfigError;
}

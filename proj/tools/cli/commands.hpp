#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace dampwave::cli {

enum ExitCode : int { kOk = 0, kIoError = 1, kConfigError = 2, kBlowup = 3, kVerifyFailed = 4 };

struct CommandContext {
  std::ostream& out;
  std::ostream& err;
  unsigned threads = 1;
  std::optional<std::filesystem::path> out_dir;  // overrides output.dir
};

int cmd_simulate(const std::filesystem::path& config, const CommandContext& ctx);
int cmd_gcc(const std::filesystem::path& config, const CommandContext& ctx);
int cmd_verify(const std::filesystem::path& config, const CommandContext& ctx);
int cmd_sweep(const std::filesystem::path& config, const CommandContext& ctx);
int cmd_plot(const std::filesystem::path& input, const std::filesystem::path& output, const CommandContext& ctx);

/// Parses a DAMPWAVE_THREADS style value; nullopt when malformed.
std::optional<unsigned> parse_thread_count(const char* value);

}  // namespace dampwave::cli

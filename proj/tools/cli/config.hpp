#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dampwave/damping.hpp"
#include "dampwave/geometry.hpp"
#include "dampwave/solver.hpp"

namespace dampwave::cli {

using Json = nlohmann::ordered_json;

/// Bad configuration; key() is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("config error at '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeometryConfig {
  int dim = 1;
  int n = 0;
  std::vector<double> periods;
};

struct DampingSpec {
  std::string type;  // constant | static_bump | traveling_bump | rotating_bump_2d | time_modulated | sum
  double w0 = 0.0;
  double amplitude = 0.0;
  double width = 0.0;
  double speed = 0.0;
  Vec center{0.0, 0.0};
  Vec velocity{0.0, 0.0};
  TimeProfile profile;
  std::vector<DampingSpec> terms;  // sum terms, or the single base of time_modulated
};

struct InitialDataSpec {
  std::string type;  // single_mode | random_sobolev | traveling_packet
  std::array<int, 2> k{0, 0};
  double amplitude = 0.0;
  double phase = 0.0;
  double velocity_amplitude = 0.0;
  double decay = 0.0;
  Vec center{0.0, 0.0};
  double width = 0.0;
  Vec direction{0.0, 0.0};
};

struct TimeConfig {
  double dt = 0.0;
  double t_end = 0.0;
  std::size_t record_every = 1;
};

struct GccConfig {
  std::vector<double> T_values;
  std::optional<std::size_t> alpha_count;
  std::optional<double> alpha_window;
  std::optional<std::vector<double>> alpha_values;
  std::size_t n_pos = 0;
  std::size_t n_dir = 0;
  double dt_quad = 0.0;
  std::optional<double> target_C;
  std::optional<double> requested_T0;
};

enum class ExpectDecay { yes, no, automatic };

struct AnalysisConfig {
  std::optional<double> window_T;
  std::optional<std::array<double, 2>> fit_window;
  std::optional<std::vector<double>> epsilon_grid;
  std::optional<std::vector<std::array<double, 2>>> margin_windows;
  std::size_t alpha_count = 8;
  std::vector<std::uint64_t> observability_seeds;
  std::optional<double> observability_decay;
  ExpectDecay expect_decay = ExpectDecay::automatic;
  double dissipation_rel_tol = 1e-6;
  std::size_t sup_resolution = 256;
};

struct OutputConfig {
  std::string dir = "out";
  std::optional<std::size_t> snapshot_every;
};

struct SweepParameter {
  std::string path;  // dotted path into the config, e.g. "damping.speed"
  std::vector<Json> values;
};

struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 0;
  GeometryConfig geometry;
  DampingSpec damping;
  InitialDataSpec initial_data;
  TimeConfig time;
  std::optional<GccConfig> gcc;
  std::optional<AnalysisConfig> analysis;
  OutputConfig output;
  std::vector<SweepParameter> sweep;
};

/// Strict parse: unknown keys, missing physics parameters and out-of-range
/// values throw ConfigError naming the key.
ScenarioConfig parse_config(const Json& j);
Json to_json(const ScenarioConfig& config);

/// Reads and parses a file. IoError when unreadable, ConfigError otherwise.
ScenarioConfig load_config(const std::filesystem::path& path);

/// to_json without the output and sweep blocks; what the run digest covers.
Json physics_json(const ScenarioConfig& config);

TorusGeometry build_geometry(const ScenarioConfig& config);
DampingModel build_damping(const TorusGeometry& geom, const DampingSpec& spec);
InitialData build_initial_data(const ScenarioConfig& config);

/// Replaces the value at a dotted path; ConfigError if the path does not exist.
Json with_override(Json j, const std::string& path, const Json& value);

}  // namespace dampwave::cli

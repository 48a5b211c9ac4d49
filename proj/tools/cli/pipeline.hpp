#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "dampwave/analysis.hpp"
#include "dampwave/gcc.hpp"
#include "dampwave/solver.hpp"

namespace dampwave::cli {

struct GccOutcome {
  GccReport report;
  double target_C = 0.0;
  std::optional<double> attained_T0;
  std::size_t n_pos = 0;
  std::size_t n_dir = 0;
};

/// Runs the ray scan described by config.gcc (which must be present).
GccOutcome run_gcc(const ScenarioConfig& config, const DampingModel& model, unsigned threads);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct MarginSample {
  double t1 = 0.0;
  double t2 = 0.0;
  double epsilon = 0.0;
  double margin = 0.0;
};

struct ResidualSample {
  double t1 = 0.0;
  double t2 = 0.0;
  double residual = 0.0;
};

struct VerifyOutcome {
  SimulationResult run;
  std::optional<GccOutcome> gcc;
  bool expect_decay = true;

  double sup_w = 0.0;
  double B1 = 0.0;
  double C_p = 0.0;
  double T = 0.0;
  std::optional<double> epsilon_star;
  double predicted_factor = 1.0;

  std::vector<double> alpha_grid;
  std::vector<std::string> suite;               // initial data labels
  std::vector<std::vector<double>> ratios;      // [suite][alpha]
  std::vector<double> max_ratio_per_alpha;      // max over the suite
  double B2_empirical = 0.0;

  std::vector<ContractionFactor> measured;
  std::array<double, 2> fit_window{0.0, 0.0};
  std::optional<DecayFit> fit;
  std::string fit_error;

  std::vector<MarginSample> margins;
  std::vector<ResidualSample> residuals;

  std::vector<Check> checks;
  bool all_pass() const;
};

/// simulate + gcc + analysis for one scenario. The observer sees every
/// recorded state of the main run.
VerifyOutcome run_verify(const ScenarioConfig& config, unsigned threads,
                         const StateObserver& observer = {});

/// report.json contents; non-finite numbers become strings.
Json report_json(const ScenarioConfig& config, const VerifyOutcome& v);

}  // namespace dampwave::cli

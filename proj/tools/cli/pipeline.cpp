#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dampwave/error.hpp"
#include "io.hpp"

namespace dampwave::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Recorded instants are multiples of h = dt * record_every.
double snap_up(double t, double dt, std::size_t every) {
  const double h = dt * static_cast<double>(every);
  const double m = std::ceil(t / h - 1e-9);
  return static_cast<double>(static_cast<std::size_t>(m) * every) * dt;
}

double snap_nearest(double t, double dt, std::size_t every) {
  const double h = dt * static_cast<double>(every);
  const double m = std::round(t / h);
  return static_cast<double>(static_cast<std::size_t>(m) * every) * dt;
}

std::string label_of(const ScenarioConfig& c) {
  if (c.initial_data.type == "random_sobolev") return "random_sobolev(seed=" + std::to_string(c.seed) + ")";
  return c.initial_data.type;
}

std::string num(double x) { return format_double(x); }

}  // namespace

bool VerifyOutcome::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

GccOutcome run_gcc(const ScenarioConfig& config, const DampingModel& model, unsigned threads) {
  const GccConfig& g = config.gcc.value();
  const auto geom = build_geometry(config);
  GccOutcome out;
  out.n_pos = g.n_pos;
  out.n_dir = g.n_dir;
  const auto samples = sample_phase_space(geom, g.n_pos, g.n_dir);
  std::vector<double> alphas;
  if (g.alpha_values) {
    alphas = *g.alpha_values;
  } else {
    alphas = default_alpha_values(model, *g.alpha_count, g.alpha_window);
  }
  out.report = gcc_scan(model, geom, samples, alphas, g.T_values, {g.dt_quad, g.requested_T0, threads});
  out.target_C = g.target_C.value_or(0.5 * out.report.estimated_C);
  if (out.target_C > 0.0) out.attained_T0 = estimate_T0(out.report, out.target_C);
  return out;
}

VerifyOutcome run_verify(const ScenarioConfig& config, unsigned threads, const StateObserver& observer) {
  const AnalysisConfig a = config.analysis.value_or(AnalysisConfig{});
  const auto geom = build_geometry(config);
  const auto model = build_damping(geom, config.damping);
  const double dt = config.time.dt;
  const std::size_t every = config.time.record_every;

  VerifyOutcome v;
  if (config.gcc) v.gcc = run_gcc(config, model, threads);

  switch (a.expect_decay) {
    case ExpectDecay::yes: v.expect_decay = true; break;
    case ExpectDecay::no: v.expect_decay = false; break;
    case ExpectDecay::automatic:
      if (!v.gcc) throw ConfigError("analysis.expect_decay", "\"auto\" needs a gcc block");
      v.expect_decay = !v.gcc->report.violated();
      break;
  }

  // Window length: explicit, else the scanned T0, else the longest horizon.
  double T = 0.0;
  if (a.window_T) {
    T = *a.window_T;
  } else if (v.gcc) {
    T = v.gcc->attained_T0.value_or(v.gcc->report.T_values.back());
  } else {
    throw ConfigError("analysis.window_T", "required when there is no gcc block");
  }
  T = snap_up(std::max(T, 2.0 + 1e-9), dt, every);
  v.T = T;

  auto grid = SpectralGrid::create(geom, static_cast<std::size_t>(config.geometry.n));
  v.run = simulate(grid, model, build_initial_data(config), dt, config.time.t_end, every, observer);
  const EnergyTrace& tr = v.run.trace;
  const double E0 = tr.energy.front();
  const double t_last = tr.times.back();

  const auto sup = damping_sup_norms(model, a.sup_resolution);
  v.sup_w = sup.sup_w;
  v.B1 = b1_from_sup(sup.sup_w);
  v.C_p = poincare_constant(geom);

  // Offsets spanning one model period (or one window when stationary).
  double period = model.characteristic_time();
  if (!(period > 0.0)) period = T;
  for (std::size_t k = 0; k < a.alpha_count; ++k) {
    const double alpha = snap_nearest(period * static_cast<double>(k) / static_cast<double>(a.alpha_count), dt, every);
    if (v.alpha_grid.empty() || alpha > v.alpha_grid.back()) v.alpha_grid.push_back(alpha);
  }
  const double horizon = v.alpha_grid.back() + T;
  if (horizon > t_last * (1.0 + 1e-12)) {
    throw ConfigError("time.t_end", "must cover the last alpha offset plus the window (" + num(horizon) + ")");
  }

  // Observability suite: the scenario's own data plus seeded random data.
  auto ratios_for = [&](const EnergyTrace& trace) {
    std::vector<double> r;
    for (double alpha : v.alpha_grid) r.push_back(observability_ratio(trace, alpha, T));
    return r;
  };
  v.suite.push_back(label_of(config));
  v.ratios.push_back(ratios_for(tr));
  for (std::uint64_t seed : a.observability_seeds) {
    const auto extra = simulate(grid, model, RandomSobolev{seed, *a.observability_decay}, dt, horizon, every);
    v.suite.push_back("random_sobolev(seed=" + std::to_string(seed) + ")");
    v.ratios.push_back(ratios_for(extra.trace));
  }
  v.max_ratio_per_alpha.assign(v.alpha_grid.size(), 0.0);
  for (const auto& row : v.ratios) {
    for (std::size_t i = 0; i < row.size(); ++i) v.max_ratio_per_alpha[i] = std::max(v.max_ratio_per_alpha[i], row[i]);
  }
  v.B2_empirical = *std::max_element(v.max_ratio_per_alpha.begin(), v.max_ratio_per_alpha.end());

  if (std::isfinite(v.B2_empirical)) {
    const auto opt = optimize_epsilon(v.B1, v.B2_empirical, v.C_p, T);
    v.epsilon_star = opt.epsilon;
    v.predicted_factor = opt.factor;
  }

  v.measured = contraction_factors(tr, T);

  v.fit_window = a.fit_window.value_or(std::array<double, 2>{T, t_last});
  try {
    v.fit = fit_decay_rate(tr, v.fit_window[0], v.fit_window[1]);
  } catch (const InsufficientData& e) {
    v.fit_error = e.what();
  } catch (const UnderflowError& e) {
    v.fit_error = e.what();
  }

  std::vector<std::array<double, 2>> windows;
  if (a.margin_windows) {
    windows = *a.margin_windows;
  } else {
    for (double alpha : v.alpha_grid) windows.push_back({alpha, alpha + T});
  }
  std::vector<double> eps = a.epsilon_grid.value_or(std::vector<double>{});
  if (eps.empty()) eps.push_back(v.epsilon_star.value_or(0.01));
  for (const auto& w : windows) {
    for (double e : eps) v.margins.push_back({w[0], w[1], e, energy_inequality_margin(tr, w[0], w[1], e, v.B1, v.C_p)});
  }

  v.residuals.push_back({0.0, t_last, dissipation_residual(tr, 0.0, t_last)});
  for (double alpha : v.alpha_grid) v.residuals.push_back({alpha, alpha + T, dissipation_residual(tr, alpha, alpha + T)});

  // Verdicts.
  {
    double worst = 0.0;
    for (const auto& r : v.residuals) worst = std::max(worst, r.residual);
    const double bound = a.dissipation_rel_tol * E0;
    v.checks.push_back({"dissipation residual", worst <= bound,
                        "max residual " + num(worst) + " <= " + num(bound) + " (" + num(a.dissipation_rel_tol) + " E(0))"});
  }
  {
    double worst = -kInf;
    for (std::size_t n = 1; n < tr.size(); ++n) worst = std::max(worst, tr.energy[n] - tr.energy[n - 1]);
    const double bound = 1e-12 * E0;
    v.checks.push_back({"energy monotonicity", worst <= bound,
                        "max increase " + num(worst) + " <= " + num(bound) + " over " + std::to_string(tr.size()) + " samples"});
  }
  {
    double worst = kInf;
    for (const auto& m : v.margins) worst = std::min(worst, m.margin);
    const double bound = -1e-8 * E0;
    v.checks.push_back({"energy-inequality margin", worst >= bound,
                        "min margin " + num(worst) + " >= " + num(bound) + " over " + std::to_string(v.margins.size()) + " (window, epsilon) pairs"});
  }
  {
    const auto [lo, hi] = std::minmax_element(v.max_ratio_per_alpha.begin(), v.max_ratio_per_alpha.end());
    if (v.expect_decay) {
      const bool finite = std::isfinite(*hi);
      const double spread = *hi / *lo;
      v.checks.push_back({"observability ratio", finite && spread < 2.0,
                          "B2 " + num(*hi) + ", max/min over alpha " + num(spread) + " < 2"});
    } else {
      const bool all_inf = std::all_of(v.ratios.front().begin(), v.ratios.front().end(),
                                       [](double r) { return std::isinf(r); });
      v.checks.push_back({"observability ratio", all_inf,
                          std::string("no decay expected: ratio ") + (all_inf ? "is" : "is not") +
                              " +inf for every alpha"});
    }
  }
  {
    double hi = 0.0, lo = kInf;
    for (const auto& f : v.measured) {
      hi = std::max(hi, f.factor);
      lo = std::min(lo, f.factor);
    }
    if (v.expect_decay) {
      const bool ok = v.epsilon_star.has_value() && v.predicted_factor < 1.0 && hi <= v.predicted_factor;
      v.checks.push_back({"contraction vs predicted", ok,
                          "max measured " + num(hi) + " <= predicted " + num(v.predicted_factor) + " (T " + num(T) + ")"});
    } else {
      v.checks.push_back({"contraction vs predicted", lo >= 1.0 - 1e-8,
                          "no decay expected: min measured " + num(lo) + " >= 1 - 1e-8 (T " + num(T) + ")"});
    }
  }
  return v;
}

Json report_json(const ScenarioConfig& config, const VerifyOutcome& v) {
  Json j;
  j["scenario"] = config.scenario;
  j["B1"] = json_number(v.B1);
  j["B2_empirical"] = json_number(v.B2_empirical);
  j["C_p"] = json_number(v.C_p);
  j["T"] = json_number(v.T);
  j["epsilon_star"] = v.epsilon_star ? json_number(*v.epsilon_star) : Json(nullptr);
  j["predicted_factor"] = json_number(v.predicted_factor);
  Json measured = Json::array(), alphas = Json::array();
  for (const auto& f : v.measured) {
    measured.push_back(json_number(f.factor));
    alphas.push_back(json_number(f.alpha));
  }
  j["measured_factors"] = measured;
  j["fitted_rate"] = v.fit ? json_number(v.fit->c) : Json(nullptr);
  j["r_squared"] = v.fit ? json_number(v.fit->r_squared) : Json(nullptr);
  Json margins = Json::array(), margin_windows = Json::array();
  for (const auto& m : v.margins) {
    margins.push_back(json_number(m.margin));
    margin_windows.push_back(Json{{"t1", m.t1}, {"t2", m.t2}, {"epsilon", m.epsilon}});
  }
  j["prop22_margins"] = margins;
  Json residuals = Json::array(), residual_windows = Json::array();
  for (const auto& r : v.residuals) {
    residuals.push_back(json_number(r.residual));
    residual_windows.push_back(Json::array({r.t1, r.t2}));
  }
  j["dissipation_residuals"] = residuals;

  j["measured_alphas"] = alphas;
  j["margin_windows"] = margin_windows;
  j["dissipation_windows"] = residual_windows;
  j["expect_decay"] = v.expect_decay;
  j["sup_W"] = json_number(v.sup_w);
  j["E0"] = json_number(v.run.trace.energy.front());
  j["fit_window"] = Json::array({v.fit_window[0], v.fit_window[1]});
  if (v.fit) j["fit_C"] = json_number(v.fit->C);
  if (!v.fit_error.empty()) j["fit_error"] = v.fit_error;
  if (v.gcc) {
    j["estimated_C"] = json_number(v.gcc->report.estimated_C);
    j["t_gcc_violated"] = v.gcc->report.violated();
    j["attained_T0"] = v.gcc->attained_T0 ? json_number(*v.gcc->attained_T0) : Json("not attained");
  }
  Json obs;
  obs["alpha_grid"] = v.alpha_grid;
  obs["window_T"] = json_number(v.T);
  obs["initial_data"] = v.suite;
  Json rows = Json::array();
  for (const auto& row : v.ratios) {
    Json r = Json::array();
    for (double x : row) r.push_back(json_number(x));
    rows.push_back(r);
  }
  obs["ratios"] = rows;
  Json per_alpha = Json::array();
  for (double x : v.max_ratio_per_alpha) per_alpha.push_back(json_number(x));
  obs["max_over_suite"] = per_alpha;
  j["observability_suite"] = obs;
  Json checks = Json::array();
  for (const auto& c : v.checks) checks.push_back(Json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = checks;
  j["all_pass"] = v.all_pass();
  return j;
}

}  // namespace dampwave::cli

#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dampwave/error.hpp"

namespace dampwave::cli {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Typed access to one JSON object; remembers which keys were read so that
// leftovers can be reported.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string key(const std::string& k) const { return join(path_, k); }

  const Json& raw(const std::string& k) {
    if (!j_.contains(k)) throw ConfigError(key(k), "required key is missing");
    used_.insert(k);
    return j_.at(k);
  }

  double number(const std::string& k) { return as_number(raw(k), key(k)); }

  std::optional<double> opt_number(const std::string& k) {
    if (!has(k)) return std::nullopt;
    return number(k);
  }

  std::int64_t integer(const std::string& k) { return as_integer(raw(k), key(k)); }

  std::string string(const std::string& k) {
    const Json& v = raw(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& k) {
    const Json& v = raw(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], key(k) + "[" + std::to_string(i) + "]"));
    return out;
  }

  Reader object(const std::string& k) { return Reader(raw(k), key(k)); }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ConfigError(key(k), "unknown key");
    }
  }

  static double as_number(const Json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key, "must be finite");
    return x;
  }

  static std::int64_t as_integer(const Json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
    return v.get<std::int64_t>();
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

std::size_t positive_count(Reader& r, const std::string& k) {
  const auto v = r.integer(k);
  require(v >= 1, r.key(k), "must be >= 1");
  return static_cast<std::size_t>(v);
}

Vec vec_of(Reader& r, const std::string& k, int dim) {
  const auto v = r.numbers(k);
  require(static_cast<int>(v.size()) == dim, r.key(k), "expected " + std::to_string(dim) + " components");
  Vec out{0.0, 0.0};
  for (int a = 0; a < dim; ++a) out[static_cast<std::size_t>(a)] = v[static_cast<std::size_t>(a)];
  return out;
}

Json vec_json(const Vec& v, int dim) {
  Json a = Json::array();
  for (int i = 0; i < dim; ++i) a.push_back(v[static_cast<std::size_t>(i)]);
  return a;
}

DampingSpec parse_damping(Reader r, int dim) {
  DampingSpec s;
  s.type = r.string("type");
  if (s.type == "constant") {
    s.w0 = r.number("w0");
  } else if (s.type == "static_bump") {
    s.center = vec_of(r, "center", dim);
    s.width = r.number("width");
    s.amplitude = r.number("amplitude");
  } else if (s.type == "traveling_bump") {
    require(dim == 1, r.key("type"), "traveling_bump needs dim = 1");
    s.center = {r.number("center"), 0.0};
    s.width = r.number("width");
    s.amplitude = r.number("amplitude");
    s.speed = r.number("speed");
  } else if (s.type == "rotating_bump_2d") {
    require(dim == 2, r.key("type"), "rotating_bump_2d needs dim = 2");
    s.center = vec_of(r, "center", dim);
    s.width = r.number("width");
    s.amplitude = r.number("amplitude");
    s.velocity = vec_of(r, "velocity", dim);
  } else if (s.type == "time_modulated") {
    s.profile.period = r.number("period");
    s.profile.on_duration = r.number("on_duration");
    s.profile.ramp = r.number("ramp");
    s.terms.push_back(parse_damping(r.object("base"), dim));
  } else if (s.type == "sum") {
    const Json& terms = r.raw("terms");
    require(terms.is_array() && !terms.empty(), r.key("terms"), "expected a nonempty array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      s.terms.push_back(parse_damping(Reader(terms[i], r.key("terms") + "[" + std::to_string(i) + "]"), dim));
    }
  } else {
    throw ConfigError(r.key("type"), "unknown damping type '" + s.type + "'");
  }
  r.finish();
  return s;
}

Json damping_json(const DampingSpec& s, int dim) {
  Json j;
  j["type"] = s.type;
  if (s.type == "constant") {
    j["w0"] = s.w0;
  } else if (s.type == "static_bump") {
    j["center"] = vec_json(s.center, dim);
    j["width"] = s.width;
    j["amplitude"] = s.amplitude;
  } else if (s.type == "traveling_bump") {
    j["center"] = s.center[0];
    j["width"] = s.width;
    j["amplitude"] = s.amplitude;
    j["speed"] = s.speed;
  } else if (s.type == "rotating_bump_2d") {
    j["center"] = vec_json(s.center, dim);
    j["width"] = s.width;
    j["amplitude"] = s.amplitude;
    j["velocity"] = vec_json(s.velocity, dim);
  } else if (s.type == "time_modulated") {
    j["period"] = s.profile.period;
    j["on_duration"] = s.profile.on_duration;
    j["ramp"] = s.profile.ramp;
    j["base"] = damping_json(s.terms.at(0), dim);
  } else if (s.type == "sum") {
    j["terms"] = Json::array();
    for (const auto& t : s.terms) j["terms"].push_back(damping_json(t, dim));
  }
  return j;
}

InitialDataSpec parse_initial(Reader r, int dim) {
  InitialDataSpec s;
  s.type = r.string("type");
  if (s.type == "single_mode") {
    const Json& k = r.raw("k");
    require(k.is_array() && static_cast<int>(k.size()) == dim, r.key("k"),
            "expected " + std::to_string(dim) + " integers");
    for (int a = 0; a < dim; ++a) {
      const auto v = Reader::as_integer(k[static_cast<std::size_t>(a)], r.key("k"));
      require(std::abs(v) < (1 << 20), r.key("k"), "wavenumber out of range");
      s.k[static_cast<std::size_t>(a)] = static_cast<int>(v);
    }
    s.amplitude = r.number("amplitude");
    s.phase = r.number("phase");
    s.velocity_amplitude = r.number("velocity_amplitude");
  } else if (s.type == "random_sobolev") {
    s.decay = r.number("decay");
    require(s.decay >= 0.0, r.key("decay"), "must be >= 0");
  } else if (s.type == "traveling_packet") {
    s.center = vec_of(r, "center", dim);
    s.width = r.number("width");
    s.direction = vec_of(r, "direction", dim);
  } else {
    throw ConfigError(r.key("type"), "unknown initial data type '" + s.type + "'");
  }
  r.finish();
  return s;
}

Json initial_json(const InitialDataSpec& s, int dim) {
  Json j;
  j["type"] = s.type;
  if (s.type == "single_mode") {
    Json k = Json::array();
    for (int a = 0; a < dim; ++a) k.push_back(s.k[static_cast<std::size_t>(a)]);
    j["k"] = k;
    j["amplitude"] = s.amplitude;
    j["phase"] = s.phase;
    j["velocity_amplitude"] = s.velocity_amplitude;
  } else if (s.type == "random_sobolev") {
    j["decay"] = s.decay;
  } else if (s.type == "traveling_packet") {
    j["center"] = vec_json(s.center, dim);
    j["width"] = s.width;
    j["direction"] = vec_json(s.direction, dim);
  }
  return j;
}

std::vector<double> increasing(Reader& r, const std::string& k) {
  auto v = r.numbers(k);
  require(!v.empty(), r.key(k), "must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i] > 0.0, r.key(k), "values must be positive");
    if (i > 0) require(v[i] > v[i - 1], r.key(k), "values must be strictly increasing");
  }
  return v;
}

GccConfig parse_gcc(Reader r) {
  GccConfig g;
  g.T_values = increasing(r, "T_values");
  if (r.has("alpha_values")) {
    require(!r.has("alpha_count"), r.key("alpha_count"), "give either alpha_count or alpha_values");
    g.alpha_values = r.numbers("alpha_values");
    require(!g.alpha_values->empty(), r.key("alpha_values"), "must not be empty");
  } else {
    g.alpha_count = positive_count(r, "alpha_count");
    g.alpha_window = r.opt_number("alpha_window");
    if (g.alpha_window) require(*g.alpha_window > 0.0, r.key("alpha_window"), "must be positive");
  }
  g.n_pos = positive_count(r, "n_pos");
  g.n_dir = positive_count(r, "n_dir");
  g.dt_quad = r.number("dt_quad");
  require(g.dt_quad > 0.0, r.key("dt_quad"), "must be positive");
  require(g.dt_quad <= g.T_values.front() / 8.0, r.key("dt_quad"), "must be at most min(T_values) / 8");
  g.target_C = r.opt_number("target_C");
  if (g.target_C) require(*g.target_C > 0.0, r.key("target_C"), "must be positive");
  g.requested_T0 = r.opt_number("requested_T0");
  r.finish();
  return g;
}

Json gcc_json(const GccConfig& g) {
  Json j;
  j["T_values"] = g.T_values;
  if (g.alpha_values) j["alpha_values"] = *g.alpha_values;
  if (g.alpha_count) j["alpha_count"] = *g.alpha_count;
  if (g.alpha_window) j["alpha_window"] = *g.alpha_window;
  j["n_pos"] = g.n_pos;
  j["n_dir"] = g.n_dir;
  j["dt_quad"] = g.dt_quad;
  if (g.target_C) j["target_C"] = *g.target_C;
  if (g.requested_T0) j["requested_T0"] = *g.requested_T0;
  return j;
}

std::array<double, 2> window_of(const Json& v, const std::string& key) {
  require(v.is_array() && v.size() == 2, key, "expected [t1, t2]");
  const std::array<double, 2> w{Reader::as_number(v[0], key), Reader::as_number(v[1], key)};
  require(w[0] >= 0.0 && w[0] < w[1], key, "expected 0 <= t1 < t2");
  return w;
}

AnalysisConfig parse_analysis(Reader r) {
  AnalysisConfig a;
  a.window_T = r.opt_number("window_T");
  if (a.window_T) require(*a.window_T > 2.0, r.key("window_T"), "must exceed 2");
  if (r.has("fit_window")) a.fit_window = window_of(r.raw("fit_window"), r.key("fit_window"));
  if (r.has("epsilon_grid")) {
    a.epsilon_grid = r.numbers("epsilon_grid");
    require(!a.epsilon_grid->empty(), r.key("epsilon_grid"), "must not be empty");
    for (double e : *a.epsilon_grid) require(e > 0.0, r.key("epsilon_grid"), "values must be positive");
  }
  if (r.has("margin_windows")) {
    const Json& w = r.raw("margin_windows");
    require(w.is_array() && !w.empty(), r.key("margin_windows"), "expected a nonempty array of [t1, t2]");
    a.margin_windows.emplace();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto win = window_of(w[i], r.key("margin_windows") + "[" + std::to_string(i) + "]");
      require(win[1] - win[0] > 2.0, r.key("margin_windows"), "each window must be longer than 2");
      a.margin_windows->push_back(win);
    }
  }
  if (r.has("alpha_count")) a.alpha_count = positive_count(r, "alpha_count");
  if (r.has("observability_seeds")) {
    const Json& s = r.raw("observability_seeds");
    require(s.is_array(), r.key("observability_seeds"), "expected an array of integers");
    for (const auto& v : s) {
      require(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
              r.key("observability_seeds"), "expected nonnegative integers");
      a.observability_seeds.push_back(v.get<std::uint64_t>());
    }
    if (!a.observability_seeds.empty()) {
      a.observability_decay = r.number("observability_decay");
      require(*a.observability_decay >= 0.0, r.key("observability_decay"), "must be >= 0");
    }
  }
  if (r.has("expect_decay")) {
    const Json& e = r.raw("expect_decay");
    if (e.is_boolean()) {
      a.expect_decay = e.get<bool>() ? ExpectDecay::yes : ExpectDecay::no;
    } else {
      require(e.is_string() && e.get<std::string>() == "auto", r.key("expect_decay"),
              "expected true, false or \"auto\"");
    }
  }
  if (r.has("dissipation_rel_tol")) {
    a.dissipation_rel_tol = r.number("dissipation_rel_tol");
    require(a.dissipation_rel_tol > 0.0, r.key("dissipation_rel_tol"), "must be positive");
  }
  if (r.has("sup_resolution")) {
    a.sup_resolution = positive_count(r, "sup_resolution");
    require(a.sup_resolution >= 64, r.key("sup_resolution"), "must be >= 64");
  }
  r.finish();
  return a;
}

Json analysis_json(const AnalysisConfig& a) {
  Json j;
  if (a.window_T) j["window_T"] = *a.window_T;
  if (a.fit_window) j["fit_window"] = *a.fit_window;
  if (a.epsilon_grid) j["epsilon_grid"] = *a.epsilon_grid;
  if (a.margin_windows) j["margin_windows"] = *a.margin_windows;
  j["alpha_count"] = a.alpha_count;
  if (!a.observability_seeds.empty()) {
    j["observability_seeds"] = a.observability_seeds;
    j["observability_decay"] = *a.observability_decay;
  }
  switch (a.expect_decay) {
    case ExpectDecay::yes: j["expect_decay"] = true; break;
    case ExpectDecay::no: j["expect_decay"] = false; break;
    case ExpectDecay::automatic: j["expect_decay"] = "auto"; break;
  }
  j["dissipation_rel_tol"] = a.dissipation_rel_tol;
  j["sup_resolution"] = a.sup_resolution;
  return j;
}

bool power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

ScenarioConfig parse_config(const Json& j) {
  Reader r(j, "");
  ScenarioConfig c;
  c.scenario = r.string("scenario");
  require(!c.scenario.empty(), "scenario", "must not be empty");
  {
    const Json& s = r.raw("seed");
    require(s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0), "seed",
            "expected a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }

  {
    Reader g = r.object("geometry");
    const auto dim = g.integer("dim");
    require(dim == 1 || dim == 2, "geometry.dim", "must be 1 or 2");
    c.geometry.dim = static_cast<int>(dim);
    const auto n = g.integer("n");
    require(power_of_two(n) && n >= 8 && n <= (1 << 16), "geometry.n", "must be a power of two in [8, 65536]");
    c.geometry.n = static_cast<int>(n);
    if (g.has("periods")) {
      c.geometry.periods = g.numbers("periods");
      require(static_cast<int>(c.geometry.periods.size()) == c.geometry.dim, "geometry.periods",
              "expected one period per dimension");
      for (double L : c.geometry.periods) require(L > 0.0, "geometry.periods", "periods must be positive");
    } else {
      c.geometry.periods.assign(static_cast<std::size_t>(c.geometry.dim), TorusGeometry::kTwoPi);
    }
    g.finish();
  }

  c.damping = parse_damping(r.object("damping"), c.geometry.dim);
  c.initial_data = parse_initial(r.object("initial_data"), c.geometry.dim);

  {
    Reader t = r.object("time");
    c.time.dt = t.number("dt");
    require(c.time.dt > 0.0, "time.dt", "dt must be positive");
    c.time.t_end = t.number("t_end");
    require(c.time.t_end > 0.0, "time.t_end", "must be positive");
    require(c.time.t_end / c.time.dt <= 1e9, "time.dt", "more than 1e9 steps");
    c.time.record_every = positive_count(t, "record_every");
    t.finish();
  }

  if (r.has("gcc")) c.gcc = parse_gcc(r.object("gcc"));
  if (r.has("analysis")) c.analysis = parse_analysis(r.object("analysis"));

  if (r.has("output")) {
    Reader o = r.object("output");
    if (o.has("dir")) c.output.dir = o.string("dir");
    if (o.has("snapshot_every")) c.output.snapshot_every = positive_count(o, "snapshot_every");
    o.finish();
  }

  if (r.has("sweep")) {
    Reader s = r.object("sweep");
    const Json& params = s.raw("parameters");
    require(params.is_array() && !params.empty(), "sweep.parameters", "expected a nonempty array");
    for (std::size_t i = 0; i < params.size(); ++i) {
      const std::string key = "sweep.parameters[" + std::to_string(i) + "]";
      Reader p(params[i], key);
      SweepParameter sp;
      sp.path = p.string("path");
      const Json& values = p.raw("values");
      require(values.is_array() && !values.empty(), key + ".values", "expected a nonempty array");
      for (const auto& v : values) sp.values.push_back(v);
      p.finish();
      c.sweep.push_back(std::move(sp));
    }
    s.finish();
  }
  r.finish();

  // Physics validation lives in the model factories; report it against the block.
  const auto geom = build_geometry(c);
  try {
    (void)build_damping(geom, c.damping);
  } catch (const InvalidArgument& e) {
    throw ConfigError("damping", e.what());
  }
  try {
    auto grid = SpectralGrid::create(geom, static_cast<std::size_t>(c.geometry.n));
    (void)init_state(grid, build_initial_data(c));
  } catch (const ResolutionError& e) {
    throw ConfigError("initial_data." + e.parameter(), e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError("initial_data", e.what());
  }
  return c;
}

Json to_json(const ScenarioConfig& c) {
  Json j = physics_json(c);
  Json out;
  out["dir"] = c.output.dir;
  if (c.output.snapshot_every) out["snapshot_every"] = *c.output.snapshot_every;
  j["output"] = out;
  if (!c.sweep.empty()) {
    Json params = Json::array();
    for (const auto& p : c.sweep) params.push_back(Json{{"path", p.path}, {"values", p.values}});
    j["sweep"] = Json{{"parameters", params}};
  }
  return j;
}

Json physics_json(const ScenarioConfig& c) {
  Json j;
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["geometry"] = Json{{"dim", c.geometry.dim}, {"n", c.geometry.n}, {"periods", c.geometry.periods}};
  j["damping"] = damping_json(c.damping, c.geometry.dim);
  j["initial_data"] = initial_json(c.initial_data, c.geometry.dim);
  j["time"] = Json{{"dt", c.time.dt}, {"t_end", c.time.t_end}, {"record_every", c.time.record_every}};
  if (c.gcc) j["gcc"] = gcc_json(*c.gcc);
  if (c.analysis) j["analysis"] = analysis_json(*c.analysis);
  return j;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

TorusGeometry build_geometry(const ScenarioConfig& c) {
  return TorusGeometry(c.geometry.dim, c.geometry.periods);
}

DampingModel build_damping(const TorusGeometry& geom, const DampingSpec& s) {
  if (s.type == "constant") return DampingModel::constant(geom, s.w0);
  if (s.type == "static_bump") return DampingModel::static_bump(geom, s.center, s.width, s.amplitude);
  if (s.type == "traveling_bump") {
    return DampingModel::traveling_bump(geom, s.center[0], s.width, s.amplitude, s.speed);
  }
  if (s.type == "rotating_bump_2d") {
    return DampingModel::rotating_bump(geom, s.center, s.width, s.amplitude, s.velocity);
  }
  if (s.type == "time_modulated") return DampingModel::time_modulated(build_damping(geom, s.terms.at(0)), s.profile);
  if (s.type == "sum") {
    std::vector<DampingModel> terms;
    for (const auto& t : s.terms) terms.push_back(build_damping(geom, t));
    return DampingModel::sum(std::move(terms));
  }
  throw InvalidArgument("unknown damping type " + s.type);
}

InitialData build_initial_data(const ScenarioConfig& c) {
  const auto& s = c.initial_data;
  if (s.type == "single_mode") return SingleMode{s.k, s.amplitude, s.phase, s.velocity_amplitude};
  if (s.type == "random_sobolev") return RandomSobolev{c.seed, s.decay};
  return TravelingPacket{s.center, s.width, s.direction};
}

Json with_override(Json j, const std::string& path, const Json& value) {
  Json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (node->is_array()) {
      std::size_t idx = 0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
      if (ec != std::errc{} || ptr != part.data() + part.size() || idx >= node->size()) {
        throw ConfigError(path, "sweep path does not exist");
      }
      node = &(*node)[idx];
    } else {
      if (!node->is_object() || !node->contains(part)) throw ConfigError(path, "sweep path does not exist");
      node = &(*node)[part];
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
  return j;
}

}  // namespace dampwave::cli

#include "io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dampwave/spectral_grid.hpp"
#include "pipeline.hpp"

namespace dampwave::cli {

namespace {

const char* kTraceHeader = "t,E,D,ut_sq,mean_abs,poincare_ratio";

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw IoError("malformed number '" + s + "'");
  return x;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json json_number(double x) {
  if (std::isfinite(x)) return Json(x);
  return Json(format_double(x));
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trace_csv(const EnergyTrace& tr) {
  std::string out = kTraceHeader;
  out += '\n';
  for (std::size_t i = 0; i < tr.size(); ++i) {
    for (double x : {tr.times[i], tr.energy[i], tr.dissipation[i], tr.ut_sq[i], tr.mean_abs[i], tr.poincare_ratio[i]}) {
      out += format_double(x);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

EnergyTrace parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw IoError("not a trace file (bad header)");
  EnergyTrace tr;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cols.push_back(parse_double(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cols.size() != 6) throw IoError("trace line " + std::to_string(lineno) + " has " + std::to_string(cols.size()) + " columns");
    tr.append(cols[0], cols[1], cols[2], cols[3], cols[4], cols[5]);
  }
  return tr;
}

std::string snapshot_csv(const WaveState& state, std::size_t index) {
  const auto& grid = *state.grid;
  const int dim = grid.dim();
  Json header{{"index", index}, {"t", state.t}, {"dim", dim}, {"n", grid.n()}};
  std::string out = "# " + header.dump() + "\n";
  out += dim == 1 ? "x,u,u_t\n" : "x,y,u,u_t\n";
  const auto u = nodal_u(state);
  const auto v = nodal_v(state);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const Vec x = grid.node(j);
    out += format_double(x[0]) + ",";
    if (dim == 2) out += format_double(x[1]) + ",";
    out += format_double(u[j]) + "," + format_double(v[j]) + "\n";
  }
  return out;
}

Json gcc_report_json(const GccOutcome& g) {
  const GccReport& r = g.report;
  auto witness_json = [](const RayWitness& w) {
    return Json{{"sample_index", w.sample_index},
                {"alpha_index", w.alpha_index},
                {"x", Json::array({w.point.x[0], w.point.x[1]})},
                {"xi", Json::array({w.point.xi[0], w.point.xi[1]})},
                {"alpha", w.alpha},
                {"average", w.average}};
  };
  Json j;
  j["status"] = r.violated() ? "t-GCC violated" : "t-GCC satisfied on the sampled lattice";
  j["violated"] = r.violated();
  j["violation_threshold"] = GccReport::kViolationThreshold;
  j["T_values"] = r.T_values;
  j["alpha_values"] = r.alpha_values;
  j["min_average"] = r.min_average;
  Json argmin = Json::array();
  for (const auto& w : r.argmin) argmin.push_back(witness_json(w));
  j["argmin"] = argmin;
  j["requested_T0"] = r.requested_T0;
  j["estimated_C"] = r.estimated_C;
  j["estimated_C_T"] = r.T_values.at(r.estimated_C_index);
  j["witness"] = witness_json(r.witness());
  j["target_C"] = g.target_C;
  j["attained_T0"] = g.attained_T0 ? Json(*g.attained_T0) : Json("not attained");
  j["n_pos"] = g.n_pos;
  j["n_dir"] = g.n_dir;
  j["n_samples"] = r.n_samples;
  j["dt_quad"] = r.dt_quad;
  return j;
}

std::string min_average_csv(const GccOutcome& g) {
  const GccReport& r = g.report;
  std::string out = "T,min_average,x0,x1,xi0,xi1,alpha\n";
  for (std::size_t i = 0; i < r.T_values.size(); ++i) {
    const auto& w = r.argmin[i];
    for (double x : {r.T_values[i], r.min_average[i], w.point.x[0], w.point.x[1], w.point.xi[0], w.point.xi[1]}) {
      out += format_double(x) + ",";
    }
    out += format_double(w.alpha) + "\n";
  }
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

Json manifest_json(const ScenarioConfig& config, const std::string& command, double wall_time_s) {
  Json j;
  j["tool"] = "dampwave";
  j["version"] = DAMPWAVE_VERSION;
  j["command"] = command;
  j["scenario"] = config.scenario;
  j["config_sha256"] = sha256_hex(physics_json(config).dump());
  j["config"] = physics_json(config);
  j["fft_backend"] = fft_backend_version();
  j["compiler"] = __VERSION__;
  j["wall_time_s"] = wall_time_s;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace dampwave::cli

#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "config.hpp"
#include "dampwave/analysis.hpp"
#include "dampwave/error.hpp"
#include "io.hpp"

namespace dampwave::cli {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 80.0, kRight = 30.0, kTop = 40.0, kBottom = 60.0;
constexpr std::size_t kMaxPoints = 2000;

std::string f2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string g3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

Frame frame_for(const std::vector<double>& xs, const std::vector<double>& ys) {
  Frame f{*std::min_element(xs.begin(), xs.end()), *std::max_element(xs.begin(), xs.end()),
          *std::min_element(ys.begin(), ys.end()), *std::max_element(ys.begin(), ys.end())};
  if (f.x1 <= f.x0) f.x1 = f.x0 + 1.0;
  if (f.y1 - f.y0 < 1e-12 * std::max(1.0, std::abs(f.y0))) {
    f.y0 -= 0.5;
    f.y1 += 0.5;
  }
  const double pad = 0.05 * (f.y1 - f.y0);
  f.y0 -= pad;
  f.y1 += pad;
  return f;
}

std::string axes(const Frame& f, const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  std::string s;
  s += "<rect x=\"" + f2(kLeft) + "\" y=\"" + f2(kTop) + "\" width=\"" + f2(kWidth - kLeft - kRight) + "\" height=\"" +
       f2(kHeight - kTop - kBottom) + "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<text x=\"" + f2(f.px(x)) + "\" y=\"" + f2(kHeight - kBottom + 18) + "\" text-anchor=\"middle\">" + g3(x) + "</text>\n";
    s += "<text x=\"" + f2(kLeft - 8) + "\" y=\"" + f2(f.py(y) + 4) + "\" text-anchor=\"end\">" + g3(y) + "</text>\n";
  }
  s += "<text x=\"" + f2(kWidth / 2) + "\" y=\"" + f2(kTop - 15) + "\" text-anchor=\"middle\">" + title + "</text>\n";
  s += "<text x=\"" + f2(kWidth / 2) + "\" y=\"" + f2(kHeight - 15) + "\" text-anchor=\"middle\">" + xlabel + "</text>\n";
  s += "<text x=\"20\" y=\"" + f2(kHeight / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + f2(kHeight / 2) +
       ")\">" + ylabel + "</text>\n";
  return s;
}

std::string polyline(const Frame& f, const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::string& cls, const std::string& colour) {
  const std::size_t stride = std::max<std::size_t>(1, (xs.size() + kMaxPoints - 1) / kMaxPoints);
  std::string pts;
  for (std::size_t i = 0; i < xs.size(); i += stride) pts += f2(f.px(xs[i])) + "," + f2(f.py(ys[i])) + " ";
  if ((xs.size() - 1) % stride != 0) pts += f2(f.px(xs.back())) + "," + f2(f.py(ys.back())) + " ";
  pts.pop_back();
  return "<polyline class=\"" + cls + "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
}

std::string document(const std::string& body) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f2(kWidth) + "\" height=\"" + f2(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n" + body +
         "</svg>\n";
}

std::string trace_svg(const EnergyTrace& tr) {
  if (tr.empty()) throw IoError("empty trace");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.energy[i] > 1e-300 && std::isfinite(tr.energy[i])) {
      xs.push_back(tr.times[i]);
      ys.push_back(std::log10(tr.energy[i]));
    }
  }
  if (xs.empty()) throw IoError("empty trace: no positive energy samples");

  std::string body;
  std::string fit_svg;
  const Frame f = frame_for(xs, ys);
  try {
    const DecayFit fit = fit_decay_rate(tr, tr.times.front(), tr.times.back());
    const double log0 = std::log10(fit.C * tr.energy.front());
    const auto line_y = [&](double t) { return log0 - fit.c * t / std::log(10.0); };
    const double ta = xs.front(), tb = xs.back();
    fit_svg += "<line class=\"fit\" id=\"fitted-line\" x1=\"" + f2(f.px(ta)) + "\" y1=\"" + f2(f.py(line_y(ta))) + "\" x2=\"" +
               f2(f.px(tb)) + "\" y2=\"" + f2(f.py(line_y(tb))) + "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
    fit_svg += "<text class=\"fit-annotation\" x=\"" + f2(kWidth - kRight - 10) + "\" y=\"" + f2(kTop + 20) +
               "\" text-anchor=\"end\">c = " + g3(fit.c) + ", r² = " + g3(fit.r_squared) + "</text>\n";
  } catch (const InsufficientData&) {
  } catch (const UnderflowError&) {
  }
  body += axes(f, "energy decay", "t", "log10 E");
  body += polyline(f, xs, ys, "energy", "#1f77b4");
  body += fit_svg;
  return document(body);
}

std::string gcc_svg(const Json& j) {
  const auto Ts = j.at("T_values").get<std::vector<double>>();
  const auto mins = j.at("min_average").get<std::vector<double>>();
  if (Ts.empty() || Ts.size() != mins.size()) throw IoError("gcc report has no T values");
  const Frame f = frame_for(Ts, mins);
  std::string body = axes(f, j.value("status", std::string("ray averages")), "T", "min average of W");
  body += polyline(f, Ts, mins, "min-average", "#2ca02c");
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    body += "<circle cx=\"" + f2(f.px(Ts[i])) + "\" cy=\"" + f2(f.py(mins[i])) + "\" r=\"3\" fill=\"#2ca02c\"/>\n";
  }
  return document(body);
}

}  // namespace

std::string render_svg(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw IoError("empty trace");
  if (text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw IoError(std::string("unreadable report: ") + e.what());
    }
    if (!j.contains("min_average") || !j.contains("T_values")) throw IoError("not a gcc report");
    try {
      return gcc_svg(j);
    } catch (const Json::exception& e) {
      throw IoError(std::string("malformed gcc report: ") + e.what());
    }
  }
  return trace_svg(parse_trace_csv(text));
}

}  // namespace dampwave::cli

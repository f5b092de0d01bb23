#pragma once
// CSV, JSON and SVG writers for sweep records.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixfid/fits.hpp"
#include "mixfid/harness/sweep.hpp"

namespace mixfid::harness {

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "model", "n", "N", "q", "eta", "chi_F", "chi_norm", "lower_bound", "upper_bound", "M_F", "D_eff",
      "xi", "gamma", "proxy_L1", "proxy_L2", "proxy_L3", "proxy_L4", "gap_min", "seconds"};
  return cols;
}

/// 12 significant digits; nan, inf and -inf spelled out.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  const auto& cols = csv_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const auto& r : records) {
    os << r.model << ',' << r.n << ',' << r.N << ',' << format_real(r.q) << ',' << r.eta;
    for (double v : {r.chi_F, r.chi_norm, r.lower_bound, r.upper_bound, r.M_F, r.D_eff, r.xi, r.gamma}) {
      os << ',' << format_real(v);
    }
    for (double v : r.proxy_L) os << ',' << format_real(v);
    os << ',' << format_real(r.gap_min) << ',' << format_real(r.seconds) << '\n';
  }
}

namespace detail {

// JSON has no nan/inf; they become null and the strings "inf" / "-inf".
inline nlohmann::json json_real(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace detail

inline nlohmann::json to_json(const SweepRecord& r) {
  using detail::json_real;
  nlohmann::json j;
  j["model"] = r.model;
  j["n"] = r.n;
  j["N"] = r.N;
  j["q"] = json_real(r.q);
  j["eta"] = r.eta;
  j["chi_F"] = json_real(r.chi_F);
  j["chi_norm"] = json_real(r.chi_norm);
  j["lower_bound"] = json_real(r.lower_bound);
  j["upper_bound"] = json_real(r.upper_bound);
  j["M_F"] = json_real(r.M_F);
  j["D_eff"] = json_real(r.D_eff);
  j["xi"] = json_real(r.xi);
  j["gamma"] = json_real(r.gamma);
  j["proxy_L"] = nlohmann::json::array();
  for (double v : r.proxy_L) j["proxy_L"].push_back(json_real(v));
  j["gap_min"] = json_real(r.gap_min);
  j["seconds"] = r.seconds;
  j["chi_numeric"] = json_real(r.chi_numeric);
  if (!r.correlators.empty()) {
    auto& arr = j["correlators"] = nlohmann::json::array();
    for (const auto& c : r.correlators) {
      arr.push_back({{"i", c.i},
                     {"j", c.j},
                     {"distance", c.distance},
                     {"fidelity", json_real(c.fidelity_corr)},
                     {"linear_re", json_real(c.linear_corr.real())},
                     {"linear_im", json_real(c.linear_corr.imag())},
                     {"renyi2_bare", json_real(c.renyi2_bare)},
                     {"renyi2_normalized", json_real(c.renyi2_normalized)}});
    }
  }
  return j;
}

inline void write_json(std::ostream& os, const std::vector<SweepRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  os << arr.dump(2) << '\n';
}

namespace detail {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> pts;
};

struct Panel {
  std::string title, xlabel;
  bool log_axes = false;
  std::vector<Series> series;
  std::vector<std::string> notes;
};

inline std::string svg_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

inline void draw_panel(std::ostream& os, const Panel& p, double x0, double y0, double w, double h) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};
  auto tx = [&](double v) { return p.log_axes ? std::log10(v) : v; };
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : p.series)
    for (auto [x, y] : s.pts) {
      xmin = std::min(xmin, tx(x));
      xmax = std::max(xmax, tx(x));
      ymin = std::min(ymin, tx(y));
      ymax = std::max(ymax, tx(y));
    }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double pad = 50.0;
  auto px = [&](double x) { return x0 + pad + (tx(x) - xmin) / (xmax - xmin) * (w - 2 * pad); };
  auto py = [&](double y) { return y0 + h - pad - (tx(y) - ymin) / (ymax - ymin) * (h - 2 * pad); };
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#888\"/>\n",
                x0 + pad, y0 + pad, w - 2 * pad, h - 2 * pad);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"14\">", x0 + pad, y0 + pad - 12);
  os << buf << svg_escape(p.title) << "</text>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">", x0 + w / 2, y0 + h - 12);
  os << buf << svg_escape(p.xlabel) << "</text>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\">%s</text>\n", x0 + pad,
                y0 + h - pad + 14, format_real(p.log_axes ? std::pow(10.0, xmin) : xmin).c_str());
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\">%s</text>\n", x0 + w - pad - 20,
                y0 + h - pad + 14, format_real(p.log_axes ? std::pow(10.0, xmax) : xmax).c_str());
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\">%s</text>\n", x0 + 4,
                y0 + h - pad, format_real(p.log_axes ? std::pow(10.0, ymin) : ymin).c_str());
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\">%s</text>\n", x0 + 4, y0 + pad + 8,
                format_real(p.log_axes ? std::pow(10.0, ymax) : ymax).c_str());
  os << buf;
  for (std::size_t s = 0; s < p.series.size(); ++s) {
    const char* col = colors[s % 7];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : p.series[s].pts) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
      os << buf;
    }
    os << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"%s\">", x0 + w - pad + 4,
                  y0 + pad + 14.0 * static_cast<double>(s + 1), col);
    os << buf << svg_escape(p.series[s].label) << "</text>\n";
  }
  for (std::size_t k = 0; k < p.notes.size(); ++k) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\">", x0 + pad + 8,
                  y0 + pad + 16.0 * static_cast<double>(k + 1));
    os << buf << svg_escape(p.notes[k]) << "</text>\n";
  }
}

}  // namespace detail

/// chi_F against N (log-log, one line per q, alpha annotated) and against q (one line per N).
inline void write_svg(std::ostream& os, const std::vector<SweepRecord>& records) {
  std::map<double, detail::Series> by_q;  // nan q keyed as -1
  std::map<int, detail::Series> by_n;
  for (const auto& r : records) {
    if (!(r.chi_F > 0.0)) continue;
    const double key = std::isnan(r.q) ? -1.0 : r.q;
    auto& s = by_q[key];
    s.label = std::isnan(r.q) ? r.model : "q=" + format_real(r.q);
    s.pts.emplace_back(r.N, r.chi_F);
    if (!std::isnan(r.q)) {
      auto& t = by_n[r.N];
      t.label = "N=" + std::to_string(r.N);
      t.pts.emplace_back(r.q, r.chi_F);
    }
  }
  detail::Panel left{"chi_F vs N", "N (log)", true, {}, {}};
  for (auto& [q, s] : by_q) {
    std::sort(s.pts.begin(), s.pts.end());
    if (s.pts.size() >= 3) {
      const ScalingFit f = classify_scaling(s.pts);
      char alpha[32];
      std::snprintf(alpha, sizeof alpha, "%.3g", std::abs(f.alpha) < 1e-12 ? 0.0 : f.alpha);
      left.notes.push_back(s.label + ": alpha=" + alpha + " (" + std::string(to_string(f.label)) + ")");
    }
    left.series.push_back(s);
  }
  detail::Panel right{"chi_F vs q", "q", false, {}, {}};
  for (auto& [n, s] : by_n) {
    std::sort(s.pts.begin(), s.pts.end());
    right.series.push_back(s);
  }
  const bool two = !right.series.empty();
  const double w = 520.0, h = 400.0;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (two ? 2 * w : w) << "\" height=\"" << h
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  detail::draw_panel(os, left, 0.0, 0.0, w, h);
  if (two) detail::draw_panel(os, right, w, 0.0, w, h);
  os << "</svg>\n";
}

/// Writes <dir>/<stem>.<format> for each format. Nothing is written for an empty list.
inline std::vector<std::string> emit(const std::vector<SweepRecord>& records, const std::string& dir,
                                     const std::vector<std::string>& formats, const std::string& stem = "sweep") {
  if (records.empty()) throw InvalidArgument("emit: no records to write");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("emit: cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  for (const auto& fmt : formats) {
    std::ostringstream buf;
    if (fmt == "csv") write_csv(buf, records);
    else if (fmt == "json") write_json(buf, records);
    else if (fmt == "svg") write_svg(buf, records);
    else throw InvalidArgument("emit: unknown format '" + fmt + "'");
    const std::string path = (std::filesystem::path(dir) / (stem + "." + fmt)).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("emit: cannot open '" + path + "' for writing");
    f << buf.str();
    f.close();
    if (!f) throw IoError("emit: write to '" + path + "' failed");
    written.push_back(path);
  }
  return written;
}

}  // namespace mixfid::harness

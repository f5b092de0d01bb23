#pragma once
// Decay-law and scaling-exponent fits by log-linear least squares.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixfid/observables.hpp"

namespace mixfid {

inline constexpr double kPositivityFloor = 1e-14;

enum class DecayModel { exponential, algebraic };

struct DecayFit {
  DecayModel model = DecayModel::exponential;
  double xi = std::numeric_limits<double>::quiet_NaN();     // exponential
  double gamma = std::numeric_limits<double>::quiet_NaN();  // algebraic
  double r_min = 0.0;
  double r_max = 0.0;
  double residual = 0.0;  // RMS residual of the log fit
  bool long_range = false;  // correlator does not decay; xi = inf or gamma = 0
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidArgument("least_squares_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("least_squares_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = y[k] - (f.intercept + f.slope * x[k]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / static_cast<double>(n));
  return f;
}

/// Fits the fidelity correlator against distance. Records with r = 0 or with
/// correlator <= 1e-14 are ignored; values at equal distance are averaged.
/// r_max <= 0 means no upper window limit.
inline DecayFit fit_decay(const std::vector<CorrelatorRecord>& records, DecayModel model,
                          double r_max = 0.0) {
  std::map<double, std::pair<double, int>> by_r;
  for (const auto& rec : records) {
    if (rec.distance <= 0.0) continue;
    if (r_max > 0.0 && rec.distance > r_max + 1e-12) continue;
    if (!(rec.fidelity_corr > kPositivityFloor)) continue;
    auto& slot = by_r[rec.distance];
    slot.first += rec.fidelity_corr;
    slot.second += 1;
  }
  if (by_r.size() < 3) {
    throw NoSignal("fit_decay: only " + std::to_string(by_r.size()) +
                   " distances carry a correlator above 1e-14; need 3");
  }
  std::vector<double> x, y;
  for (const auto& [r, acc] : by_r) {
    x.push_back(model == DecayModel::exponential ? r : std::log(r));
    y.push_back(std::log(acc.first / acc.second));
  }
  const LineFit lf = least_squares_line(x, y);
  DecayFit fit;
  fit.model = model;
  fit.r_min = by_r.begin()->first;
  fit.r_max = by_r.rbegin()->first;
  fit.residual = lf.rms;
  const double flat = 1e-12;
  if (model == DecayModel::exponential) {
    if (lf.slope >= -flat) {
      fit.long_range = true;
      fit.xi = std::numeric_limits<double>::infinity();
    } else {
      fit.xi = -1.0 / lf.slope;
    }
  } else {
    if (lf.slope >= -flat) {
      fit.long_range = true;
      fit.gamma = 0.0;
    } else {
      fit.gamma = -lf.slope;
    }
  }
  return fit;
}

enum class ScalingLabel { src_like, intermediate, ssb_like };

inline std::string_view to_string(ScalingLabel l) {
  switch (l) {
    case ScalingLabel::src_like: return "SRC-like";
    case ScalingLabel::intermediate: return "intermediate";
    case ScalingLabel::ssb_like: return "SSB-like";
  }
  return "?";
}

struct ScalingFit {
  double alpha = 0.0;
  double residual = 0.0;
  ScalingLabel label = ScalingLabel::intermediate;
};

/// chi_F ~ N^alpha from (N, chi_F) pairs.
inline ScalingFit classify_scaling(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) {
    throw InvalidArgument("classify_scaling: need at least 3 system sizes, got " +
                          std::to_string(points.size()));
  }
  std::vector<double> x, y;
  for (auto [n, chi] : points) {
    if (!(n > 0.0) || !(chi > 0.0)) throw InvalidArgument("classify_scaling: N and chi_F must be positive");
    x.push_back(std::log(n));
    y.push_back(std::log(chi));
  }
  const LineFit lf = least_squares_line(x, y);
  ScalingFit out;
  out.alpha = lf.slope;
  out.residual = lf.rms;
  out.label = lf.slope > 0.9 ? ScalingLabel::ssb_like
              : lf.slope < 0.1 ? ScalingLabel::src_like
                               : ScalingLabel::intermediate;
  return out;
}

}  // namespace mixfid

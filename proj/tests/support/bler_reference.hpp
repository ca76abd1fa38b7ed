#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

// Tabulated link-level BLER-vs-SNR reference points for the modulation and
// code-rate pairs the shipped MCS table uses. The decode thresholds in the
// table must sit at the 10% BLER crossing of these curves.
namespace oracle {

struct BlerCurve {
  int modulation_order;
  double code_rate;
  // (snr_db, bler) samples, ascending snr
  std::vector<std::pair<double, double>> points;
};

inline const std::vector<BlerCurve>& reference_curves() {
  static const std::vector<BlerCurve> curves = {
      {2, 0.51, {{2.0, 0.999}, {3.0, 0.90}, {4.0, 0.45}, {5.0, 0.10}, {6.0, 0.008}}},
      {4, 0.52, {{8.0, 0.995}, {9.0, 0.85}, {10.0, 0.40}, {11.0, 0.10}, {12.0, 0.010}}},
  };
  return curves;
}

// SNR at the requested BLER by log-domain interpolation.
inline double snr_at_bler(const BlerCurve& c, double target) {
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const auto [s0, b0] = c.points[i - 1];
    const auto [s1, b1] = c.points[i];
    if ((b0 >= target && b1 <= target)) {
      const double l0 = std::log10(b0), l1 = std::log10(b1), lt = std::log10(target);
      return s0 + (s1 - s0) * (lt - l0) / (l1 - l0);
    }
  }
  throw std::runtime_error("bler target outside the tabulated curve");
}

inline const BlerCurve& curve_for(int modulation_order, double code_rate) {
  for (const auto& c : reference_curves())
    if (c.modulation_order == modulation_order && std::abs(c.code_rate - code_rate) < 1e-9)
      return c;
  throw std::runtime_error("no reference curve for this modulation/code-rate pair");
}

}  // namespace oracle

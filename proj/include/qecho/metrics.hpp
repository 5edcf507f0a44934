#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

#include "qecho/errors.hpp"
#include "qecho/polarization.hpp"

namespace qecho {

struct EchoPeak {
  double time = 0.0;
  double value = 0.0;  // |P(t)| / N at the peak sample
};

struct ErrorReport {
  double l2 = 0.0;
  double rel_peak = 0.0;
  double peak_time_ref = 0.0;
  double peak_time_model = 0.0;
  double peak_value_ref = 0.0;
  double peak_value_model = 0.0;
};

namespace detail {

inline void require_comparable(const PolarizationTrace& a,
                               const PolarizationTrace& b) {
  if (!(a.grid == b.grid)) throw ConfigError("metrics: traces use different time grids");
  if (a.ensemble_count != b.ensemble_count) {
    throw ConfigError("metrics: traces use different ensemble sizes");
  }
  if (a.values.size() != b.values.size()) {
    throw ConfigError("metrics: traces have different sample counts");
  }
}

}  // namespace detail

// Trapezoid integral of |ref_normalized - model_normalized|^2 over the full
// grid. Symmetric in its arguments.
inline double l2_error(const PolarizationTrace& ref, const PolarizationTrace& model) {
  detail::require_comparable(ref, model);
  const std::size_t n = ref.values.size();
  double acc = 0.0;
  double prev = std::norm(ref.normalized(0) - model.normalized(0));
  for (std::size_t k = 1; k < n; ++k) {
    const double cur = std::norm(ref.normalized(k) - model.normalized(k));
    acc += 0.5 * (prev + cur) * ref.grid.step_width(k - 1);
    prev = cur;
  }
  return acc;
}

// Largest |P|/N over grid samples inside [window_lo, window_hi]; ties keep
// the earliest sample.
inline EchoPeak find_echo_peak(const PolarizationTrace& trace, double window_lo,
                               double window_hi) {
  if (!(window_lo < window_hi)) {
    throw ConfigError("echo peak: window must satisfy lo < hi");
  }
  const double tol = 1e-9;
  const double lo = window_lo - tol * std::max(1.0, std::abs(window_lo));
  const double hi = window_hi + tol * std::max(1.0, std::abs(window_hi));
  bool found = false;
  EchoPeak peak;
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    const double t = trace.grid.time(k);
    if (t < lo || t > hi) continue;
    const double v = std::abs(trace.normalized(k));
    if (!found || v > peak.value) {
      peak = {t, v};
      found = true;
    }
  }
  if (!found) throw ConfigError("echo peak: window contains no grid samples");
  return peak;
}

// |S_ref - S_model| / S_ref on the window peaks of |P|/N. The peaks of the
// two traces are located independently.
inline double relative_peak_error(const PolarizationTrace& ref,
                                  const PolarizationTrace& model,
                                  double window_lo, double window_hi) {
  detail::require_comparable(ref, model);
  const EchoPeak pr = find_echo_peak(ref, window_lo, window_hi);
  const EchoPeak pm = find_echo_peak(model, window_lo, window_hi);
  if (!(pr.value > 0.0)) throw NumericalError("relative peak error: reference peak is zero");
  return std::abs(pr.value - pm.value) / pr.value;
}

inline ErrorReport make_error_report(const PolarizationTrace& ref,
                                     const PolarizationTrace& model,
                                     double window_lo, double window_hi) {
  detail::require_comparable(ref, model);
  const EchoPeak pr = find_echo_peak(ref, window_lo, window_hi);
  const EchoPeak pm = find_echo_peak(model, window_lo, window_hi);
  if (!(pr.value > 0.0)) throw NumericalError("relative peak error: reference peak is zero");
  ErrorReport report;
  report.l2 = l2_error(ref, model);
  report.rel_peak = std::abs(pr.value - pm.value) / pr.value;
  report.peak_time_ref = pr.time;
  report.peak_time_model = pm.time;
  report.peak_value_ref = pr.value;
  report.peak_value_model = pm.value;
  return report;
}

}  // namespace qecho

#pragma once

#include <cmath>
#include <cstddef>

#include "qecho/errors.hpp"

namespace qecho {

// Uniform output grid t_k = t_start + k*dt covering [t_start, t_end]. When dt
// does not divide the span, one shortened final step lands exactly on t_end.
// Sample times are computed from k directly, never by accumulation.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, double dt)
      : t_start_(t_start), t_end_(t_end), dt_(dt) {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !std::isfinite(dt)) {
      throw ConfigError("time grid: bounds and dt must be finite");
    }
    if (!(dt > 0.0)) throw ConfigError("time grid: dt must be positive");
    if (!(t_end > t_start)) throw ConfigError("time grid: t_end must exceed t_start");
    const double steps = (t_end - t_start) / dt;
    const double rounded = std::round(steps);
    if (rounded >= 1.0 && std::abs(steps - rounded) <= 1e-9 * std::max(1.0, rounded)) {
      full_steps_ = static_cast<std::size_t>(rounded);
      partial_ = false;
    } else {
      full_steps_ = static_cast<std::size_t>(std::floor(steps));
      partial_ = true;
    }
  }

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double dt() const { return dt_; }

  std::size_t samples() const { return full_steps_ + (partial_ ? 2 : 1); }
  bool has_partial_step() const { return partial_; }

  double time(std::size_t k) const {
    return k <= full_steps_ ? t_start_ + static_cast<double>(k) * dt_ : t_end_;
  }

  double step_width(std::size_t k) const { return time(k + 1) - time(k); }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.t_start_ == b.t_start_ && a.t_end_ == b.t_end_ && a.dt_ == b.dt_;
  }

 private:
  double t_start_;
  double t_end_;
  double dt_;
  std::size_t full_steps_;
  bool partial_;
};

}  // namespace qecho

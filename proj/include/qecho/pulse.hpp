#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "qecho/errors.hpp"

namespace qecho {

inline constexpr double kFourLn2 = 4.0 * std::numbers::ln2;

// One Gaussian control pulse. `duration` is the full width at half maximum of
// the Rabi envelope in ps; `area` is the time integral of the envelope in rad.
struct Pulse {
  double center = 0.0;
  double duration = 1.0;
  double area = 0.0;
};

// Peak Rabi frequency that makes exp(-4 ln2 ((t-c)/d)^2) integrate to `area`.
inline double pulse_amplitude(const Pulse& p) {
  return p.area / (p.duration * std::sqrt(std::numbers::pi / kFourLn2));
}

class PulseSequence {
 public:
  PulseSequence() = default;
  explicit PulseSequence(const std::vector<Pulse>& pulses) {
    for (const Pulse& p : pulses) add(p);
  }

  void add(const Pulse& p) {
    if (!(p.duration > 0.0) || !std::isfinite(p.duration) ||
        !std::isfinite(p.center) || !std::isfinite(p.area)) {
      throw ConfigError("pulse: duration must be positive and all fields finite");
    }
    pulses_.push_back(p);
  }

  const std::vector<Pulse>& pulses() const { return pulses_; }
  bool empty() const { return pulses_.empty(); }

  // Sum of the Gaussian envelopes. Each term is cut to exactly zero beyond
  // eight durations from its center, where its relative amplitude is < 1e-77,
  // so envelopes vanish identically between well-separated pulses.
  double rabi(double t) const {
    double omega = 0.0;
    for (const Pulse& p : pulses_) {
      const double u = t - p.center;
      if (std::abs(u) > 8.0 * p.duration) continue;
      const double s = u / p.duration;
      omega += pulse_amplitude(p) * std::exp(-kFourLn2 * s * s);
    }
    return omega;
  }

  double min_duration() const {
    double d = std::numeric_limits<double>::infinity();
    for (const Pulse& p : pulses_) d = std::min(d, p.duration);
    return d;
  }

 private:
  std::vector<Pulse> pulses_;
};

inline double rabi_frequency(const PulseSequence& seq, double t) {
  return seq.rabi(t);
}

}  // namespace qecho

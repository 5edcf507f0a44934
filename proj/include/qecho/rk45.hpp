#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qecho/errors.hpp"
#include "qecho/time_grid.hpp"
#include "qecho/tls_state.hpp"

namespace qecho {

struct Rk45Options {
  double rtol = 1e-8;
  double atol = 1e-11;
  double max_step = std::numeric_limits<double>::infinity();
};

namespace detail {

using Vec4 = std::array<double, 4>;

inline Vec4 to_vec(const TlsState& x) { return {x.p_re, x.p_im, x.n_re, x.n_im}; }
inline TlsState to_state(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

// Dormand-Prince 5(4) coefficients.
inline constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0,
                        kC5 = 8.0 / 9.0;
inline constexpr double kA21 = 1.0 / 5.0;
inline constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
inline constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
inline constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                        kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
inline constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                        kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                        kA65 = -5103.0 / 18656.0;
inline constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0,
                        kB4 = 125.0 / 192.0, kB5 = -2187.0 / 6784.0,
                        kB6 = 11.0 / 84.0;
// Difference between the 5th and the embedded 4th order weights.
inline constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                        kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                        kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
// Quartic dense-output weights.
inline constexpr double kD1 = -12715105075.0 / 11282082432.0,
                        kD3 = 87487479700.0 / 32700410799.0,
                        kD4 = -10690763975.0 / 1880347072.0,
                        kD5 = 701980252875.0 / 199316789632.0,
                        kD6 = -1453857185.0 / 822651844.0,
                        kD7 = 69997945.0 / 29380423.0;

inline double error_norm(const Vec4& err, const Vec4& y0, const Vec4& y1,
                         const Rk45Options& opt) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double scale =
        std::max(opt.atol, opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i])));
    const double r = err[i] / scale;
    acc += r * r;
  }
  return std::sqrt(acc / 4.0);
}

template <class Rhs>
double initial_step(double t, const Vec4& y, const Vec4& f1, Rhs&& rhs,
                    const Rk45Options& opt, double span) {
  auto scaled_norm = [&](const Vec4& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double scale = std::max(opt.atol, opt.rtol * std::abs(y[i]));
      const double r = v[i] / scale;
      acc += r * r;
    }
    return std::sqrt(acc / 4.0);
  };
  const double d0 = scaled_norm(y);
  const double d1 = scaled_norm(f1);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min({h0, span, opt.max_step});
  Vec4 y1;
  for (std::size_t i = 0; i < 4; ++i) y1[i] = y[i] + h0 * f1[i];
  const Vec4 f2 = rhs(t + h0, y1);
  Vec4 df;
  for (std::size_t i = 0; i < 4; ++i) df[i] = f2[i] - f1[i];
  const double d2 = scaled_norm(df) / h0;
  double h1;
  if (std::max(d1, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
  }
  return std::min({100.0 * h0, h1, span, opt.max_step});
}

}  // namespace detail

// Adaptive Dormand-Prince 5(4) solve sampled on the grid through the quartic
// dense-output interpolant; integration steps are independent of the grid
// spacing. Componentwise error control against max(atol, rtol*|x|); a step
// size below 1e-14 ps is reported as an integration failure.
template <class OmegaFn, class Sink>
void rk45_solve_into(const TlsState& x0, const TimeGrid& tg, OmegaFn&& omega,
                     double delta, const Rk45Options& opt, Sink&& sink) {
  using detail::Vec4;
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0) || !(opt.max_step > 0.0)) {
    throw ConfigError("rk45: tolerances and max_step must be positive");
  }
  auto rhs = [&](double t, const Vec4& y) -> Vec4 {
    const TlsState d = obe_rhs(detail::to_state(y), omega(t), delta);
    return detail::to_vec(d);
  };

  const std::size_t n = tg.samples();
  const double t_end = tg.t_end();
  double t = tg.t_start();
  Vec4 y = detail::to_vec(x0);
  sink(std::size_t{0}, x0);
  std::size_t next = 1;
  if (next >= n) return;

  Vec4 k1 = rhs(t, y);
  double h = detail::initial_step(t, y, k1, rhs, opt, t_end - t);
  bool rejected = false;

  while (next < n) {
    h = std::min(h, opt.max_step);
    if (t + h > t_end) h = t_end - t;
    if (!(h >= 1e-14)) {
      throw IntegrationError("rk45: step size underflow at t = " + std::to_string(t), t);
    }

    using namespace detail;
    Vec4 k2, k3, k4, k5, k6, k7, y1, ytmp;
    for (std::size_t i = 0; i < 4; ++i) ytmp[i] = y[i] + h * kA21 * k1[i];
    k2 = rhs(t + kC2 * h, ytmp);
    for (std::size_t i = 0; i < 4; ++i)
      ytmp[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
    k3 = rhs(t + kC3 * h, ytmp);
    for (std::size_t i = 0; i < 4; ++i)
      ytmp[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
    k4 = rhs(t + kC4 * h, ytmp);
    for (std::size_t i = 0; i < 4; ++i)
      ytmp[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
    k5 = rhs(t + kC5 * h, ytmp);
    for (std::size_t i = 0; i < 4; ++i)
      ytmp[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                            kA64 * k4[i] + kA65 * k5[i]);
    k6 = rhs(t + h, ytmp);
    for (std::size_t i = 0; i < 4; ++i)
      y1[i] = y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] + kB5 * k5[i] +
                          kB6 * k6[i]);
    k7 = rhs(t + h, y1);

    Vec4 err;
    for (std::size_t i = 0; i < 4; ++i)
      err[i] = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] +
                    kE6 * k6[i] + kE7 * k7[i]);
    const double norm = detail::error_norm(err, y, y1, opt);

    if (norm <= 1.0) {
      const double t_new = t + h;
      // Quartic interpolant over [t, t+h]; exact at both endpoints.
      Vec4 r1, r2, r3, r4, r5;
      for (std::size_t i = 0; i < 4; ++i) {
        r1[i] = y[i];
        r2[i] = y1[i] - y[i];
        r3[i] = h * k1[i] - r2[i];
        r4[i] = r2[i] - h * k7[i] - r3[i];
        r5[i] = h * (kD1 * k1[i] + kD3 * k3[i] + kD4 * k4[i] + kD5 * k5[i] +
                     kD6 * k6[i] + kD7 * k7[i]);
      }
      const double emit_tol = 1e-9 * std::max(1.0, std::abs(t_new));
      while (next < n && tg.time(next) <= t_new + emit_tol) {
        const double theta = std::clamp((tg.time(next) - t) / h, 0.0, 1.0);
        const double theta1 = 1.0 - theta;
        Vec4 ys;
        for (std::size_t i = 0; i < 4; ++i) {
          ys[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
        sink(next, detail::to_state(ys));
        ++next;
      }
      t = t_new;
      y = y1;
      k1 = k7;
      double fac = (norm == 0.0) ? 10.0 : 0.9 * std::pow(norm, -0.2);
      fac = std::clamp(fac, 0.2, rejected ? 1.0 : 10.0);
      h *= fac;
      rejected = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
      rejected = true;
    }
  }
}

template <class OmegaFn>
std::vector<TlsState> rk45_solve(const TlsState& x0, const TimeGrid& tg,
                                 OmegaFn&& omega, double delta,
                                 const Rk45Options& opt = {}) {
  std::vector<TlsState> series;
  series.reserve(tg.samples());
  rk45_solve_into(x0, tg, std::forward<OmegaFn>(omega), delta, opt,
                  [&series](std::size_t, const TlsState& x) { series.push_back(x); });
  return series;
}

}  // namespace qecho

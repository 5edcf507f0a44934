#pragma once

namespace qecho {

// State of one two-level system as a real 4-vector: microscopic polarization
// p = p_re + i p_im and occupation n = n_re + i n_im. Physical states keep
// n_im = 0; the component is carried so the control-affine dynamics act on a
// fixed real vector space.
struct TlsState {
  double p_re = 0.0;
  double p_im = 0.0;
  double n_re = 0.0;
  double n_im = 0.0;
};

inline TlsState operator+(const TlsState& a, const TlsState& b) {
  return {a.p_re + b.p_re, a.p_im + b.p_im, a.n_re + b.n_re, a.n_im + b.n_im};
}

inline TlsState operator-(const TlsState& a, const TlsState& b) {
  return {a.p_re - b.p_re, a.p_im - b.p_im, a.n_re - b.n_re, a.n_im - b.n_im};
}

inline TlsState operator*(double s, const TlsState& a) {
  return {s * a.p_re, s * a.p_im, s * a.n_re, s * a.n_im};
}

// Rotating-wave optical Bloch equations under the control (omega, delta):
//   dp/dt = -i delta p + (i/2) omega (1 - 2n)
//   dn/dt = omega Im(p)
// A resonant pulse of area Theta therefore drives the ground state to
// n = sin^2(Theta/2). The right-hand side is affine in the state and affine
// in each control component.
inline TlsState obe_rhs(const TlsState& x, double omega, double delta) {
  return {delta * x.p_im + omega * x.n_im,
          -delta * x.p_re + 0.5 * omega * (1.0 - 2.0 * x.n_re),
          omega * x.p_im,
          0.0};
}

// Conserved by obe_rhs for physical states: 4|p|^2 + (1-2n)^2 = 1 on the
// Bloch sphere.
inline double bloch_invariant(const TlsState& x) {
  const double w = 1.0 - 2.0 * x.n_re;
  return 4.0 * (x.p_re * x.p_re + x.p_im * x.p_im) + w * w;
}

}  // namespace qecho

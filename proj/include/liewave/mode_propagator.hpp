#pragma once

// Exact solution of the per-mode damped oscillator
//
//   c'' + b c' + (mu + m2) c = 0,   mu = (lambda_xi^2)^alpha,
//
// written with the even/odd phi-functions of disc = b^2/4 - mu - m2:
//   A0(t) = Psi(disc t^2),  A1(t) = t Phi(disc t^2),
//   Psi(z) = sum z^k/(2k)!, Phi(z) = sum z^k/(2k+1)!,
// so that A0 = cosh/cos/1 and A1 = sinh(wt)/w, sin(wt)/w, t on the three
// branches and A0 = d/dt A1.

#include <cmath>
#include <complex>
#include <iosfwd>
#include <vector>

#include "liewave/group_harmonics.hpp"

namespace liewave {

struct WaveParams {
  double alpha = 0.5;
  double b = 1.0;
  double m2 = 0.0;
  double p = 2.0;

  // alpha in (0,1], p > 1, b >= 0, m2 >= 0. Throws std::invalid_argument.
  void validate() const;
};

// Below this |disc t^2| the power series is used instead of cosh/sinh.
inline constexpr double kPhiSeriesThreshold = 1e-6;

template <typename Scalar>
struct PhiPair {
  Scalar a0;
  Scalar a1;
};

template <typename Scalar>
Scalar discriminant(Scalar mu, Scalar b, Scalar m2) {
  return b * b / Scalar(4) - mu - m2;
}

namespace detail {

// Psi and Phi truncated after six terms.
template <typename Scalar>
PhiPair<Scalar> phi_series(Scalar t, Scalar z) {
  Scalar psi = 0, phi = 0, term_even = 1, term_odd = 1;
  for (int k = 0; k < 6; ++k) {
    psi += term_even;
    phi += term_odd;
    term_even *= z / Scalar((2 * k + 1) * (2 * k + 2));
    term_odd *= z / Scalar((2 * k + 2) * (2 * k + 3));
  }
  return {psi, t * phi};
}

}  // namespace detail

template <typename Scalar>
PhiPair<Scalar> phi_pair(Scalar t, Scalar disc) {
  using std::abs, std::cos, std::cosh, std::sin, std::sinh, std::sqrt;
  const Scalar z = disc * t * t;
  if (abs(z) < Scalar(kPhiSeriesThreshold)) return detail::phi_series(t, z);
  if (disc > 0) {
    const Scalar w = sqrt(disc);
    return {cosh(w * t), sinh(w * t) / w};
  }
  const Scalar w = sqrt(-disc);
  return {cos(w * t), sin(w * t) / w};
}

// (exp(-b t/2) A0(t), exp(-b t/2) A1(t)) with kappa = mu + m2, evaluated
// without forming cosh(wt) for large wt.
template <typename Scalar>
PhiPair<Scalar> damped_phi_pair(Scalar t, Scalar b, Scalar kappa) {
  using std::abs, std::cos, std::exp, std::expm1, std::sin, std::sqrt;
  const Scalar disc = discriminant(kappa, b, Scalar(0));
  const Scalar z = disc * t * t;
  const Scalar damp = exp(-b * t / Scalar(2));
  if (abs(z) < Scalar(kPhiSeriesThreshold)) {
    auto s = detail::phi_series(t, z);
    return {damp * s.a0, damp * s.a1};
  }
  if (disc > 0) {
    const Scalar w = sqrt(disc);
    // w - b/2 = -kappa / (w + b/2)
    const Scalar slow = exp(-kappa / (w + b / Scalar(2)) * t);
    const Scalar ratio = exp(Scalar(-2) * w * t);
    return {slow * (Scalar(1) + ratio) / Scalar(2),
            slow * (-expm1(Scalar(-2) * w * t)) / (Scalar(2) * w)};
  }
  const Scalar w = sqrt(-disc);
  return {damp * cos(w * t), damp * sin(w * t) / w};
}

template <typename Scalar>
struct ModeValue {
  std::complex<Scalar> c;
  std::complex<Scalar> cdot;
};

template <typename Scalar>
ModeValue<Scalar> evolve_mode(std::complex<Scalar> c0, std::complex<Scalar> c1,
                              Scalar t, Scalar mu, Scalar b, Scalar m2) {
  const Scalar kappa = mu + m2;
  const auto e = damped_phi_pair(t, b, kappa);
  const Scalar half_b = b / Scalar(2);
  return {e.a0 * c0 + e.a1 * (c1 + half_b * c0),
          e.a0 * c1 - e.a1 * (half_b * c1 + kappa * c0)};
}

// int_0^t exp(-b s/2) A1(s) ds: the response of the mode to a unit forcing
// held constant over [0, t].
double duhamel_weight(double t, double b, double kappa);

struct ModeCoefficients {
  double mu = 0.0;
  double disc = 0.0;

  static ModeCoefficients from_casimir(double casimir, const WaveParams& params);
};

enum class Region { R1, R2 };

// R1 iff lambda^{2 alpha} < 1/16.
Region classify_region(const RepIndex& rep, double alpha);

enum class NormKind { L2, Seminorm, TimeDeriv };

double decay_envelope(double t, const WaveParams& params, NormKind kind);

struct EvolutionState {
  SpectralField u_hat;
  SpectralField v_hat;
  double time = 0.0;
};

// Advances every coefficient to the absolute time t_target.
EvolutionState linear_evolve(const EvolutionState& state, double t_target,
                             const WaveParams& params);

// Per-block linear propagator and Duhamel weights for a fixed step h.
struct StepPropagator {
  double h = 0.0;
  // Indexed by dual block.
  std::vector<double> uu, uv, vu, vv;
  // Forcing held constant over the step contributes weight_u * F to u and
  // weight_v * F to u_t.
  std::vector<double> weight_u, weight_v;

  StepPropagator(const Dual& dual, const WaveParams& params, double h);

  // Linear part only.
  void advance(const SpectralField& u, const SpectralField& v,
               SpectralField& u_out, SpectralField& v_out) const;
  // Adds the contribution of a constant-in-time forcing spectrum.
  void add_forcing(const SpectralField& forcing, SpectralField& u_out,
                   SpectralField& v_out) const;
};

// rep_label, casimir, mu, disc, region
void write_mode_table(std::ostream& os, const Dual& dual, const WaveParams& params);

}  // namespace liewave

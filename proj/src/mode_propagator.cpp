#include "liewave/mode_propagator.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <Eigen/Core>

namespace liewave {

void WaveParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
  if (!(b >= 0.0)) throw std::invalid_argument("b must be >= 0");
  if (!(m2 >= 0.0)) throw std::invalid_argument("m2 must be >= 0");
}

double duhamel_weight(double t, double b, double kappa) {
  if (t <= 0.0) return 0.0;
  const auto e = damped_phi_pair(t, b, kappa);
  if (kappa > 0.0) {
    // g'' + b g' + kappa g = 0, g(0) = 0, g'(0) = 1 integrates to
    // kappa * int g = 1 - g'(t) - b g(t).
    const double num = 1.0 - e.a0 - 0.5 * b * e.a1;
    if (std::abs(num) > 1e-4) return num / kappa;
  }
  // Composite 16-point Gauss-Legendre; g is entire, panels resolve exp(-bs).
  static const auto rule = [] {
    Eigen::VectorXd x, w;
    gauss_legendre(16, x, w);
    return std::pair{x, w};
  }();
  const double rate = b + std::sqrt(std::abs(discriminant(kappa, b, 0.0))) + 1.0;
  const int panels = std::clamp(static_cast<int>(std::ceil(rate * t)), 1, 4000);
  const double width = t / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double left = k * width;
    for (Index i = 0; i < rule.first.size(); ++i) {
      const double s = left + 0.5 * width * (rule.first[i] + 1.0);
      sum += 0.5 * width * rule.second[i] * damped_phi_pair(s, b, kappa).a1;
    }
  }
  return sum;
}

ModeCoefficients ModeCoefficients::from_casimir(double casimir,
                                                const WaveParams& params) {
  ModeCoefficients m;
  m.mu = std::pow(casimir, params.alpha);
  m.disc = discriminant(m.mu, params.b, params.m2);
  return m;
}

Region classify_region(const RepIndex& rep, double alpha) {
  return std::pow(rep.casimir, alpha) < 1.0 / 16.0 ? Region::R1 : Region::R2;
}

double decay_envelope(double t, const WaveParams& params, NormKind kind) {
  const double b = params.b;
  const double m2 = params.m2;
  if (m2 > 0.0) {
    const double lhs = b * b;
    const double rhs = 4.0 * m2;
    if (std::abs(lhs - rhs) <= 1e-12 * std::max(lhs, rhs))
      return (t + 1.0) * std::exp(-0.5 * b * t);
    if (lhs < rhs) return std::exp(-0.5 * b * t);
    return std::exp((-0.5 * b + std::sqrt(0.25 * b * b - m2)) * t);
  }
  switch (kind) {
    case NormKind::L2:
      return 1.0 + t;
    case NormKind::Seminorm:
      return 1.0 / std::sqrt(1.0 + t);
    case NormKind::TimeDeriv:
      return 1.0 / (1.0 + t);
  }
  return 1.0;
}

EvolutionState linear_evolve(const EvolutionState& state, double t_target,
                             const WaveParams& params) {
  require_same_dual(state.u_hat, state.v_hat);
  const double dt = t_target - state.time;
  if (dt < 0.0) throw std::invalid_argument("linear_evolve: target precedes state time");
  StepPropagator step(*state.u_hat.dual, params, dt);
  EvolutionState out{state.u_hat, state.v_hat, t_target};
  step.advance(state.u_hat, state.v_hat, out.u_hat, out.v_hat);
  return out;
}

StepPropagator::StepPropagator(const Dual& dual, const WaveParams& params, double step)
    : h(step) {
  const auto n = static_cast<size_t>(dual.size());
  uu.resize(n);
  uv.resize(n);
  vu.resize(n);
  vv.resize(n);
  weight_u.resize(n);
  weight_v.resize(n);
  for (size_t r = 0; r < n; ++r) {
    const double mu = std::pow(dual.rep(static_cast<Index>(r)).casimir, params.alpha);
    const double kappa = mu + params.m2;
    const auto e = damped_phi_pair(h, params.b, kappa);
    const double hb = 0.5 * params.b;
    uu[r] = e.a0 + hb * e.a1;
    uv[r] = e.a1;
    vu[r] = -kappa * e.a1;
    vv[r] = e.a0 - hb * e.a1;
    weight_u[r] = duhamel_weight(h, params.b, kappa);
    weight_v[r] = e.a1;
  }
}

void StepPropagator::advance(const SpectralField& u, const SpectralField& v,
                             SpectralField& u_out, SpectralField& v_out) const {
  const Dual& dual = *u.dual;
  u_out.coeffs.resize(u.coeffs.size());
  v_out.coeffs.resize(v.coeffs.size());
  for (Index r = 0; r < dual.size(); ++r) {
    const auto i = static_cast<size_t>(r);
    const Index off = dual.offset(r);
    const Index len = static_cast<Index>(dual.rep(r).dim) * dual.rep(r).dim;
    const auto u0 = u.coeffs.segment(off, len);
    const auto v0 = v.coeffs.segment(off, len);
    // u0/v0 may alias u_out/v_out.
    const Eigen::VectorXcd nu = uu[i] * u0 + uv[i] * v0;
    v_out.coeffs.segment(off, len) = vu[i] * u0 + vv[i] * v0;
    u_out.coeffs.segment(off, len) = nu;
  }
}

void StepPropagator::add_forcing(const SpectralField& forcing, SpectralField& u_out,
                                 SpectralField& v_out) const {
  const Dual& dual = *forcing.dual;
  for (Index r = 0; r < dual.size(); ++r) {
    const auto i = static_cast<size_t>(r);
    const Index off = dual.offset(r);
    const Index len = static_cast<Index>(dual.rep(r).dim) * dual.rep(r).dim;
    u_out.coeffs.segment(off, len) += weight_u[i] * forcing.coeffs.segment(off, len);
    v_out.coeffs.segment(off, len) += weight_v[i] * forcing.coeffs.segment(off, len);
  }
}

void write_mode_table(std::ostream& os, const Dual& dual, const WaveParams& params) {
  os << "rep_label,casimir,mu,disc,region\n";
  os.precision(17);
  for (const auto& rep : dual.reps()) {
    const auto m = ModeCoefficients::from_casimir(rep.casimir, params);
    os << '"' << rep.label_string() << "\"," << rep.casimir << ',' << m.mu << ','
       << m.disc << ',' << (classify_region(rep, params.alpha) == Region::R1 ? "R1" : "R2")
       << '\n';
  }
}

}  // namespace liewave

#include "liewave/semilinear.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace liewave {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::DuhamelEuler ? "euler" : "midpoint";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "euler" || name == "DuhamelEuler") return Scheme::DuhamelEuler;
  if (name == "midpoint" || name == "DuhamelMidpoint") return Scheme::DuhamelMidpoint;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string to_string(Outcome outcome) {
  return outcome == Outcome::Completed ? "completed" : "blowup";
}

void SchemeConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(overflow_guard > 0.0)) throw std::invalid_argument("overflow guard must be positive");
}

bool use_weighted_norm(const WaveParams& params) { return params.m2 > 0.0; }

double x_norm_sample(double t, double l2, double seminorm, double dt_l2,
                     const WaveParams& params, bool weighted) {
  const double sum = l2 + seminorm + dt_l2;
  return weighted ? sum / decay_envelope(t, params, NormKind::L2) : sum;
}

void NormTrace::record(double t, const EvolutionState& state, const WaveParams& params) {
  if (!times.empty() && !(t > times.back()))
    throw std::invalid_argument("NormTrace times must be strictly increasing");
  const double a = plancherel_norm(state.u_hat);
  const double s = plancherel_norm(apply_fractional_laplacian(state.u_hat, params.alpha));
  const double v = plancherel_norm(state.v_hat);
  const double x = x_norm_sample(t, a, s, v, params, use_weighted_norm(params));
  times.push_back(t);
  l2.push_back(a);
  seminorm.push_back(s);
  dt_l2.push_back(v);
  envelope.push_back(decay_envelope(t, params, NormKind::L2));
  x_norm_running.push_back(x_norm_running.empty() ? x : std::max(x_norm_running.back(), x));
}

double x_norm(const NormTrace& trace, const WaveParams& params, bool weighted) {
  if (trace.empty()) throw std::invalid_argument("x_norm of an empty trace");
  double sup = 0.0;
  for (size_t i = 0; i < trace.size(); ++i)
    sup = std::max(sup, x_norm_sample(trace.times[i], trace.l2[i], trace.seminorm[i],
                                      trace.dt_l2[i], params, weighted));
  return sup;
}

GridField nonlinearity(const GridField& field, double p) {
  static std::atomic<bool> warned{false};
  GridField out{Eigen::VectorXcd(field.size())};
  double residue = 0.0;
  for (Index i = 0; i < field.size(); ++i) {
    const Complex z = field.values[i];
    if (std::isnan(z.real()) || std::isnan(z.imag()))
      throw std::domain_error("nonlinearity: NaN in input field");
    residue = std::max(residue, std::abs(z.imag()));
    out.values[i] = std::pow(std::abs(z.real()), p);
  }
  if (residue >= 1e-8 && !warned.exchange(true))
    std::cerr << "liewave: warning: discarding imaginary residue " << residue
              << " in |u|^p\n";
  return out;
}

double energy(const EvolutionState& state, const WaveParams& params) {
  const double v = plancherel_norm(state.v_hat);
  const double s = plancherel_norm(apply_fractional_laplacian(state.u_hat, params.alpha));
  const double u = plancherel_norm(state.u_hat);
  return 0.5 * (v * v + s * s + params.m2 * u * u);
}

EvolutionState make_state(const SpectralBasis& basis, const GridField& u0,
                          const GridField& u1, bool real_valued) {
  EvolutionState s{basis.analyze(u0), basis.analyze(u1), 0.0};
  if (real_valued) {
    s.u_hat = enforce_reality(s.u_hat);
    s.v_hat = enforce_reality(s.v_hat);
  }
  return s;
}

// --- DuhamelStepper --------------------------------------------------------

DuhamelStepper::DuhamelStepper(const SpectralBasis& basis, WaveParams params,
                               SchemeConfig cfg)
    : basis_(basis), params_(params), cfg_(cfg) {
  params_.validate();
  cfg_.validate();
  if (!cfg_.dealias && basis.group().oversample != 1.0)
    nonlinear_basis_.emplace(basis.group().with_oversample(1.0));
}

SpectralField DuhamelStepper::forcing(const SpectralField& u_hat, double* sup_norm) const {
  const SpectralBasis& nb = nonlinear_basis_ ? *nonlinear_basis_ : basis_;
  const GridField u = nb.synthesize(u_hat);
  if (sup_norm) *sup_norm = u.values.cwiseAbs().maxCoeff();
  SpectralField f = nb.analyze(nonlinearity(u, params_.p));
  f.dual = basis_.dual();
  return u_hat.real_valued ? enforce_reality(f) : f;
}

std::shared_ptr<const StepPropagator> DuhamelStepper::propagator(double h) {
  for (const auto& p : cache_)
    if (p->h == h) return p;
  if (cache_.size() > 8) cache_.erase(cache_.begin());
  cache_.push_back(std::make_shared<const StepPropagator>(*basis_.dual(), params_, h));
  return cache_.back();
}

bool DuhamelStepper::step(EvolutionState& state, double h) {
  const bool real = state.u_hat.real_valued;
  EvolutionState next{state.u_hat, state.v_hat, state.time + h};
  const auto full = propagator(h);
  full->advance(state.u_hat, state.v_hat, next.u_hat, next.v_hat);

  if (cfg_.nonlinear) {
    double sup = 0.0;
    SpectralField f = forcing(state.u_hat, &sup);
    last_sup_ = sup;
    if (!(sup <= cfg_.overflow_guard)) return false;
    if (cfg_.scheme == Scheme::DuhamelMidpoint) {
      // Predictor: exponential Euler over half a step.
      const auto half = propagator(0.5 * h);
      SpectralField uh = state.u_hat, vh = state.v_hat;
      half->advance(state.u_hat, state.v_hat, uh, vh);
      half->add_forcing(f, uh, vh);
      uh.real_valued = real;
      f = forcing(uh, &sup);
      if (!(sup <= cfg_.overflow_guard)) return false;
    }
    full->add_forcing(f, next.u_hat, next.v_hat);
  }
  if (!next.u_hat.coeffs.allFinite() || !next.v_hat.coeffs.allFinite()) return false;
  next.u_hat.real_valued = real;
  next.v_hat.real_valued = state.v_hat.real_valued;
  state = std::move(next);
  return true;
}

EvolutionState duhamel_step(const SpectralBasis& basis, const EvolutionState& state,
                            const WaveParams& params, const SchemeConfig& cfg) {
  DuhamelStepper stepper(basis, params, cfg);
  EvolutionState out = state;
  if (!stepper.step(out, cfg.dt))
    throw BlowupOverflow("duhamel_step: solution exceeded the overflow guard");
  return out;
}

// --- simulate --------------------------------------------------------------

SimulationResult simulate(const SpectralBasis& basis, const WaveParams& params,
                          const GridField& u0, const GridField& u1, double t_end,
                          const SchemeConfig& cfg) {
  return simulate(basis, params, make_state(basis, u0, u1, true), t_end, cfg);
}

SimulationResult simulate(const SpectralBasis& basis, const WaveParams& params,
                          EvolutionState initial, double t_end,
                          const SchemeConfig& cfg) {
  if (!(t_end > 0.0)) throw std::invalid_argument("simulate: t_end must be positive");
  DuhamelStepper stepper(basis, params, cfg);
  SimulationResult result;
  result.final_state = std::move(initial);
  result.trace.record(result.final_state.time, result.final_state, params);
  const double t0 = result.final_state.time;
  const auto steps = static_cast<long>(std::ceil((t_end - t0) / cfg.dt - 1e-9));
  for (long i = 1; i <= steps; ++i) {
    const double target = (i == steps) ? t_end : t0 + static_cast<double>(i) * cfg.dt;
    const double h = (i == steps) ? t_end - result.final_state.time : cfg.dt;
    if (!stepper.step(result.final_state, h)) {
      result.outcome = Outcome::Blowup;
      break;
    }
    result.final_state.time = target;
    result.trace.record(target, result.final_state, params);
  }
  result.final_time = result.final_state.time;
  return result;
}

}  // namespace liewave

#pragma once

// Mild solutions of  u_tt + (-L)^alpha u + b u_t + m2 u = |u|^p.
//
// Each step advances the linear part exactly with StepPropagator and adds the
// Duhamel integral of the nonlinearity with the exact per-mode kernel,
// freezing the forcing at the left endpoint (Euler) or at a predicted
// midpoint (Midpoint). The forcing is computed pseudospectrally on the
// basis grid and truncated back to the band.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liewave/group_harmonics.hpp"
#include "liewave/mode_propagator.hpp"

namespace liewave {

enum class Scheme { DuhamelEuler, DuhamelMidpoint };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct SchemeConfig {
  Scheme scheme = Scheme::DuhamelMidpoint;
  double dt = 1e-2;
  // false: evaluate |u|^p on the unrefined grid (oversample 1).
  bool dealias = true;
  // false switches the |u|^p term off (linear run).
  bool nonlinear = true;
  // Abort when max |u| on the grid exceeds this.
  double overflow_guard = 1e8;

  void validate() const;
};

struct NormTrace {
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> seminorm;
  std::vector<double> dt_l2;
  std::vector<double> envelope;
  std::vector<double> x_norm_running;

  size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  // Appends one sample and updates the running X(T) supremum.
  void record(double t, const EvolutionState& state, const WaveParams& params);
};

// Mass case (m2 > 0) weights the X(T) norm by 1/A_{b,m2}(t).
bool use_weighted_norm(const WaveParams& params);

// Sum of the three energy-space norms, weighted by 1/A_{b,m2}(t) if asked.
double x_norm_sample(double t, double l2, double seminorm, double dt_l2,
                     const WaveParams& params, bool weighted);

double x_norm(const NormTrace& trace, const WaveParams& params, bool weighted);

// Pointwise |u|^p. Imaginary parts are dropped; a warning is printed when
// they exceed 1e-8. Throws std::domain_error on NaN input.
GridField nonlinearity(const GridField& field, double p);

// 1/2 ||u_t||^2 + 1/2 ||(-L)^{alpha/2} u||^2 + 1/2 m2 ||u||^2
double energy(const EvolutionState& state, const WaveParams& params);

EvolutionState make_state(const SpectralBasis& basis, const GridField& u0,
                          const GridField& u1, bool real_valued = true);

// Stepper bound to one basis, parameter set and scheme. Owns propagator
// tables for the current step size; rebuilding on dt changes is cheap.
class DuhamelStepper {
 public:
  DuhamelStepper(const SpectralBasis& basis, WaveParams params, SchemeConfig cfg);

  // F_hat = analyze(|synthesize(u_hat)|^p), truncated to the band. Also
  // reports max |u| on the nonlinear grid.
  SpectralField forcing(const SpectralField& u_hat, double* sup_norm = nullptr) const;

  // One step of size h. Returns false (state untouched) when the overflow
  // guard trips or the update is not finite.
  bool step(EvolutionState& state, double h);

  const WaveParams& params() const { return params_; }
  const SchemeConfig& config() const { return cfg_; }
  const SpectralBasis& basis() const { return basis_; }
  // max |u| on the nonlinear grid at the last forcing evaluation.
  double last_sup_norm() const { return last_sup_; }

 private:
  std::shared_ptr<const StepPropagator> propagator(double h);

  const SpectralBasis& basis_;
  std::optional<SpectralBasis> nonlinear_basis_;
  WaveParams params_;
  SchemeConfig cfg_;
  std::vector<std::shared_ptr<const StepPropagator>> cache_;
  double last_sup_ = 0.0;
};

struct BlowupOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws BlowupOverflow when the overflow guard trips.
EvolutionState duhamel_step(const SpectralBasis& basis, const EvolutionState& state,
                            const WaveParams& params, const SchemeConfig& cfg);

enum class Outcome { Completed, Blowup };

std::string to_string(Outcome outcome);

struct SimulationResult {
  NormTrace trace;
  EvolutionState final_state;
  Outcome outcome = Outcome::Completed;
  // Last time at which the state is valid.
  double final_time = 0.0;
};

SimulationResult simulate(const SpectralBasis& basis, const WaveParams& params,
                          const GridField& u0, const GridField& u1, double t_end,
                          const SchemeConfig& cfg);

SimulationResult simulate(const SpectralBasis& basis, const WaveParams& params,
                          EvolutionState initial, double t_end,
                          const SchemeConfig& cfg);

struct PicardReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> times;
  std::vector<EvolutionState> solution;  // one state per time node
  NormTrace trace;
  // sup_t X-distance between consecutive iterates.
  std::vector<double> distances;
  // distances[k] / distances[k-1]
  std::vector<double> contraction_ratios;
};

// Fixed-point iteration of u -> u_lin + int_0^t K(t-s) |u(s)|^p ds on the
// nodes s_j = j T / ceil(T/dt), composite trapezoid in s.
PicardReport picard_solve(const SpectralBasis& basis, const WaveParams& params,
                          const GridField& u0, const GridField& u1, double T,
                          double tol, int max_iter, const SchemeConfig& cfg);

}  // namespace liewave

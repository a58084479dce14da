#pragma once

// Finite-time blow-up experiments for the damped problem with nonnegative
// data. The mean U0(t) = int u dx obeys
//
//   U0'(t) - U0'(0) + U0(t) - U0(0) = int_0^t int |u|^p dx ds
//                                   >= int_0^t |U0(s)|^p ds   (Jensen),
//
// so U0 is bounded below by the solution V of V'' + V' = |V|^p with the same
// initial mean data. Lifespans T(eps) are compared with the eps^{1-p} law.

#include <optional>
#include <string>
#include <vector>

#include "liewave/group_harmonics.hpp"
#include "liewave/mode_propagator.hpp"
#include "liewave/semilinear.hpp"

namespace liewave {

enum class LifespanMethod { ComparisonODE, FullPDE };

std::string to_string(LifespanMethod method);
LifespanMethod parse_lifespan_method(const std::string& name);

struct LifespanRecord {
  double epsilon = 0.0;
  std::optional<double> lifespan;  // nullopt: no blow-up before t_max
  LifespanMethod method = LifespanMethod::ComparisonODE;
  double threshold = 0.0;
  std::string flags;

  bool finite() const { return lifespan.has_value(); }
};

struct ZeroMode {
  double value = 0.0;  // U0
  double rate = 0.0;   // U0'
};

// Trivial-representation coefficients of (u_hat, v_hat). Throws
// std::domain_error if their imaginary parts exceed 1e-8.
ZeroMode zero_mode(const EvolutionState& state);

// --- Comparison ODE  V'' + V' = |V|^p -------------------------------------

struct ComparisonCrossing {
  std::optional<double> at_threshold;       // first V >= threshold
  std::optional<double> at_ten_threshold;   // first V >= 10 threshold
  std::optional<double> extrapolated;       // Richardson estimate of the asymptote
};

ComparisonCrossing comparison_crossings(double p, double v0, double v0dot,
                                        double threshold, double t_max = 1e12);

// Blow-up time of the comparison ODE: threshold crossings at theta and
// 10 theta combined under V ~ C (T - t)^{-2/(p-1)}. nullopt when V stays below
// 10 theta up to t_max.
std::optional<double> comparison_lifespan(double p, double v0, double v0dot,
                                          double threshold, double t_max = 1e12);

// V(t) at the requested (increasing) times; stops early once V exceeds
// `cap`, leaving the remaining entries infinite.
std::vector<double> comparison_trajectory(double p, double v0, double v0dot,
                                          const std::vector<double>& times,
                                          double cap = 1e12);

// --- Full PDE detection ----------------------------------------------------

struct ZeroModeSample {
  double t = 0.0;
  double mean = 0.0;        // U0(t)
  double mean_rate = 0.0;   // U0'(t)
  double mean_power = 0.0;  // int |u|^p dx
  double sup = 0.0;         // max |u|
};

struct BlowupDetection {
  std::optional<double> time;  // first crossing of the threshold
  bool underflow = false;      // dt dropped below 1e-12
  double last_time = 0.0;
  std::vector<ZeroModeSample> history;
};

// Steps the PDE from (u0, u1), halving dt whenever max|u| more than doubles
// over a step (once max|u| > 1). Requires threshold >= 1e4.
BlowupDetection detect_blowup(const SpectralBasis& basis, const WaveParams& params,
                              const GridField& u0, const GridField& u1,
                              const SchemeConfig& cfg, double threshold,
                              double t_max);

// max_t |U0'(t) - U0'(0) + b (U0(t) - U0(0)) + m2 int_0^t U0
//        - int_0^t int |u|^p|, trapezoid in t over the recorded samples.
double integrated_identity_residual(const std::vector<ZeroModeSample>& history,
                                    const WaveParams& params);

// --- Scans -----------------------------------------------------------------

struct ScanSetup {
  const SpectralBasis* basis = nullptr;  // required for FullPDE and for means
  WaveParams params;
  GridField u0;
  GridField u1;
  SchemeConfig cfg;
  double threshold = 1e6;
  double t_max = 1e12;
};

struct ScanResult {
  std::vector<LifespanRecord> records;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_ci = 0.0;  // 95% half-width
  double expected_slope = 0.0;
  std::vector<std::string> warnings;
  int finite_count = 0;
};

// Least-squares fit of log T against log eps. Infinite records are excluded
// with a warning. Runs the epsilons concurrently.
ScanResult lifespan_scan(double p, const std::vector<double>& epsilons,
                         LifespanMethod method, const ScanSetup& setup);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_ci = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace liewave

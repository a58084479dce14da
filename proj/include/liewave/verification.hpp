#pragma once

// Numerical checks of the quantitative statements behind the solver:
// Plancherel, propagator-vs-ODE agreement, decay envelopes of the linear
// flow, the Gagliardo-Nirenberg interpolation bound and energy dissipation.
// Hidden constants are calibrated once into data/calibration.json and
// regression-tested against it.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "liewave/group_harmonics.hpp"
#include "liewave/mode_propagator.hpp"

namespace liewave {

struct CheckReport {
  std::string name;
  bool passed = false;
  double worst_ratio = 0.0;
  std::string worst_case;
  double tolerance = 0.0;
  long samples = 0;
};

struct Calibration {
  int version = 1;
  double decay_band = 0.05;
  double gn_band = 0.10;
  // case key -> norm kind -> constant
  std::map<std::string, std::map<std::string, double>> decay;
  std::map<std::string, double> gn;

  static Calibration load(const std::string& path);
  static Calibration load_default();
  void save(const std::string& path) const;
};

std::string default_calibration_path();

// --- Plancherel ------------------------------------------------------------

// Relative errors of Plancherel and of synthesize/analyze round trips on
// random band-limited fields; pass at 1e-10 (torus) or 1e-8 (SO(3)).
CheckReport check_plancherel(const GroupSpec& group, int trials, std::uint64_t seed);

// --- Propagator ------------------------------------------------------------

// max |evolve_mode - adaptive ODE solution| over the mu/t lattice for data
// (1,0) and (0,1); pass at 1e-8.
CheckReport check_mode_oracle(double b, double m2, const std::vector<double>& mu_list,
                              const std::vector<double>& t_list);

// |phi_pair(t, +-1e-12) - phi_pair(t, 0)| for t <= t_max; pass at 1e-9.
CheckReport check_branch_continuity(double t_max = 20.0);

// Same lattice with the exact first-order change removed:
// |phi_pair(t, d) - phi_pair(t, 0) - d (t^2/2, t^3/6)|; pass at 1e-9.
CheckReport check_branch_jump(double t_max = 20.0);

// --- Decay bounds ----------------------------------------------------------

struct DecayCheckConfig {
  GroupSpec group = GroupSpec::torus(2, 8);
  WaveParams params;
  int family_size = 20;
  std::vector<double> t_grid;
  std::uint64_t seed = 2024;
  double decay_rate = 1.0;

  std::string key() const;
};

// Uniform grid on [0, t_end].
std::vector<double> uniform_grid(double t_end, double step);

// Worst normalized ratio per norm kind ("l2", "seminorm", "time_derivative",
// plus "l2_growth" when m2 == 0).
std::map<std::string, double> measure_decay_ratios(const DecayCheckConfig& cfg);

std::vector<CheckReport> check_decay_bounds(const DecayCheckConfig& cfg,
                                            const Calibration& calibration);

// Every nonzero mode of the torus and SO(3) has mu >= 1, so R1 is exactly
// the trivial representation.
CheckReport check_region_partition(const GroupSpec& group, double alpha);

// --- Gagliardo-Nirenberg ---------------------------------------------------

// theta = (n/alpha)(1/2 - 1/q). Throws std::invalid_argument naming the
// violated condition when (n, q, alpha) is not admissible.
double gn_theta(int n, double q, double alpha);

// Real field concentrated at a random group element: block weights
// exp(-lambda^2 / (2 s^2)) with s uniform in [width_min, width_max], each
// coefficient scaled by (1 + perturbation * N(0,1)).
SpectralField random_bump(const DualPtr& dual, std::uint64_t seed, double width_min,
                          double width_max, double perturbation);

struct GnCheckConfig {
  GroupSpec group = GroupSpec::torus(2, 8, 2.0);
  double alpha = 0.75;
  double q = 4.0;
  int family_size = 100;
  std::uint64_t seed = 7;
  double width_min = 0.5;
  double width_max = 10.0;
  double perturbation = 0.2;

  std::string key() const;
};

// ||f||_{L^q} / (||f||_{H^alpha}^theta ||f||_{L^2}^{1-theta}).
double gn_ratio(const SpectralField& f, const SpectralBasis& basis, double alpha, double q);

// Worst ratio over a family of random_bump fields.
double measure_gn_constant(const GnCheckConfig& cfg);

CheckReport check_gn(const GnCheckConfig& cfg, const Calibration& calibration);

// --- Energy ----------------------------------------------------------------

struct EnergyCheckConfig {
  GroupSpec group = GroupSpec::torus(2, 8);
  WaveParams params{0.75, 1.0, 0.0, 2.0};
  double t_end = 50.0;
  double sample_step = 0.1;
  std::uint64_t seed = 11;
  double decay_rate = 1.0;
};

// Along the exact linear flow: E(t_{j+1}) <= E(t_j) + 1e-9 and the
// five-point derivative of E matches -b ||u_t||^2 to 1e-5 relative.
CheckReport check_energy_monotone(const EnergyCheckConfig& cfg);

CheckReport check_energy_monotone(const SpectralBasis& basis, const WaveParams& params,
                                  const EvolutionState& data, double t_end,
                                  double sample_step);

// --- Suites ----------------------------------------------------------------

// Selector in {plancherel, modes, decay, gn, energy, all}; throws
// std::invalid_argument otherwise.
std::vector<CheckReport> run_suite(const std::string& selector, const Calibration& calibration);

// Recomputes every calibrated constant of the standard suites.
Calibration calibrate_standard();

// Standard configurations used by the suites and the acceptance tests.
std::vector<DecayCheckConfig> standard_decay_configs();
GnCheckConfig standard_gn_config();

}  // namespace liewave

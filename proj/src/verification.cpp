#include "liewave/verification.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>
#include <json.hpp>

#include "liewave/semilinear.hpp"

namespace liewave {

namespace {

using json = nlohmann::json;

std::string describe(const std::string& what, double value) {
  std::ostringstream os;
  os << what << std::setprecision(6) << value;
  return os.str();
}

std::string number_key(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

EvolutionState random_real_state(const SpectralBasis& basis, std::uint64_t seed,
                                 double decay_rate) {
  EvolutionState s;
  s.u_hat = random_band_limited(basis.dual(), 2 * seed, decay_rate, true);
  s.v_hat = random_band_limited(basis.dual(), 2 * seed + 1, decay_rate, true);
  return s;
}

}  // namespace

// --- Calibration -----------------------------------------------------------

std::string default_calibration_path() {
#ifdef LIEWAVE_CALIBRATION_FILE
  return LIEWAVE_CALIBRATION_FILE;
#else
  return "data/calibration.json";
#endif
}

Calibration Calibration::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration file " + path);
  const json j = json::parse(in);
  Calibration c;
  c.version = j.at("version").get<int>();
  c.decay_band = j.at("decay_band").get<double>();
  c.gn_band = j.at("gn_band").get<double>();
  c.decay = j.at("decay").get<std::map<std::string, std::map<std::string, double>>>();
  c.gn = j.at("gn").get<std::map<std::string, double>>();
  return c;
}

Calibration Calibration::load_default() { return load(default_calibration_path()); }

void Calibration::save(const std::string& path) const {
  json j;
  j["version"] = version;
  j["decay_band"] = decay_band;
  j["gn_band"] = gn_band;
  j["decay"] = decay;
  j["gn"] = gn;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration file " + path);
  out << std::setw(2) << j << '\n';
}

// --- Plancherel ------------------------------------------------------------

CheckReport check_plancherel(const GroupSpec& group, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_plancherel: trials must be >= 1");
  const SpectralBasis basis(group);
  CheckReport rep;
  rep.name = "plancherel[" + group.name() + ",K=" + std::to_string(group.bandlimit) + "]";
  rep.tolerance = group.kind == GroupKind::Torus ? 1e-10 : 1e-8;
  for (int i = 0; i < trials; ++i) {
    const SpectralField spec =
        random_band_limited(basis.dual(), seed + static_cast<std::uint64_t>(i), 0.0, false);
    const GridField f = basis.synthesize(spec);
    const SpectralField back = basis.analyze(f);
    const double l2 = lq_norm(f, 2.0, basis.grid());
    const double planch = std::abs(plancherel_norm(back) - l2) / l2;
    const GridField again = basis.synthesize(back);
    const double trip = (again.values - f.values).cwiseAbs().maxCoeff() /
                        f.values.cwiseAbs().maxCoeff();
    const double worst = std::max(planch, trip);
    if (worst >= rep.worst_ratio) {
      rep.worst_ratio = worst;
      rep.worst_case = "trial " + std::to_string(i) + describe(" plancherel=", planch) +
                       describe(" roundtrip=", trip);
    }
    ++rep.samples;
  }
  rep.passed = rep.worst_ratio <= rep.tolerance;
  return rep;
}

// --- Propagator ------------------------------------------------------------

CheckReport check_mode_oracle(double b, double m2, const std::vector<double>& mu_list,
                              const std::vector<double>& t_list) {
  namespace odeint = boost::numeric::odeint;
  if (mu_list.empty() || t_list.empty())
    throw std::invalid_argument("check_mode_oracle: empty lattice");
  std::vector<double> times = t_list;
  std::sort(times.begin(), times.end());
  if (times.front() < 0.0) throw std::invalid_argument("check_mode_oracle: negative time");
  if (times.front() > 0.0) times.insert(times.begin(), 0.0);

  CheckReport rep;
  rep.name = "mode_oracle[b=" + number_key(b) + ",m2=" + number_key(m2) + "]";
  rep.tolerance = 1e-8;
  using State = std::array<double, 2>;
  for (double mu : mu_list) {
    const double kappa = mu + m2;
    auto rhs = [&](const State& y, State& dy, double) {
      dy[0] = y[1];
      dy[1] = -b * y[1] - kappa * y[0];
    };
    for (const State data : {State{1.0, 0.0}, State{0.0, 1.0}}) {
      State y = data;
      auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(1e-15, 1e-14);
      std::vector<State> states;
      odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-3,
                              [&](const State& s, double) { states.push_back(s); });
      for (size_t i = 0; i < times.size(); ++i) {
        const auto m = evolve_mode<double>(data[0], data[1], times[i], mu, b, m2);
        const double dev = std::max(std::abs(m.c - states[i][0]), std::abs(m.cdot - states[i][1]));
        if (dev >= rep.worst_ratio) {
          rep.worst_ratio = dev;
          rep.worst_case = describe("mu=", mu) + describe(" t=", times[i]) +
                           describe(" c0=", data[0]) + describe(" c1=", data[1]);
        }
        ++rep.samples;
      }
    }
  }
  rep.passed = rep.worst_ratio <= rep.tolerance;
  return rep;
}

CheckReport check_branch_continuity(double t_max) {
  CheckReport rep;
  rep.name = "branch_continuity";
  rep.tolerance = 1e-9;
  for (double t : uniform_grid(t_max, 0.05)) {
    const auto ref = phi_pair(t, 0.0);
    for (double disc : {1e-12, -1e-12}) {
      const auto v = phi_pair(t, disc);
      const double dev = std::max(std::abs(v.a0 - ref.a0), std::abs(v.a1 - ref.a1));
      if (dev >= rep.worst_ratio) {
        rep.worst_ratio = dev;
        rep.worst_case = describe("t=", t) + describe(" disc=", disc);
      }
      ++rep.samples;
    }
  }
  rep.passed = rep.worst_ratio <= rep.tolerance;
  return rep;
}

CheckReport check_branch_jump(double t_max) {
  CheckReport rep;
  rep.name = "branch_jump";
  rep.tolerance = 1e-9;
  for (double t : uniform_grid(t_max, 0.05)) {
    const auto ref = phi_pair(t, 0.0);
    for (double disc : {1e-12, -1e-12}) {
      const auto v = phi_pair(t, disc);
      const double dev = std::max(std::abs(v.a0 - ref.a0 - disc * t * t / 2.0),
                                  std::abs(v.a1 - ref.a1 - disc * t * t * t / 6.0));
      if (dev >= rep.worst_ratio) {
        rep.worst_ratio = dev;
        rep.worst_case = describe("t=", t) + describe(" disc=", disc);
      }
      ++rep.samples;
    }
  }
  rep.passed = rep.worst_ratio <= rep.tolerance;
  return rep;
}

// --- Decay bounds ----------------------------------------------------------

std::string DecayCheckConfig::key() const {
  return group.name() + "_K" + std::to_string(group.bandlimit) + "_alpha" +
         number_key(params.alpha) + "_b" + number_key(params.b) + "_m2" +
         number_key(params.m2);
}

std::vector<double> uniform_grid(double t_end, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::llround(t_end / step));
  for (long i = 0; i <= n; ++i) out.push_back(static_cast<double>(i) * t_end / static_cast<double>(n));
  return out;
}

std::map<std::string, double> measure_decay_ratios(const DecayCheckConfig& cfg) {
  if (cfg.family_size < 1) throw std::invalid_argument("decay check: empty family");
  cfg.params.validate();
  const SpectralBasis basis(cfg.group);
  const WaveParams& prm = cfg.params;
  const bool mass = prm.m2 > 0.0;
  std::map<std::string, double> worst{{"l2", 0.0}, {"seminorm", 0.0}, {"time_derivative", 0.0}};
  if (!mass) worst["l2_growth"] = 0.0;
  for (int i = 0; i < cfg.family_size; ++i) {
    const EvolutionState data =
        random_real_state(basis, cfg.seed + static_cast<std::uint64_t>(i), cfg.decay_rate);
    const double u0_l2 = plancherel_norm(data.u_hat);
    const double u1_l2 = plancherel_norm(data.v_hat);
    const double data_norm = sobolev_norm(data.u_hat, prm.alpha) + u1_l2;
    for (double t : cfg.t_grid) {
      const EvolutionState s = linear_evolve(data, t, prm);
      const double l2 = plancherel_norm(s.u_hat);
      const double semi = plancherel_norm(apply_fractional_laplacian(s.u_hat, prm.alpha));
      const double vel = plancherel_norm(s.v_hat);
      auto bump = [&](const char* k, double r) { worst[k] = std::max(worst[k], r); };
      if (mass) {
        const double env = decay_envelope(t, prm, NormKind::L2);
        bump("l2", l2 / env / data_norm);
        bump("seminorm", semi / env / data_norm);
        bump("time_derivative", vel / env / data_norm);
      } else {
        bump("l2", l2 / data_norm);
        bump("l2_growth", l2 / (u0_l2 + t * u1_l2));
        bump("seminorm", semi / decay_envelope(t, prm, NormKind::Seminorm) / data_norm);
        bump("time_derivative", vel / decay_envelope(t, prm, NormKind::TimeDeriv) / data_norm);
      }
    }
  }
  return worst;
}

std::vector<CheckReport> check_decay_bounds(const DecayCheckConfig& cfg,
                                            const Calibration& calibration) {
  if (cfg.family_size < 10) throw std::invalid_argument("decay check: family_size must be >= 10");
  if (cfg.t_grid.empty() || cfg.t_grid.front() > 0.0 || cfg.t_grid.back() < 200.0)
    throw std::invalid_argument("decay check: t_grid must span [0, 200]");
  const auto measured = measure_decay_ratios(cfg);
  const auto it = calibration.decay.find(cfg.key());
  std::vector<CheckReport> out;
  for (const auto& [kind, ratio] : measured) {
    CheckReport rep;
    rep.name = "decay[" + cfg.key() + "]." + kind;
    rep.worst_ratio = ratio;
    rep.samples = static_cast<long>(cfg.family_size) * static_cast<long>(cfg.t_grid.size());
    if (it == calibration.decay.end() || !it->second.count(kind)) {
      rep.passed = false;
      rep.worst_case = "no calibrated constant";
      out.push_back(rep);
      continue;
    }
    const double c = it->second.at(kind);
    rep.tolerance = c * (1.0 + calibration.decay_band);
    const double drift = std::abs(ratio / c - 1.0);
    rep.worst_case = describe("calibrated C*=", c) + describe(" drift=", drift);
    rep.passed = ratio <= rep.tolerance && drift <= calibration.decay_band;
    out.push_back(rep);
  }
  out.push_back(check_region_partition(cfg.group, cfg.params.alpha));
  return out;
}

CheckReport check_region_partition(const GroupSpec& group, double alpha) {
  const Dual dual(group);
  CheckReport rep;
  rep.name = "region_partition[" + group.name() + "]";
  rep.tolerance = 0.0;
  long mismatches = 0;
  double min_nonzero_mu = std::numeric_limits<double>::infinity();
  for (const auto& r : dual.reps()) {
    const bool r1 = classify_region(r, alpha) == Region::R1;
    if (r1 != r.is_trivial()) ++mismatches;
    if (!r.is_trivial()) min_nonzero_mu = std::min(min_nonzero_mu, std::pow(r.casimir, alpha));
    ++rep.samples;
  }
  rep.worst_ratio = static_cast<double>(mismatches);
  rep.worst_case = describe("R1={trivial}; min nonzero mu=", min_nonzero_mu);
  rep.passed = mismatches == 0;
  return rep;
}

// --- Gagliardo-Nirenberg ---------------------------------------------------

double gn_theta(int n, double q, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("GN: need 0 < alpha <= 1");
  const int floor_alpha = static_cast<int>(std::floor(alpha));
  if (n < 2 * floor_alpha + 2) throw std::invalid_argument("GN: need n >= 2[alpha] + 2");
  if (!(q >= 2.0)) throw std::invalid_argument("GN: need q >= 2");
  if (n > 2.0 * alpha && q > 2.0 * n / (n - 2.0 * alpha))
    throw std::invalid_argument("GN: need q <= 2n/(n - 2 alpha)");
  const double theta = (n / alpha) * (0.5 - 1.0 / q);
  if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("GN: need 0 <= theta <= 1");
  return theta;
}

std::string GnCheckConfig::key() const {
  return group.name() + "_K" + std::to_string(group.bandlimit) + "_alpha" +
         number_key(alpha) + "_q" + number_key(q);
}

double gn_ratio(const SpectralField& f, const SpectralBasis& basis, double alpha, double q) {
  const double theta = gn_theta(basis.group().dimension(), q, alpha);
  const double lq = lq_norm(basis.synthesize(f), q, basis.grid());
  const double l2 = plancherel_norm(f);
  return lq / (std::pow(sobolev_norm(f, alpha), theta) * std::pow(l2, 1.0 - theta));
}

SpectralField random_bump(const DualPtr& dual, std::uint64_t seed, double width_min,
                          double width_max, double perturbation) {
  if (!(width_min > 0.0 && width_max >= width_min))
    throw std::invalid_argument("random_bump: need 0 < width_min <= width_max");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = width_min + (width_max - width_min) * unit(rng);
  const GroupSpec& g = dual->group();
  std::vector<double> centre(g.kind == GroupKind::Torus ? static_cast<size_t>(g.torus_dim) : 3);
  for (auto& c : centre) c = 2.0 * std::numbers::pi * unit(rng);
  if (g.kind == GroupKind::SO3) centre[1] = std::acos(1.0 - 2.0 * unit(rng));

  SpectralField f = SpectralField::zeros(dual);
  for (Index r = 0; r < dual->size(); ++r) {
    const RepIndex& rep = dual->rep(r);
    const double w = std::exp(-rep.casimir / (2.0 * s * s));
    auto blk = f.block(r);
    if (g.kind == GroupKind::Torus) {
      double phase = 0.0;
      for (size_t d = 0; d < centre.size(); ++d) phase += rep.label[d] * centre[d];
      blk(0, 0) = w * std::exp(Complex(0.0, -phase));
    } else {
      blk = w * wigner_big_d(rep.label[0], {centre[0], centre[1], centre[2]}).adjoint();
    }
  }
  for (Index e = 0; e < f.coeffs.size(); ++e) f.coeffs[e] *= 1.0 + perturbation * normal(rng);
  return enforce_reality(f);
}

double measure_gn_constant(const GnCheckConfig& cfg) {
  gn_theta(cfg.group.dimension(), cfg.q, cfg.alpha);
  const SpectralBasis basis(cfg.group);
  double worst = 0.0;
  for (int i = 0; i < cfg.family_size; ++i) {
    const SpectralField f =
        random_bump(basis.dual(), cfg.seed * 1000003ULL + static_cast<std::uint64_t>(i),
                    cfg.width_min, cfg.width_max, cfg.perturbation);
    worst = std::max(worst, gn_ratio(f, basis, cfg.alpha, cfg.q));
  }
  return worst;
}

CheckReport check_gn(const GnCheckConfig& cfg, const Calibration& calibration) {
  CheckReport rep;
  rep.name = "gn[" + cfg.key() + ",seed=" + std::to_string(cfg.seed) + "]";
  rep.samples = cfg.family_size;
  rep.worst_ratio = measure_gn_constant(cfg);
  const auto it = calibration.gn.find(cfg.key());
  if (it == calibration.gn.end()) {
    rep.worst_case = "no calibrated constant";
    return rep;
  }
  rep.tolerance = it->second * (1.0 + calibration.gn_band);
  const double drift = std::abs(rep.worst_ratio / it->second - 1.0);
  rep.worst_case = describe("calibrated C_GN=", it->second) + describe(" drift=", drift);
  rep.passed = rep.worst_ratio <= rep.tolerance && drift <= calibration.gn_band;
  return rep;
}

// --- Energy ----------------------------------------------------------------

CheckReport check_energy_monotone(const SpectralBasis& basis, const WaveParams& params,
                                  const EvolutionState& data, double t_end,
                                  double sample_step) {
  if (!(params.b > 0.0)) throw std::invalid_argument("energy check requires b > 0");
  CheckReport rep;
  rep.name = "energy[" + basis.group().name() + ",b=" + number_key(params.b) +
             ",m2=" + number_key(params.m2) + "]";
  rep.tolerance = 1e-5;
  const double h = 1e-3;
  auto E = [&](double t) { return energy(linear_evolve(data, t, params), params); };
  double prev = E(0.0);
  bool monotone = true;
  std::string monotone_case;
  for (double t : uniform_grid(t_end, sample_step)) {
    if (t == 0.0) continue;
    const EvolutionState s = linear_evolve(data, t, params);
    const double e = energy(s, params);
    if (e > prev + 1e-9) {
      monotone = false;
      monotone_case = describe("energy increased at t=", t);
    }
    prev = e;
    if (t < 2.0 * h) continue;
    const double fd = (-E(t + 2 * h) + 8.0 * E(t + h) - 8.0 * E(t - h) + E(t - 2 * h)) / (12.0 * h);
    const double vel = plancherel_norm(s.v_hat);
    const double exact = -params.b * vel * vel;
    if (exact == 0.0) continue;
    const double rel = std::abs(fd - exact) / std::abs(exact);
    if (rel >= rep.worst_ratio) {
      rep.worst_ratio = rel;
      rep.worst_case = describe("dE/dt mismatch at t=", t);
    }
    ++rep.samples;
  }
  rep.passed = monotone && rep.worst_ratio <= rep.tolerance;
  if (!monotone) rep.worst_case = monotone_case;
  return rep;
}

CheckReport check_energy_monotone(const EnergyCheckConfig& cfg) {
  const SpectralBasis basis(cfg.group);
  return check_energy_monotone(basis, cfg.params, random_real_state(basis, cfg.seed, cfg.decay_rate),
                               cfg.t_end, cfg.sample_step);
}

// --- Suites ----------------------------------------------------------------

std::vector<DecayCheckConfig> standard_decay_configs() {
  std::vector<DecayCheckConfig> out;
  for (auto [b, m2] : {std::pair{1.0, 0.0}, {2.0, 2.0}, {2.0, 1.0}, {3.0, 2.0}}) {
    DecayCheckConfig c;
    c.params = WaveParams{0.75, b, m2, 2.0};
    c.t_grid = uniform_grid(200.0, 0.25);
    out.push_back(c);
  }
  return out;
}

GnCheckConfig standard_gn_config() { return GnCheckConfig{}; }

std::vector<CheckReport> run_suite(const std::string& selector, const Calibration& calibration) {
  static const std::vector<std::string> known{"plancherel", "modes", "decay", "gn", "energy", "all"};
  if (std::find(known.begin(), known.end(), selector) == known.end())
    throw std::invalid_argument("unknown verification suite '" + selector + "'");
  const bool all = selector == "all";
  std::vector<std::future<std::vector<CheckReport>>> jobs;
  auto launch = [&](auto fn) { jobs.push_back(std::async(std::launch::async, fn)); };

  if (all || selector == "plancherel") {
    launch([] { return std::vector{check_plancherel(GroupSpec::torus(2, 16), 20, 100)}; });
    launch([] { return std::vector{check_plancherel(GroupSpec::so3(8), 20, 200)}; });
  }
  if (all || selector == "modes") {
    launch([] {
      const std::vector<double> mus{0.0, 1.0 / 16.0, 0.25 - 1e-9, 0.25, 0.5, 10.0};
      const std::vector<double> ts = uniform_grid(20.0, 0.1);
      std::vector<CheckReport> r;
      for (auto [b, m2] : {std::pair{1.0, 0.0}, {2.0, 2.0}, {2.0, 1.0}, {3.0, 2.0}})
        r.push_back(check_mode_oracle(b, m2, mus, ts));
      r.push_back(check_branch_continuity(20.0));
      r.push_back(check_branch_jump(20.0));
      return r;
    });
  }
  if (all || selector == "decay") {
    for (const auto& cfg : standard_decay_configs())
      launch([cfg, &calibration] { return check_decay_bounds(cfg, calibration); });
  }
  if (all || selector == "gn") {
    launch([&calibration] {
      std::vector<CheckReport> r;
      GnCheckConfig cfg = standard_gn_config();
      for (int k = 0; k < 3; ++k) {
        r.push_back(check_gn(cfg, calibration));
        ++cfg.seed;
      }
      return r;
    });
  }
  if (all || selector == "energy") {
    launch([] { return std::vector{check_energy_monotone(EnergyCheckConfig{})}; });
  }

  std::vector<CheckReport> out;
  for (auto& j : jobs)
    for (auto& r : j.get()) out.push_back(std::move(r));
  return out;
}

Calibration calibrate_standard() {
  Calibration c;
  for (const auto& cfg : standard_decay_configs()) c.decay[cfg.key()] = measure_decay_ratios(cfg);
  const GnCheckConfig gn = standard_gn_config();
  c.gn[gn.key()] = measure_gn_constant(gn);
  return c;
}

}  // namespace liewave

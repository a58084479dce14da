#include "liewave/blowup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <boost/numeric/odeint.hpp>

namespace liewave {

namespace odeint = boost::numeric::odeint;

namespace {

using OdeVector = std::array<double, 2>;

struct ComparisonSystem {
  double p;
  void operator()(const OdeVector& x, OdeVector& dxdt, double /*t*/) const {
    dxdt[0] = x[1];
    dxdt[1] = std::pow(std::abs(x[0]), p) - x[1];
  }
};

constexpr long kMaxOdeSteps = 20'000'000;

// Integrates V'' + V' = |V|^p with adaptive Dormand-Prince (dense output) and calls
// visit(t_prev, t_now, stepper) after every step until visit returns false.
template <typename Visit>
void integrate_comparison(double p, double v0, double v0dot, double t_max, Visit&& visit) {
  if (!(p > 1.0)) throw std::invalid_argument("comparison ODE requires p > 1");
  auto stepper =
      odeint::make_dense_output(1e-14, 1e-11, odeint::runge_kutta_dopri5<OdeVector>());
  stepper.initialize(OdeVector{v0, v0dot}, 0.0, 1e-4);
  const ComparisonSystem system{p};
  for (long n = 0; n < kMaxOdeSteps; ++n) {
    const auto [t_prev, t_now] = stepper.do_step(system);
    if (!visit(t_prev, t_now, stepper)) return;
    if (t_now >= t_max) return;
  }
}

template <typename Stepper>
double bisect_crossing(Stepper& stepper, double lo, double hi, double level) {
  OdeVector x{};
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    stepper.calc_state(mid, x);
    (x[0] >= level ? hi : lo) = mid;
  }
  return hi;
}

double mean_value(const SpectralBasis& basis, const GridField& f) {
  return basis.analyze(f).coeffs[0].real();
}

}  // namespace

std::string to_string(LifespanMethod method) {
  return method == LifespanMethod::ComparisonODE ? "comparison" : "pde";
}

LifespanMethod parse_lifespan_method(const std::string& name) {
  if (name == "comparison" || name == "ComparisonODE") return LifespanMethod::ComparisonODE;
  if (name == "pde" || name == "FullPDE") return LifespanMethod::FullPDE;
  throw std::invalid_argument("unknown lifespan method '" + name + "'");
}

ZeroMode zero_mode(const EvolutionState& state) {
  const Complex u = state.u_hat.coeffs[0];
  const Complex v = state.v_hat.coeffs[0];
  if (std::abs(u.imag()) > 1e-8 || std::abs(v.imag()) > 1e-8)
    throw std::domain_error("zero_mode: mean of a non-real field");
  return {u.real(), v.real()};
}

ComparisonCrossing comparison_crossings(double p, double v0, double v0dot,
                                        double threshold, double t_max) {
  if (v0 < 0.0 || v0dot < 0.0 || (v0 == 0.0 && v0dot == 0.0))
    throw std::invalid_argument("comparison ODE needs nonnegative, nontrivial data");
  if (!(threshold > std::max(v0, 1.0)))
    throw std::invalid_argument("threshold must exceed the initial data");
  ComparisonCrossing out;
  integrate_comparison(p, v0, v0dot, t_max, [&](double t_prev, double t_now, auto& stepper) {
    const double v = stepper.current_state()[0];
    if (!out.at_threshold && v >= threshold)
      out.at_threshold = bisect_crossing(stepper, t_prev, t_now, threshold);
    if (v >= 10.0 * threshold) {
      out.at_ten_threshold = bisect_crossing(stepper, t_prev, t_now, 10.0 * threshold);
      return false;
    }
    return t_now < t_max;
  });
  if (out.at_threshold && out.at_ten_threshold) {
    // V ~ C (T - t)^{-2/(p-1)}  =>  T - t(theta) ~ theta^{-(p-1)/2}.
    const double q = std::pow(10.0, 0.5 * (p - 1.0));
    out.extrapolated = (q * *out.at_ten_threshold - *out.at_threshold) / (q - 1.0);
  }
  return out;
}

std::optional<double> comparison_lifespan(double p, double v0, double v0dot,
                                          double threshold, double t_max) {
  return comparison_crossings(p, v0, v0dot, threshold, t_max).extrapolated;
}

std::vector<double> comparison_trajectory(double p, double v0, double v0dot,
                                          const std::vector<double>& times, double cap) {
  std::vector<double> out(times.size(), std::numeric_limits<double>::infinity());
  if (times.empty()) return out;
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("comparison_trajectory: times must be increasing");
  size_t next = 0;
  while (next < times.size() && times[next] <= 0.0) out[next++] = v0;
  if (next == times.size()) return out;
  integrate_comparison(p, v0, v0dot, times.back(), [&](double, double t_now, auto& stepper) {
    OdeVector x{};
    while (next < times.size() && times[next] <= t_now) {
      stepper.calc_state(times[next], x);
      out[next++] = x[0];
    }
    return next < times.size() && stepper.current_state()[0] < cap;
  });
  return out;
}

BlowupDetection detect_blowup(const SpectralBasis& basis, const WaveParams& params,
                              const GridField& u0, const GridField& u1,
                              const SchemeConfig& cfg, double threshold,
                              double t_max) {
  if (!(threshold >= 1e4)) throw std::invalid_argument("detect_blowup: threshold must be >= 1e4");
  if (!(t_max > 0.0)) throw std::invalid_argument("detect_blowup: t_max must be positive");
  SchemeConfig guarded = cfg;
  guarded.overflow_guard = std::max(cfg.overflow_guard, 10.0 * threshold);
  DuhamelStepper stepper(basis, params, guarded);

  BlowupDetection out;
  EvolutionState state = make_state(basis, u0, u1, true);
  auto sample = [&](const EvolutionState& s) {
    double sup = 0.0;
    const SpectralField f = stepper.forcing(s.u_hat, &sup);
    const ZeroMode z = zero_mode(s);
    return ZeroModeSample{s.time, z.value, z.rate, f.coeffs[0].real(), sup};
  };
  out.history.push_back(sample(state));
  double dt = cfg.dt;
  while (state.time < t_max) {
    const double h = std::min(dt, t_max - state.time);
    EvolutionState trial = state;
    const bool ok = stepper.step(trial, h);
    bool accept = ok;
    ZeroModeSample next;
    if (ok) {
      trial.time = state.time + h;
      next = sample(trial);
      const double prev = out.history.back().sup;
      accept = std::isfinite(next.sup) && !(next.sup > 1.0 && next.sup > 2.0 * prev);
    }
    if (!accept) {
      dt *= 0.5;
      if (dt < 1e-12) {
        out.underflow = true;
        out.time = state.time;
        break;
      }
      continue;
    }
    state = std::move(trial);
    out.history.push_back(next);
    if (next.sup >= threshold) {
      out.time = state.time;
      break;
    }
  }
  out.last_time = state.time;
  return out;
}

double integrated_identity_residual(const std::vector<ZeroModeSample>& history,
                                    const WaveParams& params) {
  if (history.empty()) return 0.0;
  const ZeroModeSample& first = history.front();
  double forcing_integral = 0.0, mean_integral = 0.0, worst = 0.0;
  for (size_t i = 1; i < history.size(); ++i) {
    const double h = history[i].t - history[i - 1].t;
    forcing_integral += 0.5 * h * (history[i].mean_power + history[i - 1].mean_power);
    mean_integral += 0.5 * h * (history[i].mean + history[i - 1].mean);
    const double lhs = history[i].mean_rate - first.mean_rate +
                       params.b * (history[i].mean - first.mean) + params.m2 * mean_integral;
    worst = std::max(worst, std::abs(lhs - forcing_integral));
  }
  return worst;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line needs >= 2 points");
  Eigen::Map<const Eigen::VectorXd> xs(x.data(), static_cast<Index>(n));
  Eigen::Map<const Eigen::VectorXd> ys(y.data(), static_cast<Index>(n));
  const double mx = xs.mean();
  const double my = ys.mean();
  const double sxx = (xs.array() - mx).square().sum();
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = ((xs.array() - mx) * (ys.array() - my)).sum() / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    const double ssr =
        (ys.array() - fit.intercept - fit.slope * xs.array()).square().sum();
    const double se = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    const boost::math::students_t dist(static_cast<double>(n - 2));
    fit.slope_ci = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  } else {
    fit.slope_ci = std::numeric_limits<double>::infinity();
  }
  return fit;
}

ScanResult lifespan_scan(double p, const std::vector<double>& epsilons,
                         LifespanMethod method, const ScanSetup& setup) {
  if (epsilons.size() < 3) throw std::invalid_argument("lifespan_scan needs >= 3 epsilons");
  for (double e : epsilons)
    if (!(e > 0.0)) throw std::invalid_argument("epsilons must be positive");
  if (!setup.basis) throw std::invalid_argument("lifespan_scan needs a spectral basis");
  WaveParams params = setup.params;
  params.p = p;
  params.validate();

  const double mean0 = mean_value(*setup.basis, setup.u0);
  const double mean1 = mean_value(*setup.basis, setup.u1);
  if (method == LifespanMethod::FullPDE) {
    const bool nonneg = (setup.u0.values.real().array() >= -1e-12).all() &&
                        (setup.u1.values.real().array() >= -1e-12).all();
    if (!nonneg || (mean0 <= 0.0 && mean1 <= 0.0))
      throw std::invalid_argument("FullPDE scan needs nonnegative, nontrivial data");
  }

  auto run = [&](double eps) {
    LifespanRecord rec;
    rec.epsilon = eps;
    rec.method = method;
    rec.threshold = setup.threshold;
    if (method == LifespanMethod::ComparisonODE) {
      rec.lifespan = comparison_lifespan(p, eps * mean0, eps * mean1, setup.threshold, setup.t_max);
      return rec;
    }
    GridField a{eps * setup.u0.values};
    GridField b{eps * setup.u1.values};
    const auto det = detect_blowup(*setup.basis, params, a, b, setup.cfg, setup.threshold,
                                   setup.t_max);
    rec.lifespan = det.time;
    if (det.underflow) rec.flags = "dt_underflow";
    return rec;
  };

  std::vector<std::future<LifespanRecord>> jobs;
  for (double eps : epsilons) jobs.push_back(std::async(std::launch::async, run, eps));

  ScanResult result;
  result.expected_slope = 1.0 - p;
  std::vector<double> xs, ys;
  for (auto& job : jobs) {
    LifespanRecord rec = job.get();
    if (rec.finite()) {
      xs.push_back(std::log(rec.epsilon));
      ys.push_back(std::log(*rec.lifespan));
    } else {
      std::ostringstream os;
      os << "no blow-up for epsilon=" << rec.epsilon << "; excluded from fit";
      result.warnings.push_back(os.str());
      if (!rec.flags.empty()) rec.flags += ';';
      rec.flags += "infinite";
    }
    result.records.push_back(std::move(rec));
  }
  result.finite_count = static_cast<int>(xs.size());
  if (xs.size() >= 2) {
    const LineFit fit = fit_line(xs, ys);
    result.slope = fit.slope;
    result.intercept = fit.intercept;
    result.slope_ci = fit.slope_ci;
  } else {
    result.slope = result.intercept = result.slope_ci = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace liewave

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "liewave/semilinear.hpp"

namespace liewave {

namespace {

struct LagKernel {
  // Indexed [block][lag]: exp(-b s/2) A1(s) and its time derivative at s = lag*h.
  std::vector<std::vector<double>> g;
  std::vector<std::vector<double>> dg;
};

LagKernel build_lag_kernel(const Dual& dual, const WaveParams& params, double h,
                           size_t lags) {
  LagKernel k;
  k.g.resize(static_cast<size_t>(dual.size()));
  k.dg.resize(static_cast<size_t>(dual.size()));
  for (Index r = 0; r < dual.size(); ++r) {
    const double kappa = std::pow(dual.rep(r).casimir, params.alpha) + params.m2;
    auto& g = k.g[static_cast<size_t>(r)];
    auto& dg = k.dg[static_cast<size_t>(r)];
    g.resize(lags);
    dg.resize(lags);
    for (size_t j = 0; j < lags; ++j) {
      const auto e = damped_phi_pair(static_cast<double>(j) * h, params.b, kappa);
      g[j] = e.a1;
      dg[j] = e.a0 - 0.5 * params.b * e.a1;
    }
  }
  return k;
}

double x_distance(const std::vector<EvolutionState>& a, const std::vector<EvolutionState>& b,
                  const std::vector<double>& times, const WaveParams& params) {
  double sup = 0.0;
  const bool weighted = use_weighted_norm(params);
  for (size_t j = 0; j < a.size(); ++j) {
    const SpectralField du = a[j].u_hat - b[j].u_hat;
    const SpectralField dv = a[j].v_hat - b[j].v_hat;
    sup = std::max(sup, x_norm_sample(times[j], plancherel_norm(du),
                                      plancherel_norm(apply_fractional_laplacian(du, params.alpha)),
                                      plancherel_norm(dv), params, weighted));
  }
  return sup;
}

}  // namespace

PicardReport picard_solve(const SpectralBasis& basis, const WaveParams& params,
                          const GridField& u0, const GridField& u1, double T,
                          double tol, int max_iter, const SchemeConfig& cfg) {
  if (!(T > 0.0)) throw std::invalid_argument("picard_solve: T must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("picard_solve: max_iter must be >= 1");
  DuhamelStepper stepper(basis, params, cfg);
  const auto nodes = static_cast<size_t>(std::ceil(T / cfg.dt - 1e-9));
  const double h = T / static_cast<double>(nodes);
  const Dual& dual = *basis.dual();

  PicardReport report;
  report.times.resize(nodes + 1);
  for (size_t j = 0; j <= nodes; ++j) report.times[j] = static_cast<double>(j) * h;

  // Linear part u^#, advanced exactly node to node.
  std::vector<EvolutionState> linear(nodes + 1);
  linear[0] = make_state(basis, u0, u1, true);
  const StepPropagator step(dual, params, h);
  for (size_t j = 1; j <= nodes; ++j) {
    linear[j] = linear[j - 1];
    step.advance(linear[j - 1].u_hat, linear[j - 1].v_hat, linear[j].u_hat, linear[j].v_hat);
    linear[j].time = report.times[j];
  }
  const LagKernel kernel = build_lag_kernel(dual, params, h, nodes + 1);

  std::vector<EvolutionState> current = linear;
  for (int iter = 1; iter <= max_iter; ++iter) {
    std::vector<SpectralField> forcing;
    forcing.reserve(nodes + 1);
    bool finite = true;
    for (const auto& s : current) {
      double sup = 0.0;
      forcing.push_back(stepper.forcing(s.u_hat, &sup));
      finite = finite && std::isfinite(sup) && sup <= cfg.overflow_guard;
    }
    if (!finite) break;

    std::vector<EvolutionState> next = linear;
    for (size_t j = 1; j <= nodes; ++j) {
      auto& u = next[j].u_hat.coeffs;
      auto& v = next[j].v_hat.coeffs;
      for (size_t i = 0; i <= j; ++i) {
        const double w = (i == 0 || i == j) ? 0.5 * h : h;
        const size_t lag = j - i;
        const auto& f = forcing[i].coeffs;
        for (Index r = 0; r < dual.size(); ++r) {
          const auto rr = static_cast<size_t>(r);
          const Index off = dual.offset(r);
          const Index len = static_cast<Index>(dual.rep(r).dim) * dual.rep(r).dim;
          u.segment(off, len) += (w * kernel.g[rr][lag]) * f.segment(off, len);
          v.segment(off, len) += (w * kernel.dg[rr][lag]) * f.segment(off, len);
        }
      }
    }

    const double dist = x_distance(next, current, report.times, params);
    if (!report.distances.empty())
      report.contraction_ratios.push_back(report.distances.back() > 0.0
                                              ? dist / report.distances.back()
                                              : 0.0);
    report.distances.push_back(dist);
    report.iterations = iter;
    current = std::move(next);
    if (!std::isfinite(dist)) break;
    if (dist < tol) {
      report.converged = true;
      break;
    }
  }

  report.solution = std::move(current);
  for (const auto& s : report.solution) report.trace.record(s.time, s, params);
  return report;
}

}  // namespace liewave

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "liewave/blowup.hpp"

using namespace liewave;

namespace {

GridField constant(const SpectralBasis& basis, double c) {
  return GridField{Eigen::VectorXcd::Constant(basis.grid().size(), Complex(c, 0.0))};
}

// 0.5 + 0.2 cos(x1) + 0.1 cos(x1 + x2): positive, real, band 1.
GridField wavy(const SpectralBasis& basis) {
  return basis.sample([](const auto& x) {
    return Complex(0.5 + 0.2 * std::cos(x[0]) + 0.1 * std::cos(x[0] + x[1]), 0.0);
  });
}

// Independent fixed-step RK4 for V'' + V' = |V|^p; returns the first time V
// reaches `level`, located by linear interpolation between steps.
double rk4_crossing(double p, double v0, double v1, double level, double h) {
  auto f = [p](const std::array<double, 2>& x) {
    return std::array<double, 2>{x[1], std::pow(std::abs(x[0]), p) - x[1]};
  };
  std::array<double, 2> x{v0, v1};
  double t = 0.0;
  for (;;) {
    const auto k1 = f(x);
    const auto k2 = f({x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]});
    const auto k3 = f({x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]});
    const auto k4 = f({x[0] + h * k3[0], x[1] + h * k3[1]});
    std::array<double, 2> y{};
    for (int i = 0; i < 2; ++i) y[i] = x[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (y[0] >= level) return t + h * (level - x[0]) / (y[0] - x[0]);
    x = y;
    t += h;
  }
}

}  // namespace

TEST_CASE("lifespan method names") {
  CHECK(parse_lifespan_method("comparison") == LifespanMethod::ComparisonODE);
  CHECK(parse_lifespan_method("FullPDE") == LifespanMethod::FullPDE);
  CHECK(to_string(LifespanMethod::FullPDE) == "pde");
  CHECK_THROWS_AS(parse_lifespan_method("guess"), std::invalid_argument);
}

TEST_CASE("zero mode") {
  const SpectralBasis basis(GroupSpec::torus(2, 3, 2.0));
  const auto s = make_state(basis, constant(basis, 2.5), constant(basis, -0.5));
  const ZeroMode z = zero_mode(s);
  CHECK(z.value == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(z.rate == doctest::Approx(-0.5).epsilon(1e-14));

  // Mean equals the Haar quadrature of the grid values.
  const GridField g = wavy(basis);
  const auto sw = make_state(basis, g, constant(basis, 0.0));
  const double direct = (basis.grid().weights.array() * g.values.real().array()).sum();
  CHECK(std::abs(zero_mode(sw).value - direct) <= 1e-10);
  CHECK(std::abs(zero_mode(sw).value - 0.5) <= 1e-12);

  auto bad = s;
  bad.u_hat.coeffs[0] = Complex(1.0, 1e-6);
  CHECK_THROWS_AS(zero_mode(bad), std::domain_error);
}

TEST_CASE("comparison ODE") {
  SUBCASE("large data blows up quickly") {
    const auto T = comparison_lifespan(2.0, 10.0, 0.0, 1e6);
    REQUIRE(T.has_value());
    CHECK(*T < 1.0);
    // Undamped V'' = V^2 from V(0)=10 blows up at
    // int_10^inf dV / sqrt(2/3 (V^3 - 1000)) = 0.94061; damping delays it.
    CHECK(*T > 0.94061);
  }
  SUBCASE("crossings agree with an independent RK4") {
    const auto c = comparison_crossings(2.0, 1.0, 1.0, 1e4);
    REQUIRE(c.at_threshold.has_value());
    const double ref = rk4_crossing(2.0, 1.0, 1.0, 1e4, 1e-5);
    CHECK(std::abs(*c.at_threshold - ref) <= 1e-6 * ref);
    REQUIRE(c.at_ten_threshold.has_value());
    REQUIRE(c.extrapolated.has_value());
    CHECK(*c.at_threshold < *c.at_ten_threshold);
    CHECK(*c.extrapolated > *c.at_ten_threshold);
    CHECK(*c.extrapolated - *c.at_ten_threshold < *c.at_ten_threshold - *c.at_threshold);
  }
  SUBCASE("threshold insensitivity") {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto a = comparison_lifespan(p, 0.1, 0.1, 1e6);
      const auto b = comparison_lifespan(p, 0.1, 0.1, 1e7);
      REQUIRE(a.has_value());
      REQUIRE(b.has_value());
      CHECK(std::abs(*a - *b) <= 0.01 * *a);
    }
  }
  SUBCASE("monotone in the data") {
    double prev = 0.0;
    for (double v : {0.4, 0.2, 0.1, 0.05}) {
      const auto T = comparison_lifespan(2.0, v, v, 1e6);
      REQUIRE(T.has_value());
      CHECK(*T > prev);
      prev = *T;
    }
  }
  SUBCASE("invalid data") {
    CHECK_THROWS_AS(comparison_lifespan(2.0, 0.0, 0.0, 1e6), std::invalid_argument);
    CHECK_THROWS_AS(comparison_lifespan(2.0, -1.0, 1.0, 1e6), std::invalid_argument);
    CHECK_THROWS_AS(comparison_lifespan(2.0, 1.0, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(comparison_lifespan(1.0, 1.0, 0.0, 1e6), std::invalid_argument);
  }
  SUBCASE("short horizon gives no lifespan") {
    CHECK_FALSE(comparison_lifespan(2.0, 1e-3, 0.0, 1e6, 10.0).has_value());
  }
}

TEST_CASE("comparison trajectory") {
  const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
  const auto v = comparison_trajectory(2.0, 0.3, 0.1, times);
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  State y{0.3, 0.1};
  double t = 0.0;
  CHECK(v[0] == 0.3);
  for (size_t i = 1; i < times.size(); ++i) {
    odeint::integrate_adaptive(
        odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(1e-14, 1e-13),
        [](const State& x, State& dx, double) {
          dx[0] = x[1];
          dx[1] = x[0] * x[0] - x[1];
        },
        y, t, times[i], 1e-3);
    t = times[i];
    CHECK(std::abs(v[i] - y[0]) <= 1e-9 * std::max(1.0, y[0]));
  }
  const auto capped = comparison_trajectory(2.0, 10.0, 0.0, {0.1, 5.0}, 1e3);
  CHECK(std::isfinite(capped[0]));
  CHECK(std::isinf(capped[1]));
  CHECK_THROWS_AS(comparison_trajectory(2.0, 1.0, 0.0, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("detect blowup") {
  const SpectralBasis basis(GroupSpec::torus(2, 2, 2.0));
  SchemeConfig cfg;
  cfg.dt = 0.02;
  SUBCASE("damped, large constant data") {
    const WaveParams params{0.5, 1.0, 0.0, 2.0};
    const auto d = detect_blowup(basis, params, constant(basis, 0.5), constant(basis, 0.5), cfg,
                                 1e6, 100.0);
    REQUIRE(d.time.has_value());
    CHECK_FALSE(d.underflow);
    // The comparison ODE is a lower bound with equality for constant data.
    const auto T = comparison_lifespan(2.0, 0.5, 0.5, 1e6);
    REQUIRE(T.has_value());
    CHECK(std::abs(*d.time - *T) < 0.05);
  }
  SUBCASE("linear run never blows up") {
    cfg.nonlinear = false;
    const WaveParams params{0.5, 1.0, 0.0, 2.0};
    const auto d = detect_blowup(basis, params, constant(basis, 0.5), constant(basis, 0.5), cfg,
                                 1e6, 20.0);
    CHECK_FALSE(d.time.has_value());
    CHECK(d.last_time == doctest::Approx(20.0));
  }
  SUBCASE("mass case, small data") {
    const WaveParams params{0.75, 2.0, 2.0, 2.0};
    const auto d = detect_blowup(basis, params, constant(basis, 1e-3), constant(basis, 1e-3), cfg,
                                 1e6, 50.0);
    CHECK_FALSE(d.time.has_value());
    CHECK(d.last_time == doctest::Approx(50.0));
    CHECK(d.history.back().sup < 1e-3);
  }
  SUBCASE("argument checks") {
    const WaveParams params;
    CHECK_THROWS_AS(detect_blowup(basis, params, constant(basis, 1.0), constant(basis, 0.0), cfg,
                                  1e3, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(detect_blowup(basis, params, constant(basis, 1.0), constant(basis, 0.0), cfg,
                                  1e6, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("mean identity and comparison bounds along a run") {
  const SpectralBasis basis(GroupSpec::torus(2, 3, 2.0));
  const WaveParams params{0.5, 1.0, 0.0, 2.0};
  SchemeConfig cfg;
  cfg.dt = 1e-3;
  const GridField u0 = wavy(basis);
  const GridField u1 = constant(basis, 0.1);
  const auto d = detect_blowup(basis, params, u0, u1, cfg, 1e4, 2.0);
  REQUIRE(d.history.size() > 100);
  CHECK(integrated_identity_residual(d.history, params) <= 1e-4);

  const double m0 = d.history.front().mean;
  const double r0 = d.history.front().mean_rate;
  std::vector<double> times;
  for (const auto& s : d.history) times.push_back(s.t);
  const auto V = comparison_trajectory(params.p, m0, r0, times);
  for (size_t i = 0; i < times.size(); ++i) {
    const auto& s = d.history[i];
    CHECK(s.mean >= V[i] - 1e-6);
    CHECK(s.mean >= m0 + r0 * (1.0 - std::exp(-s.t)) - 1e-6);
  }
  // Jensen makes the bound strict for nonconstant data.
  CHECK(d.history.back().mean > V.back());

  // The residual detects a wrong damping coefficient.
  WaveParams wrong = params;
  wrong.b = 2.0;
  CHECK(integrated_identity_residual(d.history, wrong) > 1e-2);
}

TEST_CASE("line fit") {
  const auto exact = fit_line({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(exact.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(exact.slope_ci <= 1e-12);
  // y = x + (+1,-1,-1,+1): slope 1, sxx 5, residual variance 4/2,
  // half-width t_{0.975,2} sqrt(2/5).
  const auto noisy = fit_line({0.0, 1.0, 2.0, 3.0}, {1.0, 0.0, 1.0, 4.0});
  CHECK(noisy.slope == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(noisy.slope_ci == doctest::Approx(4.302652729696142 * std::sqrt(0.4)).epsilon(1e-9));
  CHECK(std::isinf(fit_line({0.0, 1.0}, {0.0, 1.0}).slope_ci));
  CHECK_THROWS_AS(fit_line({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_line({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("lifespan scan") {
  const SpectralBasis basis(GroupSpec::torus(2, 2, 2.0));
  ScanSetup setup;
  setup.basis = &basis;
  setup.params = WaveParams{0.5, 1.0, 0.0, 2.0};
  setup.u0 = constant(basis, 1.0);
  setup.u1 = constant(basis, 1.0);
  setup.cfg.dt = 0.02;

  SUBCASE("comparison scan with one infinite record") {
    setup.t_max = 200.0;
    const auto r =
        lifespan_scan(2.0, {1e-1, 3e-2, 1e-2, 1e-4}, LifespanMethod::ComparisonODE, setup);
    CHECK(r.records.size() == 4);
    CHECK(r.finite_count == 3);
    CHECK(r.warnings.size() == 1);
    CHECK(r.records[3].flags == "infinite");
    CHECK(r.expected_slope == -1.0);
    CHECK(r.slope < -0.5);
    CHECK(r.records[0].epsilon == 1e-1);
  }
  SUBCASE("full PDE rejects negative data") {
    setup.u0 = constant(basis, -1.0);
    CHECK_THROWS_AS(lifespan_scan(2.0, {0.5, 0.25, 0.125}, LifespanMethod::FullPDE, setup),
                    std::invalid_argument);
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(lifespan_scan(2.0, {0.5, 0.25}, LifespanMethod::ComparisonODE, setup),
                    std::invalid_argument);
    CHECK_THROWS_AS(lifespan_scan(2.0, {0.5, -0.25, 0.1}, LifespanMethod::ComparisonODE, setup),
                    std::invalid_argument);
  }
}

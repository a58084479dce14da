#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "liewave/group_harmonics.hpp"
#include "liewave/mode_propagator.hpp"

using namespace liewave;
using std::numbers::pi;

namespace {

double close(double a, double b) { return std::abs(a - b); }

// Simpson's rule with many panels on a smooth integrand.
template <typename F>
double simpson(F&& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

EvolutionState random_state(const DualPtr& dual, std::uint64_t seed) {
  return {random_band_limited(dual, seed, 1.0, true), random_band_limited(dual, seed + 100, 1.0, true),
          0.0};
}

}  // namespace

TEST_CASE("discriminant") {
  CHECK(discriminant(0.0, 1.0, 0.0) == 0.25);
  CHECK(discriminant(0.25, 1.0, 0.0) == 0.0);
  CHECK(discriminant(2.0, 2.0, 2.0) == -3.0);
  const auto m = ModeCoefficients::from_casimir(16.0, WaveParams{0.5, 1.0, 0.0, 2.0});
  CHECK(m.mu == doctest::Approx(4.0));
  CHECK(m.disc == doctest::Approx(0.25 - 4.0));
}

TEST_CASE("wave parameter validation") {
  CHECK_NOTHROW(WaveParams{}.validate());
  CHECK_THROWS_AS((WaveParams{0.0, 1, 0, 2}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((WaveParams{1.5, 1, 0, 2}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((WaveParams{0.5, -1, 0, 2}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((WaveParams{0.5, 1, -1, 2}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((WaveParams{0.5, 1, 0, 1}).validate(), std::invalid_argument);
}

TEST_CASE("phi pair") {
  SUBCASE("examples") {
    auto a = phi_pair(3.0, 0.0);
    CHECK(a.a0 == 1.0);
    CHECK(a.a1 == 3.0);
    a = phi_pair(2.0, 0.25);
    CHECK(a.a0 == doctest::Approx(1.5430806348152437).epsilon(1e-14));
    CHECK(a.a1 == doctest::Approx(2.3504023872876029).epsilon(1e-14));
    a = phi_pair(pi, -0.25);
    CHECK(std::abs(a.a0) < 1e-15);
    CHECK(a.a1 == doctest::Approx(2.0).epsilon(1e-15));
    a = phi_pair(0.0, 7.0);
    CHECK(a.a0 == 1.0);
    CHECK(a.a1 == 0.0);
  }
  SUBCASE("A0 = dA1/dt on a (t, disc) lattice") {
    const double h = 1e-5;
    for (double disc : {0.0, 1e-12, -1e-12, 1e-8, -1e-8, 1.0, -1.0, 100.0, -100.0}) {
      for (double t : {0.05, 0.3, 1.0, 2.0}) {
        const double fd = (phi_pair(t + h, disc).a1 - phi_pair(t - h, disc).a1) / (2 * h);
        const double a0 = phi_pair(t, disc).a0;
        CHECK(close(fd, a0) <= 1e-6 * std::max(1.0, std::abs(a0)));
      }
    }
  }
  SUBCASE("series and closed form agree at the switch") {
    for (double t : {1.0, 10.0}) {
      for (double sign : {1.0, -1.0}) {
        const double disc_in = sign * 0.999e-6 / (t * t);
        const double disc_out = sign * 1.001e-6 / (t * t);
        const auto in = phi_pair(t, disc_in);
        const auto out = phi_pair(t, disc_out);
        // Remove the exact first-order change over the z gap.
        const double dz = (disc_out - disc_in) * t * t;
        CHECK(close(out.a0 - in.a0, dz / 2) <= 1e-15);
        CHECK(close(out.a1 - in.a1, t * dz / 6) <= 1e-15 * t);
      }
    }
  }
  SUBCASE("series accuracy") {
    const double disc = 0.9e-6;
    const auto s = phi_pair(1.0, disc);
    const double w = std::sqrt(disc);
    CHECK(close(s.a0, std::cosh(w)) <= 1e-16 * 4);
    CHECK(close(s.a1, std::sinh(w) / w) <= 1e-16 * 4);
  }
  SUBCASE("first-order change across disc = 0") {
    for (double t = 0.0; t <= 20.0; t += 0.5) {
      const auto ref = phi_pair(t, 0.0);
      for (double d : {1e-12, -1e-12}) {
        const auto v = phi_pair(t, d);
        CHECK(close(v.a0 - ref.a0, d * t * t / 2) <= 1e-15);
        CHECK(close(v.a1 - ref.a1, d * t * t * t / 6) <= 1e-13);
      }
    }
  }
}

TEST_CASE("damped phi pair") {
  SUBCASE("matches exp(-bt/2) phi_pair") {
    for (double b : {0.0, 1.0, 3.0}) {
      for (double kappa : {0.0, 0.2, 0.25, 1.0, 30.0}) {
        for (double t : {0.0, 0.5, 3.0, 12.0}) {
          const auto d = damped_phi_pair(t, b, kappa);
          const auto p = phi_pair(t, discriminant(kappa, b, 0.0));
          const double damp = std::exp(-b * t / 2);
          CHECK(close(d.a0, damp * p.a0) <= 1e-12 * std::max(1.0, std::abs(damp * p.a0)));
          CHECK(close(d.a1, damp * p.a1) <= 1e-12 * std::max(1.0, std::abs(damp * p.a1)));
        }
      }
    }
  }
  SUBCASE("finite for long times") {
    const auto d = damped_phi_pair(5000.0, 10.0, 1e-3);
    CHECK(std::isfinite(d.a0));
    CHECK(std::isfinite(d.a1));
    // slow root -kappa/(w + b/2) ~ -1e-4
    CHECK(d.a0 == doctest::Approx(0.5 * std::exp(-1e-3 / (std::sqrt(25.0 - 1e-3) + 5.0) * 5000.0))
                      .epsilon(1e-9));
  }
  SUBCASE("other scalar types") {
    const auto f = evolve_mode<float>({1.0f, 0.0f}, {0.5f, 0.0f}, 2.0f, 3.0f, 1.0f, 0.5f);
    const auto d = evolve_mode<double>({1.0, 0.0}, {0.5, 0.0}, 2.0, 3.0, 1.0, 0.5);
    CHECK(std::abs(f.c.real() - d.c.real()) < 1e-5);
    const auto l = evolve_mode<long double>({1.0L, 0.0L}, {0.5L, 0.0L}, 2.0L, 3.0L, 1.0L, 0.5L);
    CHECK(std::abs(static_cast<double>(l.c.real()) - d.c.real()) < 1e-14);
  }
}

TEST_CASE("evolve_mode") {
  SUBCASE("examples") {
    auto m = evolve_mode<double>(1.0, 1.0, std::log(2.0), 0.0, 1.0, 0.0);
    CHECK(m.c.real() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(m.cdot.real() == doctest::Approx(0.5).epsilon(1e-14));
    m = evolve_mode<double>(1.0, 0.0, 2.0, 0.25, 1.0, 0.0);
    CHECK(m.c.real() == doctest::Approx(0.7357588823428847).epsilon(1e-14));
    const Complex c0(0.3, -2.0), c1(-1.1, 4.0);
    m = evolve_mode<double>(c0, c1, 0.0, 3.7, 2.0, 1.0);
    CHECK(m.c == c0);
    CHECK(m.cdot == c1);
  }
  SUBCASE("analytic oracle for mu = 0, b = 1") {
    for (double t = 0.0; t <= 20.0; t += 0.25) {
      const auto m = evolve_mode<double>(0.7, -1.3, t, 0.0, 1.0, 0.0);
      CHECK(close(m.c.real(), 0.7 - 1.3 * (1.0 - std::exp(-t))) <= 1e-12);
      CHECK(close(m.cdot.real(), -1.3 * std::exp(-t)) <= 1e-12);
    }
  }
  SUBCASE("ODE residual with five-point stencils") {
    const double h = 1e-3;
    for (auto [b, m2] : {std::pair{1.0, 0.0}, {2.0, 2.0}, {2.0, 1.0}, {3.0, 2.0}, {0.0, 0.0}}) {
      for (double mu : {0.0, 1.0 / 16.0, 0.25 - 1e-9, 0.25, 0.5, 10.0}) {
        for (double t : {0.5, 3.0, 11.0}) {
          auto c = [&](double s) { return evolve_mode<double>(0.8, -0.6, s, mu, b, m2).c.real(); };
          const double d1 = (-c(t + 2 * h) + 8 * c(t + h) - 8 * c(t - h) + c(t - 2 * h)) / (12 * h);
          const double d2 =
              (-c(t + 2 * h) + 16 * c(t + h) - 30 * c(t) + 16 * c(t - h) - c(t - 2 * h)) / (12 * h * h);
          CHECK(std::abs(d2 + b * d1 + (mu + m2) * c(t)) <= 1e-7 * 0.8);
          CHECK(close(d1, evolve_mode<double>(0.8, -0.6, t, mu, b, m2).cdot.real()) <= 1e-9);
        }
      }
    }
  }
  SUBCASE("composition") {
    for (double mu : {0.0, 0.25, 0.3, 7.0}) {
      const Complex c0(1.0, 0.5), c1(-0.4, 0.2);
      const auto a = evolve_mode<double>(c0, c1, 1.7, mu, 1.5, 0.3);
      const auto b = evolve_mode<double>(a.c, a.cdot, 2.6, mu, 1.5, 0.3);
      const auto direct = evolve_mode<double>(c0, c1, 4.3, mu, 1.5, 0.3);
      CHECK(std::abs(b.c - direct.c) <= 1e-10);
      CHECK(std::abs(b.cdot - direct.cdot) <= 1e-10);
    }
  }
}

TEST_CASE("duhamel weight") {
  for (double b : {0.0, 1.0, 2.0, 3.0}) {
    for (double kappa : {0.0, 1e-9, 0.05, 0.25, 1.0, 2.0, 40.0}) {
      if (b == 0.0 && kappa == 0.0) continue;
      for (double t : {1e-3, 0.01, 0.5, 4.0}) {
        const double oracle = simpson([&](double s) { return damped_phi_pair(s, b, kappa).a1; }, 0.0, t);
        CHECK(close(duhamel_weight(t, b, kappa), oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
      }
    }
  }
  CHECK(duhamel_weight(0.0, 1.0, 1.0) == 0.0);
  CHECK(duhamel_weight(2.0, 1.0, 0.0) == doctest::Approx(2.0 - 1.0 + std::exp(-2.0)).epsilon(1e-13));
  CHECK(duhamel_weight(2.0, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("regions") {
  CHECK(classify_region(RepIndex{GroupKind::Torus, {0, 0}, 1, 0.0}, 0.5) == Region::R1);
  CHECK(classify_region(RepIndex{GroupKind::Torus, {1}, 1, 1.0}, 0.5) == Region::R2);
  const Dual dual(GroupSpec::torus(2, 4));
  for (double alpha : {0.05, 0.5, 1.0})
    for (const auto& r : dual.reps())
      CHECK((classify_region(r, alpha) == Region::R1) == r.is_trivial());
  const Dual so3(GroupSpec::so3(5));
  for (const auto& r : so3.reps())
    CHECK((classify_region(r, 0.1) == Region::R1) == r.is_trivial());
}

TEST_CASE("decay envelopes") {
  CHECK(decay_envelope(1.0, {0.5, 2.0, 2.0, 2.0}, NormKind::L2) == doctest::Approx(std::exp(-1.0)));
  CHECK(decay_envelope(3.0, {0.5, 2.0, 1.0, 2.0}, NormKind::L2) == doctest::Approx(4 * std::exp(-3.0)));
  CHECK(decay_envelope(2.0, {0.5, 3.0, 2.0, 2.0}, NormKind::L2) == doctest::Approx(std::exp(-2.0)));
  for (auto kind : {NormKind::Seminorm, NormKind::TimeDeriv})
    CHECK(decay_envelope(2.0, {0.5, 3.0, 2.0, 2.0}, kind) ==
          decay_envelope(2.0, {0.5, 3.0, 2.0, 2.0}, NormKind::L2));
  const WaveParams p{0.5, 1.0, 0.0, 2.0};
  CHECK(decay_envelope(3.0, p, NormKind::L2) == 4.0);
  CHECK(decay_envelope(3.0, p, NormKind::Seminorm) == 0.5);
  CHECK(decay_envelope(3.0, p, NormKind::TimeDeriv) == 0.25);
}

TEST_CASE("linear evolution of fields") {
  const auto dual = std::make_shared<const Dual>(GroupSpec::torus(2, 4));
  const WaveParams params{0.75, 1.0, 0.5, 2.0};
  SUBCASE("zero data") {
    EvolutionState z{SpectralField::zeros(dual), SpectralField::zeros(dual), 0.0};
    const auto s = linear_evolve(z, 5.0, params);
    CHECK(s.u_hat.coeffs.isZero());
    CHECK(s.v_hat.coeffs.isZero());
    CHECK(s.time == 5.0);
  }
  SUBCASE("single mode matches evolve_mode") {
    EvolutionState st{SpectralField::zeros(dual), SpectralField::zeros(dual), 1.0};
    const Index r = *dual->find({2, -1});
    const Index e = dual->offset(r);
    st.u_hat.coeffs[e] = Complex(0.3, 0.1);
    st.v_hat.coeffs[e] = Complex(-0.2, 0.4);
    const auto s = linear_evolve(st, 3.5, params);
    const auto m = evolve_mode<double>(Complex(0.3, 0.1), Complex(-0.2, 0.4), 2.5,
                                       std::pow(5.0, 0.75), 1.0, 0.5);
    CHECK(std::abs(s.u_hat.coeffs[e] - m.c) <= 1e-16);
    CHECK(std::abs(s.v_hat.coeffs[e] - m.cdot) <= 1e-16);
    CHECK(s.u_hat.coeffs.cwiseAbs().sum() == doctest::Approx(std::abs(m.c)));
  }
  SUBCASE("reality preserved on SO3") {
    const SpectralBasis basis(GroupSpec::so3(4));
    const auto st = random_state(basis.dual(), 3);
    const auto s = linear_evolve(st, 2.0, params);
    CHECK(basis.synthesize(s.u_hat).values.imag().cwiseAbs().maxCoeff() < 1e-12);
    CHECK((conjugate_reflect(s.v_hat).coeffs - s.v_hat.coeffs).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("errors") {
    const auto other = std::make_shared<const Dual>(GroupSpec::torus(2, 3));
    EvolutionState bad{SpectralField::zeros(dual), SpectralField::zeros(other), 0.0};
    CHECK_THROWS_AS(linear_evolve(bad, 1.0, params), std::invalid_argument);
    EvolutionState late{SpectralField::zeros(dual), SpectralField::zeros(dual), 2.0};
    CHECK_THROWS_AS(linear_evolve(late, 1.0, params), std::invalid_argument);
  }
  SUBCASE("energy dissipation") {
    const WaveParams wp{0.6, 1.3, 0.4, 2.0};
    const auto st = random_state(dual, 8);
    auto energy = [&](double t) {
      const auto s = linear_evolve(st, t, wp);
      const double v = plancherel_norm(s.v_hat);
      const double g = plancherel_norm(apply_fractional_laplacian(s.u_hat, wp.alpha));
      const double u = plancherel_norm(s.u_hat);
      return 0.5 * (v * v + g * g + wp.m2 * u * u);
    };
    const double h = 1e-3;
    double prev = energy(0.0);
    for (double t = 0.1; t <= 10.0; t += 0.1) {
      const double e = energy(t);
      CHECK(e <= prev + 1e-12);
      prev = e;
      const double fd = (-energy(t + 2 * h) + 8 * energy(t + h) - 8 * energy(t - h) + energy(t - 2 * h)) /
                        (12 * h);
      const double v = plancherel_norm(linear_evolve(st, t, wp).v_hat);
      CHECK(close(fd, -wp.b * v * v) <= 1e-6 * wp.b * v * v);
    }
  }
}

TEST_CASE("step propagator") {
  const auto dual = std::make_shared<const Dual>(GroupSpec::so3(3));
  const WaveParams params{0.5, 1.0, 0.0, 2.0};
  const auto st = random_state(dual, 4);
  SUBCASE("advance equals linear_evolve and tolerates aliasing") {
    const StepPropagator prop(*dual, params, 0.37);
    auto u = st.u_hat, v = st.v_hat;
    prop.advance(u, v, u, v);
    const auto ref = linear_evolve(st, 0.37, params);
    CHECK((u.coeffs - ref.u_hat.coeffs).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((v.coeffs - ref.v_hat.coeffs).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("constant forcing solves the forced mode equation") {
    // c'' + c' + kappa c = F with zero data.
    const double h = 0.8;
    const StepPropagator prop(*dual, params, h);
    auto u = SpectralField::zeros(dual), v = SpectralField::zeros(dual);
    auto f = SpectralField::zeros(dual);
    f.coeffs.setConstant(Complex(1.0, 0.0));
    prop.add_forcing(f, u, v);
    // Trivial mode: F (h - 1 + e^{-h}).
    CHECK(u.coeffs[0].real() == doctest::Approx(h - 1 + std::exp(-h)).epsilon(1e-13));
    CHECK(v.coeffs[0].real() == doctest::Approx(1 - std::exp(-h)).epsilon(1e-13));
    // l = 2: kappa = sqrt(6); c = (1 - homogeneous solution with c(0)=1) / kappa.
    const double kappa = std::sqrt(6.0);
    const auto hom = evolve_mode<double>(1.0, 0.0, h, kappa, 1.0, 0.0);
    CHECK(u.coeffs[dual->offset(2)].real() ==
          doctest::Approx((1.0 - hom.c.real()) / kappa).epsilon(1e-12));
    CHECK(v.coeffs[dual->offset(2)].real() == doctest::Approx(-hom.cdot.real() / kappa).epsilon(1e-12));
  }
}

TEST_CASE("mode table") {
  std::ostringstream os;
  write_mode_table(os, Dual(GroupSpec::torus(1, 1)), WaveParams{0.5, 1.0, 0.0, 2.0});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "rep_label,casimir,mu,disc,region");
  std::getline(is, line);
  CHECK(line == "\"(0)\",0,0,0.25,R1");
  std::getline(is, line);
  CHECK(line == "\"(-1)\",1,1,-0.75,R2");
}

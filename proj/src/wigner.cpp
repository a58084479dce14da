#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "liewave/group_harmonics.hpp"

namespace liewave {

namespace {

// Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence in x.
double jacobi_p(int n, double a, double b, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  for (int k = 2; k <= n; ++k) {
    const double s = 2.0 * k + a + b;
    const double c1 = 2.0 * k * (k + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
    const double p2 = (c2 * p1 - c3 * p0) / c1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

Eigen::MatrixXd wigner_small_d(int ell, double beta) {
  if (ell < 0) throw std::invalid_argument("wigner_small_d: negative degree");
  const int size = 2 * ell + 1;
  Eigen::MatrixXd d(size, size);
  const double x = std::cos(beta);
  const double sh = std::sin(0.5 * beta);
  const double ch = std::cos(0.5 * beta);
  for (int mp = -ell; mp <= ell; ++mp) {
    for (int m = -ell; m <= ell; ++m) {
      const int k = std::min({ell + m, ell - m, ell + mp, ell - mp});
      int a = 0, lambda = 0;
      if (k == ell + m) {
        a = mp - m;
        lambda = mp - m;
      } else if (k == ell - m) {
        a = m - mp;
      } else if (k == ell + mp) {
        a = m - mp;
      } else {
        a = mp - m;
        lambda = mp - m;
      }
      const int b = 2 * ell - 2 * k - a;
      const double norm =
          std::exp(0.5 * (log_binomial(2 * ell - k, k + a) - log_binomial(k + b, b)));
      const double sign = (lambda % 2 == 0) ? 1.0 : -1.0;
      d(mp + ell, m + ell) = sign * norm * std::pow(sh, a) * std::pow(ch, b) *
                             jacobi_p(k, a, b, x);
    }
  }
  return d;
}

Eigen::MatrixXcd wigner_big_d(int ell, const EulerZYZ& angles) {
  const Eigen::MatrixXd d = wigner_small_d(ell, angles.beta);
  Eigen::MatrixXcd out(d.rows(), d.cols());
  for (int mp = -ell; mp <= ell; ++mp)
    for (int m = -ell; m <= ell; ++m)
      out(mp + ell, m + ell) = std::polar(1.0, -(mp * angles.alpha + m * angles.gamma)) *
                               d(mp + ell, m + ell);
  return out;
}

Eigen::Matrix3d rotation_from_euler(const EulerZYZ& e) {
  using Eigen::AngleAxisd;
  using Eigen::Vector3d;
  return (AngleAxisd(e.alpha, Vector3d::UnitZ()) * AngleAxisd(e.beta, Vector3d::UnitY()) *
          AngleAxisd(e.gamma, Vector3d::UnitZ()))
      .toRotationMatrix();
}

EulerZYZ euler_from_rotation(const Eigen::Matrix3d& r) {
  EulerZYZ e;
  e.beta = std::acos(std::clamp(r(2, 2), -1.0, 1.0));
  if (std::sin(e.beta) > 1e-12) {
    e.alpha = std::atan2(r(1, 2), r(0, 2));
    e.gamma = std::atan2(r(2, 1), -r(2, 0));
  } else if (r(2, 2) > 0.0) {
    e.alpha = std::atan2(r(1, 0), r(0, 0));
  } else {
    e.alpha = std::atan2(-r(1, 0), -r(0, 0));
  }
  return e;
}

void gauss_legendre(int count, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (count < 1) throw std::invalid_argument("gauss_legendre: count must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int i = 1; i < count; ++i) {
    const double off = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = off;
    jacobi(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes = solver.eigenvalues();
  weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
}

}  // namespace liewave

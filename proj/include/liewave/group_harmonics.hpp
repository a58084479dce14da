#pragma once

// Harmonic analysis on the n-torus and on SO(3): enumeration of the unitary
// dual up to a band limit, Haar quadrature grids, Fourier analysis/synthesis
// (Peter-Weyl), Plancherel and fractional Sobolev norms.
//
// Conventions
//   analysis   u_hat(xi) = sum_x w(x) f(x) xi(x)^*
//   synthesis  f(x)      = sum_xi d_xi Tr(xi(x) u_hat(xi))
// The Haar weights sum to one, so the trivial-representation coefficient is
// the mean of the field.

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace liewave {

using Complex = std::complex<double>;
using Index = Eigen::Index;

enum class GroupKind { Torus, SO3 };

struct GroupSpec {
  GroupKind kind = GroupKind::Torus;
  int torus_dim = 1;     // ignored for SO3
  int bandlimit = 1;     // K
  double oversample = 1.0;

  static GroupSpec torus(int n, int bandlimit, double oversample = 1.0);
  static GroupSpec so3(int bandlimit, double oversample = 1.0);

  // Topological dimension (n for the torus, 3 for SO(3)).
  int dimension() const;
  // "torus2", "so3", ...
  std::string name() const;
  // Throws std::invalid_argument.
  void validate() const;

  GroupSpec with_oversample(double factor) const;
};

// Parses "torus<n>", "torus:<n>" or "so3".
GroupSpec parse_group(const std::string& name, int bandlimit,
                      double oversample);

struct RepIndex {
  GroupKind kind = GroupKind::Torus;
  std::vector<int> label;  // k in Z^n for the torus, {l} for SO(3)
  int dim = 1;
  double casimir = 0.0;

  bool is_trivial() const;
  std::string label_string() const;
};

std::vector<RepIndex> enumerate_dual(const GroupSpec& group);

double casimir_eigenvalue(const RepIndex& rep);

// The enumerated dual together with the flat coefficient layout used by
// SpectralField: block r occupies entries [offset(r), offset(r)+dim^2),
// column-major.
class Dual {
 public:
  explicit Dual(const GroupSpec& group);

  const GroupSpec& group() const { return group_; }
  std::span<const RepIndex> reps() const { return reps_; }
  const RepIndex& rep(Index r) const { return reps_[static_cast<size_t>(r)]; }
  Index size() const { return static_cast<Index>(reps_.size()); }
  Index coeff_count() const { return coeff_count_; }
  Index offset(Index r) const { return offsets_[static_cast<size_t>(r)]; }

  // Per-entry Casimir eigenvalue and block dimension.
  const Eigen::VectorXd& entry_casimir() const { return entry_casimir_; }
  const Eigen::VectorXd& entry_dim() const { return entry_dim_; }
  // Block index owning each entry.
  const std::vector<Index>& entry_block() const { return entry_block_; }
  // Entry e of the coefficients of conj(f) is
  // conj_sign[e] * conj(coeff[conj_partner[e]]).
  const std::vector<Index>& conj_partner() const { return conj_partner_; }
  const Eigen::VectorXd& conj_sign() const { return conj_sign_; }

  std::optional<Index> find(const std::vector<int>& label) const;

  bool operator==(const Dual& other) const;

 private:
  GroupSpec group_;
  std::vector<RepIndex> reps_;
  std::vector<Index> offsets_;
  Index coeff_count_ = 0;
  Eigen::VectorXd entry_casimir_;
  Eigen::VectorXd entry_dim_;
  std::vector<Index> entry_block_;
  std::vector<Index> conj_partner_;
  Eigen::VectorXd conj_sign_;
  std::map<std::vector<int>, Index> lookup_;
};

using DualPtr = std::shared_ptr<const Dual>;

struct SpectralField {
  DualPtr dual;
  Eigen::VectorXcd coeffs;
  bool real_valued = false;

  static SpectralField zeros(DualPtr dual, bool real_valued = false);

  Eigen::Map<Eigen::MatrixXcd> block(Index r);
  Eigen::Map<const Eigen::MatrixXcd> block(Index r) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(Complex s);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(Complex s, SpectralField a);

// Throws std::invalid_argument when the two fields live on different duals.
void require_same_dual(const SpectralField& a, const SpectralField& b);

struct QuadratureGrid {
  GroupSpec group;
  // Tensor shape of the node set, axis 0 fastest. Torus: N per dimension.
  // SO(3): {2B (alpha), B (beta), 2B (gamma)}.
  std::vector<Index> shape;
  // One row per node; columns are the angles (x_1..x_n, or alpha,beta,gamma).
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;

  Index size() const { return weights.size(); }
};

QuadratureGrid build_grid(const GroupSpec& group);

struct GridField {
  Eigen::VectorXcd values;

  Index size() const { return values.size(); }
};

// Precomputed transform tables for one group/grid pair.
class SpectralBasis {
 public:
  explicit SpectralBasis(const GroupSpec& group);

  const GroupSpec& group() const { return grid_.group; }
  const DualPtr& dual() const { return dual_; }
  const QuadratureGrid& grid() const { return grid_; }

  SpectralField analyze(const GridField& field) const;
  GridField synthesize(const SpectralField& spec) const;

  // Samples a callable f(node_row) -> Complex on the grid.
  template <typename F>
  GridField sample(F&& f) const {
    GridField out{Eigen::VectorXcd(grid_.size())};
    for (Index i = 0; i < grid_.size(); ++i)
      out.values[i] = f(grid_.nodes.row(i));
    return out;
  }

 private:
  struct TorusTables {
    Eigen::MatrixXcd forward;   // (2K+1) x N, exp(-i k x_j) / N
    Eigen::MatrixXcd inverse;   // N x (2K+1), exp(+i k x_j)
    std::vector<Index> tensor_index;  // dual entry -> (2K+1)^n tensor
  };
  struct So3Tables {
    Eigen::MatrixXcd forward_alpha;  // (2K+1) x 2B, exp(+i m a) / 2B
    Eigen::MatrixXcd inverse_alpha;  // 2B x (2K+1), exp(-i m a)
    Eigen::VectorXd beta_weights;    // Gauss-Legendre weights / 2
    // wigner_d[j][l] = d^l(beta_j), (2l+1) x (2l+1)
    std::vector<std::vector<Eigen::MatrixXd>> wigner_d;
  };

  SpectralField analyze_torus(const GridField& field) const;
  GridField synthesize_torus(const SpectralField& spec) const;
  SpectralField analyze_so3(const GridField& field) const;
  GridField synthesize_so3(const SpectralField& spec) const;

  DualPtr dual_;
  QuadratureGrid grid_;
  TorusTables torus_;
  So3Tables so3_;
};

SpectralField analyze(const GridField& field, const SpectralBasis& basis);
GridField synthesize(const SpectralField& spec, const SpectralBasis& basis);

// sqrt(sum_xi d_xi ||u_hat(xi)||_HS^2)
double plancherel_norm(const SpectralField& spec);

// Multiplies each block by (lambda_xi^2)^(s/2). Requires s > 0.
SpectralField apply_fractional_laplacian(const SpectralField& spec, double s);

// ||f||_{L^2} + ||(-L)^{alpha/2} f||_{L^2}
double sobolev_norm(const SpectralField& spec, double alpha);

// (sum_x w |f(x)|^q)^{1/q}, q >= 1.
double lq_norm(const GridField& field, double q, const QuadratureGrid& grid);

// Coefficients of conj(f) when f is synthesized from spec.
SpectralField conjugate_reflect(const SpectralField& spec);

// Projects onto coefficient sets whose synthesis is real.
SpectralField enforce_reality(const SpectralField& spec);

// I.i.d. standard complex Gaussian blocks scaled by (1+lambda^2)^(-decay).
SpectralField random_band_limited(const DualPtr& dual, std::uint64_t seed,
                                  double decay_rate, bool real_valued);

// --- SO(3) matrix coefficients --------------------------------------------

struct EulerZYZ {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

// d^l(beta), entry (m'+l, m+l) = d^l_{m'm}(beta).
Eigen::MatrixXd wigner_small_d(int ell, double beta);

// D^l(g)_{m'm} = exp(-i m' alpha) d^l_{m'm}(beta) exp(-i m gamma), the
// representation of R = Rz(alpha) Ry(beta) Rz(gamma).
Eigen::MatrixXcd wigner_big_d(int ell, const EulerZYZ& angles);

Eigen::Matrix3d rotation_from_euler(const EulerZYZ& angles);
EulerZYZ euler_from_rotation(const Eigen::Matrix3d& rotation);

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int count, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace liewave

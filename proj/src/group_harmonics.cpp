#include "liewave/group_harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace liewave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Index grid_points_per_axis(const GroupSpec& g) {
  return static_cast<Index>(
      std::ceil(g.oversample * (2.0 * g.bandlimit + 1.0) - 1e-12));
}

Index so3_beta_count(const GroupSpec& g) {
  return static_cast<Index>(
      std::ceil(g.oversample * (g.bandlimit + 1.0) - 1e-12));
}

// Applies `op` (rows x dims[axis]) along one axis of a tensor stored with
// axis 0 fastest. Updates dims in place.
Eigen::VectorXcd contract_axis(const Eigen::VectorXcd& data,
                               std::vector<Index>& dims, size_t axis,
                               const Eigen::MatrixXcd& op) {
  Index pre = 1, post = 1;
  for (size_t a = 0; a < axis; ++a) pre *= dims[a];
  for (size_t a = axis + 1; a < dims.size(); ++a) post *= dims[a];
  const Index n = dims[axis];
  const Index rows = op.rows();
  Eigen::VectorXcd out(pre * rows * post);
  for (Index p = 0; p < post; ++p) {
    Eigen::Map<const Eigen::MatrixXcd> in(data.data() + p * pre * n, pre, n);
    Eigen::Map<Eigen::MatrixXcd> o(out.data() + p * pre * rows, pre, rows);
    o.noalias() = in * op.transpose();
  }
  dims[axis] = rows;
  return out;
}

}  // namespace

// --- GroupSpec -------------------------------------------------------------

GroupSpec GroupSpec::torus(int n, int bandlimit, double oversample) {
  GroupSpec g{GroupKind::Torus, n, bandlimit, oversample};
  g.validate();
  return g;
}

GroupSpec GroupSpec::so3(int bandlimit, double oversample) {
  GroupSpec g{GroupKind::SO3, 3, bandlimit, oversample};
  g.validate();
  return g;
}

int GroupSpec::dimension() const {
  return kind == GroupKind::Torus ? torus_dim : 3;
}

std::string GroupSpec::name() const {
  return kind == GroupKind::Torus ? "torus" + std::to_string(torus_dim)
                                  : std::string("so3");
}

void GroupSpec::validate() const {
  if (kind == GroupKind::Torus && torus_dim < 1)
    throw std::invalid_argument("torus dimension must be >= 1");
  if (bandlimit < 1) throw std::invalid_argument("bandlimit must be >= 1");
  if (!(oversample >= 1.0))
    throw std::invalid_argument("oversample must be >= 1");
}

GroupSpec GroupSpec::with_oversample(double factor) const {
  GroupSpec g = *this;
  g.oversample = factor;
  g.validate();
  return g;
}

GroupSpec parse_group(const std::string& name, int bandlimit,
                      double oversample) {
  if (name == "so3" || name == "SO3") return GroupSpec::so3(bandlimit, oversample);
  std::string rest;
  if (name.rfind("torus:", 0) == 0)
    rest = name.substr(6);
  else if (name.rfind("torus", 0) == 0)
    rest = name.substr(5);
  else
    throw std::invalid_argument("unknown group '" + name + "'");
  if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("bad torus dimension in '" + name + "'");
  return GroupSpec::torus(std::stoi(rest), bandlimit, oversample);
}

// --- Dual ------------------------------------------------------------------

bool RepIndex::is_trivial() const {
  return std::all_of(label.begin(), label.end(), [](int v) { return v == 0; });
}

std::string RepIndex::label_string() const {
  std::ostringstream os;
  if (kind == GroupKind::SO3) {
    os << label.front();
    return os.str();
  }
  os << '(';
  for (size_t i = 0; i < label.size(); ++i) os << (i ? " " : "") << label[i];
  os << ')';
  return os.str();
}

double casimir_eigenvalue(const RepIndex& rep) {
  if (rep.kind == GroupKind::SO3) {
    const double l = rep.label.front();
    return l * (l + 1.0);
  }
  double s = 0.0;
  for (int k : rep.label) s += static_cast<double>(k) * k;
  return s;
}

std::vector<RepIndex> enumerate_dual(const GroupSpec& group) {
  group.validate();
  std::vector<RepIndex> reps;
  const int K = group.bandlimit;
  if (group.kind == GroupKind::SO3) {
    for (int l = 0; l <= K; ++l) {
      RepIndex r{GroupKind::SO3, {l}, 2 * l + 1, 0.0};
      r.casimir = casimir_eigenvalue(r);
      reps.push_back(std::move(r));
    }
    return reps;
  }
  const int n = group.torus_dim;
  std::vector<int> k(static_cast<size_t>(n), -K);
  while (true) {
    RepIndex r{GroupKind::Torus, k, 1, 0.0};
    r.casimir = casimir_eigenvalue(r);
    reps.push_back(std::move(r));
    int a = 0;
    while (a < n && ++k[static_cast<size_t>(a)] > K) k[static_cast<size_t>(a++)] = -K;
    if (a == n) break;
  }
  std::stable_sort(reps.begin(), reps.end(),
                   [](const RepIndex& x, const RepIndex& y) {
                     if (x.casimir != y.casimir) return x.casimir < y.casimir;
                     return x.label < y.label;
                   });
  return reps;
}

Dual::Dual(const GroupSpec& group) : group_(group), reps_(enumerate_dual(group)) {
  offsets_.reserve(reps_.size());
  for (const auto& r : reps_) {
    offsets_.push_back(coeff_count_);
    coeff_count_ += static_cast<Index>(r.dim) * r.dim;
  }
  entry_casimir_.resize(coeff_count_);
  entry_dim_.resize(coeff_count_);
  entry_block_.resize(static_cast<size_t>(coeff_count_));
  for (Index b = 0; b < size(); ++b) {
    const auto& r = rep(b);
    const Index len = static_cast<Index>(r.dim) * r.dim;
    entry_casimir_.segment(offset(b), len).setConstant(r.casimir);
    entry_dim_.segment(offset(b), len).setConstant(r.dim);
    std::fill_n(entry_block_.begin() + offset(b), len, b);
    lookup_.emplace(r.label, b);
  }
  conj_partner_.resize(static_cast<size_t>(coeff_count_));
  conj_sign_.resize(coeff_count_);
  for (Index b = 0; b < size(); ++b) {
    const auto& r = rep(b);
    if (group_.kind == GroupKind::Torus) {
      std::vector<int> neg = r.label;
      for (int& v : neg) v = -v;
      conj_partner_[static_cast<size_t>(offset(b))] = offset(lookup_.at(neg));
      conj_sign_[offset(b)] = 1.0;
      continue;
    }
    // g_{m,m'} = (-1)^{m'-m} conj(u_{-m,-m'}); rows m, columns m'.
    const int l = r.label.front();
    const int d = r.dim;
    for (int m = -l; m <= l; ++m)
      for (int mp = -l; mp <= l; ++mp) {
        const Index e = offset(b) + (m + l) + d * (mp + l);
        conj_partner_[static_cast<size_t>(e)] = offset(b) + (-m + l) + d * (-mp + l);
        conj_sign_[e] = ((mp - m) % 2 == 0) ? 1.0 : -1.0;
      }
  }
}

std::optional<Index> Dual::find(const std::vector<int>& label) const {
  const auto it = lookup_.find(label);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool Dual::operator==(const Dual& other) const {
  return group_.kind == other.group_.kind &&
         group_.torus_dim == other.group_.torus_dim &&
         group_.bandlimit == other.group_.bandlimit;
}

// --- SpectralField ---------------------------------------------------------

SpectralField SpectralField::zeros(DualPtr dual, bool real_valued) {
  SpectralField f;
  f.coeffs = Eigen::VectorXcd::Zero(dual->coeff_count());
  f.dual = std::move(dual);
  f.real_valued = real_valued;
  return f;
}

Eigen::Map<Eigen::MatrixXcd> SpectralField::block(Index r) {
  const int d = dual->rep(r).dim;
  return {coeffs.data() + dual->offset(r), d, d};
}

Eigen::Map<const Eigen::MatrixXcd> SpectralField::block(Index r) const {
  const int d = dual->rep(r).dim;
  return {coeffs.data() + dual->offset(r), d, d};
}

void require_same_dual(const SpectralField& a, const SpectralField& b) {
  if (!a.dual || !b.dual || !(*a.dual == *b.dual))
    throw std::invalid_argument("spectral fields live on different duals");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_dual(*this, other);
  coeffs += other.coeffs;
  real_valued = real_valued && other.real_valued;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_dual(*this, other);
  coeffs -= other.coeffs;
  real_valued = real_valued && other.real_valued;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  coeffs *= s;
  if (s.imag() != 0.0) real_valued = false;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(Complex s, SpectralField a) { return a *= s; }

// --- Quadrature ------------------------------------------------------------

QuadratureGrid build_grid(const GroupSpec& group) {
  group.validate();
  QuadratureGrid grid;
  grid.group = group;
  if (group.kind == GroupKind::Torus) {
    const Index N = grid_points_per_axis(group);
    const int n = group.torus_dim;
    grid.shape.assign(static_cast<size_t>(n), N);
    Index total = 1;
    for (int a = 0; a < n; ++a) total *= N;
    grid.nodes.resize(total, n);
    for (Index i = 0; i < total; ++i) {
      Index rem = i;
      for (int a = 0; a < n; ++a) {
        grid.nodes(i, a) = kTwoPi * static_cast<double>(rem % N) / N;
        rem /= N;
      }
    }
    grid.weights = Eigen::VectorXd::Constant(total, 1.0 / static_cast<double>(total));
    return grid;
  }

  const Index B = so3_beta_count(group);
  const Index A = 2 * B;
  Eigen::VectorXd x, w;
  gauss_legendre(static_cast<int>(B), x, w);
  grid.shape = {A, B, A};
  const Index total = A * B * A;
  grid.nodes.resize(total, 3);
  grid.weights.resize(total);
  for (Index g = 0; g < A; ++g)
    for (Index j = 0; j < B; ++j)
      for (Index a = 0; a < A; ++a) {
        const Index i = a + A * (j + B * g);
        grid.nodes(i, 0) = kTwoPi * static_cast<double>(a) / A;
        grid.nodes(i, 1) = std::acos(x[j]);
        grid.nodes(i, 2) = kTwoPi * static_cast<double>(g) / A;
        grid.weights[i] = 0.5 * w[j] / static_cast<double>(A * A);
      }
  grid.weights /= grid.weights.sum();
  return grid;
}

// --- SpectralBasis ---------------------------------------------------------

SpectralBasis::SpectralBasis(const GroupSpec& group)
    : dual_(std::make_shared<const Dual>(group)), grid_(build_grid(group)) {
  const int K = group.bandlimit;
  const Index M = 2 * K + 1;
  if (group.kind == GroupKind::Torus) {
    const Index N = grid_.shape.front();
    torus_.forward.resize(M, N);
    torus_.inverse.resize(N, M);
    for (Index k = 0; k < M; ++k)
      for (Index j = 0; j < N; ++j) {
        const double phase = kTwoPi * static_cast<double>((k - K) * j) / N;
        torus_.forward(k, j) = std::polar(1.0 / N, -phase);
        torus_.inverse(j, k) = std::polar(1.0, phase);
      }
    torus_.tensor_index.resize(static_cast<size_t>(dual_->coeff_count()));
    for (Index r = 0; r < dual_->size(); ++r) {
      Index idx = 0, stride = 1;
      for (int kk : dual_->rep(r).label) {
        idx += (kk + K) * stride;
        stride *= M;
      }
      torus_.tensor_index[static_cast<size_t>(dual_->offset(r))] = idx;
    }
    return;
  }

  const Index A = grid_.shape[0];
  const Index B = grid_.shape[1];
  so3_.forward_alpha.resize(M, A);
  so3_.inverse_alpha.resize(A, M);
  for (Index m = 0; m < M; ++m)
    for (Index a = 0; a < A; ++a) {
      const double phase = kTwoPi * static_cast<double>((m - K) * a) / A;
      so3_.forward_alpha(m, a) = std::polar(1.0 / A, phase);
      so3_.inverse_alpha(a, m) = std::polar(1.0, -phase);
    }
  Eigen::VectorXd x, w;
  gauss_legendre(static_cast<int>(B), x, w);
  so3_.beta_weights = 0.5 * w;
  so3_.wigner_d.resize(static_cast<size_t>(B));
  for (Index j = 0; j < B; ++j) {
    const double beta = std::acos(x[j]);
    for (int l = 0; l <= K; ++l) so3_.wigner_d[static_cast<size_t>(j)].push_back(wigner_small_d(l, beta));
  }
}

SpectralField SpectralBasis::analyze(const GridField& field) const {
  if (field.size() != grid_.size())
    throw std::invalid_argument("grid field does not match quadrature grid");
  return group().kind == GroupKind::Torus ? analyze_torus(field)
                                          : analyze_so3(field);
}

GridField SpectralBasis::synthesize(const SpectralField& spec) const {
  if (!spec.dual || !(*spec.dual == *dual_))
    throw std::invalid_argument("spectral field does not match basis dual");
  return group().kind == GroupKind::Torus ? synthesize_torus(spec)
                                          : synthesize_so3(spec);
}

SpectralField SpectralBasis::analyze_torus(const GridField& field) const {
  std::vector<Index> dims = grid_.shape;
  Eigen::VectorXcd t = field.values;
  for (size_t a = 0; a < dims.size(); ++a) t = contract_axis(t, dims, a, torus_.forward);
  SpectralField out = SpectralField::zeros(dual_);
  for (Index e = 0; e < dual_->coeff_count(); ++e)
    out.coeffs[e] = t[torus_.tensor_index[static_cast<size_t>(e)]];
  return out;
}

GridField SpectralBasis::synthesize_torus(const SpectralField& spec) const {
  const Index M = 2 * group().bandlimit + 1;
  std::vector<Index> dims(grid_.shape.size(), M);
  Index total = 1;
  for (Index d : dims) total *= d;
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(total);
  for (Index e = 0; e < dual_->coeff_count(); ++e)
    t[torus_.tensor_index[static_cast<size_t>(e)]] = spec.coeffs[e];
  for (size_t a = 0; a < dims.size(); ++a) t = contract_axis(t, dims, a, torus_.inverse);
  return GridField{std::move(t)};
}

SpectralField SpectralBasis::analyze_so3(const GridField& field) const {
  const int K = group().bandlimit;
  const Index M = 2 * K + 1;
  const Index B = grid_.shape[1];
  std::vector<Index> dims = grid_.shape;
  Eigen::VectorXcd t = contract_axis(field.values, dims, 0, so3_.forward_alpha);
  t = contract_axis(t, dims, 2, so3_.forward_alpha);
  // t(m'+K, j, m+K)
  using Strided = Eigen::Map<const Eigen::MatrixXcd, 0, Eigen::OuterStride<>>;
  SpectralField out = SpectralField::zeros(dual_);
  for (int l = 0; l <= K; ++l) {
    const Index d = 2 * l + 1;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
    for (Index j = 0; j < B; ++j) {
      Strided g(t.data() + M * j, M, M, Eigen::OuterStride<>(M * B));
      const auto& dl = so3_.wigner_d[static_cast<size_t>(j)][static_cast<size_t>(l)];
      acc += so3_.beta_weights[j] *
             (dl.cast<Complex>().array() * g.block(K - l, K - l, d, d).array()).matrix();
    }
    out.block(l) = acc.transpose();
  }
  return out;
}

GridField SpectralBasis::synthesize_so3(const SpectralField& spec) const {
  const int K = group().bandlimit;
  const Index M = 2 * K + 1;
  const Index B = grid_.shape[1];
  std::vector<Index> dims = {M, B, M};
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(M * B * M);
  using Strided = Eigen::Map<Eigen::MatrixXcd, 0, Eigen::OuterStride<>>;
  for (Index j = 0; j < B; ++j) {
    Strided h(t.data() + M * j, M, M, Eigen::OuterStride<>(M * B));
    for (int l = 0; l <= K; ++l) {
      const Index d = 2 * l + 1;
      const auto& dl = so3_.wigner_d[static_cast<size_t>(j)][static_cast<size_t>(l)];
      h.block(K - l, K - l, d, d).array() +=
          static_cast<double>(d) * dl.cast<Complex>().array() *
          spec.block(l).transpose().array();
    }
  }
  t = contract_axis(t, dims, 0, so3_.inverse_alpha);
  t = contract_axis(t, dims, 2, so3_.inverse_alpha);
  return GridField{std::move(t)};
}

SpectralField analyze(const GridField& field, const SpectralBasis& basis) {
  return basis.analyze(field);
}

GridField synthesize(const SpectralField& spec, const SpectralBasis& basis) {
  return basis.synthesize(spec);
}

// --- Norms -----------------------------------------------------------------

double plancherel_norm(const SpectralField& spec) {
  return std::sqrt((spec.dual->entry_dim().array() * spec.coeffs.array().abs2()).sum());
}

SpectralField apply_fractional_laplacian(const SpectralField& spec, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("fractional order must be positive");
  SpectralField out = spec;
  out.coeffs.array() *= spec.dual->entry_casimir().array().pow(0.5 * s);
  return out;
}

double sobolev_norm(const SpectralField& spec, double alpha) {
  return plancherel_norm(spec) +
         plancherel_norm(apply_fractional_laplacian(spec, alpha));
}

double lq_norm(const GridField& field, double q, const QuadratureGrid& grid) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm requires q >= 1");
  if (field.size() != grid.size())
    throw std::invalid_argument("grid field does not match quadrature grid");
  const Eigen::ArrayXd mag = field.values.array().abs();
  if (q == 2.0) return std::sqrt((grid.weights.array() * mag.square()).sum());
  return std::pow((grid.weights.array() * mag.pow(q)).sum(), 1.0 / q);
}

// --- Reality ---------------------------------------------------------------

SpectralField conjugate_reflect(const SpectralField& spec) {
  const Dual& dual = *spec.dual;
  SpectralField out = SpectralField::zeros(spec.dual, spec.real_valued);
  const auto& partner = dual.conj_partner();
  for (Index e = 0; e < dual.coeff_count(); ++e)
    out.coeffs[e] = dual.conj_sign()[e] * std::conj(spec.coeffs[partner[static_cast<size_t>(e)]]);
  return out;
}

SpectralField enforce_reality(const SpectralField& spec) {
  SpectralField out = spec;
  out.coeffs = 0.5 * (spec.coeffs + conjugate_reflect(spec).coeffs);
  out.real_valued = true;
  return out;
}

SpectralField random_band_limited(const DualPtr& dual, std::uint64_t seed,
                                  double decay_rate, bool real_valued) {
  if (!(decay_rate >= 0.0)) throw std::invalid_argument("decay_rate must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  SpectralField out = SpectralField::zeros(dual);
  for (Index e = 0; e < dual->coeff_count(); ++e) {
    const double re = normal(rng);
    const double im = normal(rng);
    const double scale = std::pow(1.0 + dual->entry_casimir()[e], -decay_rate);
    out.coeffs[e] = scale * Complex(re, im);
  }
  return real_valued ? enforce_reality(out) : out;
}

}  // namespace liewave

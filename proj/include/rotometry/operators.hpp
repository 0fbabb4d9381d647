#ifndef ROTOMETRY_OPERATORS_HPP
#define ROTOMETRY_OPERATORS_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "rotometry/errors.hpp"
#include "rotometry/fock_basis.hpp"

namespace rotometry {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Complex>;

// Normal-ordered product of ladder operators: all creators to the left of all
// annihilators. Mode entries are labels, not positions. Particle-conserving
// monomials have equally many creators and annihilators.
struct LadderMonomial {
  Complex coefficient;
  std::vector<int> creators;
  std::vector<int> annihilators;

  LadderMonomial conjugate() const {
    return LadderMonomial{std::conj(coefficient), annihilators, creators};
  }

  bool particle_conserving() const { return creators.size() == annihilators.size(); }

  // A monomial acts diagonally iff it creates exactly what it annihilates.
  bool is_diagonal() const {
    if (creators.size() != annihilators.size()) return false;
    std::vector<int> c = creators, a = annihilators;
    std::sort(c.begin(), c.end());
    std::sort(a.begin(), a.end());
    return c == a;
  }
};

// Convenience constructors for the common shapes.
inline LadderMonomial number_op(int mode, Complex coeff = 1.0) {
  return LadderMonomial{coeff, {mode}, {mode}};
}
inline LadderMonomial hopping_op(int to, int from, Complex coeff) {
  return LadderMonomial{coeff, {to}, {from}};
}

// Apply a monomial to an occupation vector. Returns the amplitude (ladder
// square-root factors times the coefficient) and the resulting occupation, or
// nullopt when an annihilator hits an empty mode. Unknown labels throw.
inline std::optional<std::pair<Complex, Occupation>> apply_monomial(const LadderMonomial& m,
                                                                   const Occupation& occ,
                                                                   const ModeSet& modes) {
  Occupation out = occ;
  double factor = 1.0;
  for (int label : m.annihilators) {
    int& n = out[static_cast<std::size_t>(modes.position_of(label))];
    if (n == 0) return std::nullopt;
    factor *= std::sqrt(static_cast<double>(n));
    --n;
  }
  for (int label : m.creators) {
    int& n = out[static_cast<std::size_t>(modes.position_of(label))];
    factor *= std::sqrt(static_cast<double>(n + 1));
    ++n;
  }
  return std::make_pair(m.coefficient * factor, std::move(out));
}

// How build_hermitian treats the supplied term list.
enum class TermConvention {
  // Off-diagonal monomials are supplied once; their Hermitian conjugates are
  // added automatically. Diagonal monomials are added as given.
  raise_only,
  // The list is already Hermitian as a whole; assemble verbatim and verify.
  full_hermitian,
};

namespace detail {

// Monomial with labels resolved to basis positions, for the assembly loop.
struct ResolvedMonomial {
  Complex coefficient;
  std::vector<int> creator_pos;
  std::vector<int> annihilator_pos;
};

inline ResolvedMonomial resolve(const LadderMonomial& m, const ModeSet& modes) {
  ResolvedMonomial r;
  r.coefficient = m.coefficient;
  r.creator_pos.reserve(m.creators.size());
  r.annihilator_pos.reserve(m.annihilators.size());
  for (int label : m.creators) r.creator_pos.push_back(modes.position_of(label));
  for (int label : m.annihilators) r.annihilator_pos.push_back(modes.position_of(label));
  return r;
}

inline std::optional<std::pair<Complex, Occupation>> apply_resolved(const ResolvedMonomial& m,
                                                                   const Occupation& occ) {
  Occupation out = occ;
  double factor = 1.0;
  for (int p : m.annihilator_pos) {
    int& n = out[static_cast<std::size_t>(p)];
    if (n == 0) return std::nullopt;
    factor *= std::sqrt(static_cast<double>(n));
    --n;
  }
  for (int p : m.creator_pos) {
    int& n = out[static_cast<std::size_t>(p)];
    factor *= std::sqrt(static_cast<double>(n + 1));
    ++n;
  }
  return std::make_pair(m.coefficient * factor, std::move(out));
}

}  // namespace detail

// Hermitian sparse operator over a FockBasis. Assembled from coordinate
// triplets, stored compressed row-major after freeze; immutable afterwards.
class ManyBodyOperator {
 public:
  using Index = FockBasis::Index;

  ManyBodyOperator(std::shared_ptr<const FockBasis> basis, SparseMatrix mat)
      : basis_(std::move(basis)), mat_(std::move(mat)) {
    mat_.makeCompressed();
  }

  const std::shared_ptr<const FockBasis>& basis() const { return basis_; }
  Index dim() const { return basis_->dim(); }
  Index nnz() const { return mat_.nonZeros(); }
  const SparseMatrix& sparse() const { return mat_; }

  Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(mat_); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return mat_ * v; }

  double max_abs() const {
    double m = 0.0;
    for (int k = 0; k < mat_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(mat_, k); it; ++it) {
        m = std::max(m, std::abs(it.value()));
      }
    }
    return m;
  }

  // Largest |H_ij - conj(H_ji)| over stored entries.
  double hermiticity_defect() const {
    SparseMatrix adj = SparseMatrix(mat_.adjoint());
    SparseMatrix diff = mat_ - adj;
    double m = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
        m = std::max(m, std::abs(it.value()));
      }
    }
    return m;
  }

  ManyBodyOperator operator+(const ManyBodyOperator& other) const {
    require_same_basis(other);
    return ManyBodyOperator(basis_, SparseMatrix(mat_ + other.mat_));
  }

  ManyBodyOperator operator-(const ManyBodyOperator& other) const {
    require_same_basis(other);
    return ManyBodyOperator(basis_, SparseMatrix(mat_ - other.mat_));
  }

  friend ManyBodyOperator operator*(double s, const ManyBodyOperator& op) {
    return ManyBodyOperator(op.basis_, SparseMatrix(s * op.mat_));
  }

  void require_same_basis(const ManyBodyOperator& other) const {
    if (!basis_->same_basis(*other.basis_)) {
      throw ConfigError("ManyBodyOperator: operands live on different bases");
    }
  }

 private:
  std::shared_ptr<const FockBasis> basis_;
  SparseMatrix mat_;
};

// Assemble a Hermitian operator from particle-conserving ladder monomials.
// With `raise_only`, every off-diagonal monomial gets its conjugate added;
// with `full_hermitian`, the list is assembled verbatim. Either way the
// result is checked entry-wise and assembly fails loudly if it is not
// Hermitian to 1e-12 relative.
inline ManyBodyOperator build_hermitian(std::shared_ptr<const FockBasis> basis,
                                        const std::vector<LadderMonomial>& terms,
                                        TermConvention convention = TermConvention::raise_only) {
  using Index = FockBasis::Index;
  const ModeSet& modes = basis->modes();

  std::vector<detail::ResolvedMonomial> resolved;
  resolved.reserve(terms.size() * 2);
  for (const LadderMonomial& t : terms) {
    if (!t.particle_conserving()) {
      throw ConfigError("build_hermitian: monomial does not conserve particle number");
    }
    resolved.push_back(detail::resolve(t, modes));
    if (convention == TermConvention::raise_only && !t.is_diagonal()) {
      resolved.push_back(detail::resolve(t.conjugate(), modes));
    }
  }

  const Index dim = basis->dim();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(dim) * resolved.size() / 4 + 16);
  for (Index col = 0; col < dim; ++col) {
    const Occupation& ket = basis->state(col);
    for (const auto& mono : resolved) {
      auto hit = detail::apply_resolved(mono, ket);
      if (!hit) continue;
      const Index row = basis->rank(hit->second);
      if (row < 0) continue;  // target outside a truncated basis
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), hit->first);
    }
  }

  SparseMatrix mat(static_cast<int>(dim), static_cast<int>(dim));
  mat.setFromTriplets(triplets.begin(), triplets.end());
  ManyBodyOperator op(std::move(basis), std::move(mat));

  const double scale = op.max_abs();
  const double defect = op.hermiticity_defect();
  if (defect > 1e-12 * std::max(scale, 1e-300)) {
    // Report the worst offending entry.
    const SparseMatrix& m = op.sparse();
    SparseMatrix diff = m - SparseMatrix(m.adjoint());
    Index bi = 0, bj = 0;
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
        if (std::abs(it.value()) > worst) {
          worst = std::abs(it.value());
          bi = it.row();
          bj = it.col();
        }
      }
    }
    throw AssemblyError("build_hermitian: non-Hermitian result, |H(" + std::to_string(bi) + "," +
                        std::to_string(bj) + ") - conj(H(" + std::to_string(bj) + "," +
                        std::to_string(bi) + "))| = " + std::to_string(worst));
  }
  return op;
}

// Diagonal operator from a per-state value function.
template <typename Fn>
ManyBodyOperator build_diagonal(std::shared_ptr<const FockBasis> basis, Fn&& value_of_state) {
  using Index = FockBasis::Index;
  const Index dim = basis->dim();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) {
    const double v = value_of_state(basis->state(i));
    if (v != 0.0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), Complex(v, 0.0));
  }
  SparseMatrix mat(static_cast<int>(dim), static_cast<int>(dim));
  mat.setFromTriplets(triplets.begin(), triplets.end());
  return ManyBodyOperator(std::move(basis), std::move(mat));
}

}  // namespace rotometry

#endif  // ROTOMETRY_OPERATORS_HPP

#ifndef ROTOMETRY_STATES_HPP
#define ROTOMETRY_STATES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "rotometry/errors.hpp"
#include "rotometry/fock_basis.hpp"
#include "rotometry/operators.hpp"

namespace rotometry {

// Normalized many-body state over a FockBasis.
class PureState {
 public:
  using Index = FockBasis::Index;

  PureState(std::shared_ptr<const FockBasis> basis, Eigen::VectorXcd amplitudes)
      : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != basis_->dim()) {
      throw ConfigError("PureState: amplitude vector does not match basis dimension");
    }
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > 1e-10) {
      throw ConfigError("PureState: norm " + std::to_string(norm) + " is not 1");
    }
  }

  const std::shared_ptr<const FockBasis>& basis() const { return basis_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Index dim() const { return amplitudes_.size(); }

  Complex amplitude(const Occupation& occ) const {
    const Index i = basis_->rank(occ);
    return i < 0 ? Complex(0.0) : amplitudes_(i);
  }

  double probability(const Occupation& occ) const { return std::norm(amplitude(occ)); }

  Complex overlap(const PureState& other) const {
    if (!basis_->same_basis(*other.basis_)) {
      throw ConfigError("PureState::overlap: states live on different bases");
    }
    return amplitudes_.dot(other.amplitudes_);
  }

  // <psi|A|psi> for an operator on the same basis.
  Complex expectation(const ManyBodyOperator& op) const {
    if (!basis_->same_basis(*op.basis())) {
      throw ConfigError("PureState::expectation: operator lives on a different basis");
    }
    return amplitudes_.dot(op.apply(amplitudes_));
  }

 private:
  std::shared_ptr<const FockBasis> basis_;
  Eigen::VectorXcd amplitudes_;
};

// Carry a state onto another basis over the same modes by matching
// occupations. Fails if any nonzero amplitude has no slot in the target.
inline PureState embed(const PureState& state, std::shared_ptr<const FockBasis> target) {
  const FockBasis& src = *state.basis();
  if (!(src.modes() == target->modes()) || src.num_particles() != target->num_particles()) {
    throw ConfigError("embed: target basis has different modes or particle number");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(target->dim());
  for (FockBasis::Index i = 0; i < src.dim(); ++i) {
    const Complex c = state.amplitudes()(i);
    if (c == Complex(0.0)) continue;
    const FockBasis::Index j = target->rank(src.state(i));
    if (j < 0) throw ConfigError("embed: target basis does not contain " +
                                 occupation_to_string(src.state(i)));
    out(j) = c;
  }
  return PureState(std::move(target), std::move(out));
}

// One-body density matrix rho1_ij = <a^dag_i a_j>, indexed by mode position.
// Hermitian with trace N.
inline Eigen::MatrixXcd one_body_density_matrix(const PureState& state) {
  const FockBasis& basis = *state.basis();
  const int num_modes = basis.modes().size();
  Eigen::MatrixXcd rho1 = Eigen::MatrixXcd::Zero(num_modes, num_modes);
  const Eigen::VectorXcd& amp = state.amplitudes();

  for (FockBasis::Index col = 0; col < basis.dim(); ++col) {
    if (amp(col) == Complex(0.0)) continue;
    const Occupation& ket = basis.state(col);
    for (int j = 0; j < num_modes; ++j) {
      if (ket[static_cast<std::size_t>(j)] == 0) continue;
      for (int i = 0; i < num_modes; ++i) {
        // a^dag_i a_j |ket>
        Occupation out = ket;
        double factor = std::sqrt(static_cast<double>(out[static_cast<std::size_t>(j)]));
        --out[static_cast<std::size_t>(j)];
        factor *= std::sqrt(static_cast<double>(out[static_cast<std::size_t>(i)] + 1));
        ++out[static_cast<std::size_t>(i)];
        const FockBasis::Index row = basis.rank(out);
        if (row < 0) continue;
        rho1(i, j) += std::conj(amp(row)) * factor * amp(col);
      }
    }
  }
  return rho1;
}

// One particle-number block of a density operator. `support` lists the basis
// indices the block actually touches; `mat` is dense over that support.
struct DensitySector {
  std::shared_ptr<const FockBasis> basis;
  std::vector<FockBasis::Index> support;
  Eigen::MatrixXcd mat;

  double trace() const { return mat.trace().real(); }
  int num_particles() const { return basis->num_particles(); }
};

// Density operator, block-diagonal in total particle number. A pure state is
// a single full-support sector.
class DensityMatrix {
 public:
  std::vector<DensitySector> sectors;

  static DensityMatrix from_pure(const PureState& state) {
    DensityMatrix rho;
    DensitySector sec;
    sec.basis = state.basis();
    sec.support.resize(static_cast<std::size_t>(state.dim()));
    for (FockBasis::Index i = 0; i < state.dim(); ++i) sec.support[static_cast<std::size_t>(i)] = i;
    sec.mat = state.amplitudes() * state.amplitudes().adjoint();
    rho.sectors.push_back(std::move(sec));
    return rho;
  }

  double total_trace() const {
    double t = 0.0;
    for (const auto& s : sectors) t += s.trace();
    return t;
  }

  // Invariant checks: Hermitian and trace-one to 1e-10, eigenvalues >= -1e-10.
  void validate() const {
    double trace = 0.0;
    for (const auto& s : sectors) {
      const double herm = (s.mat - s.mat.adjoint()).cwiseAbs().maxCoeff();
      if (herm > 1e-10) {
        throw NumericalError("DensityMatrix: sector not Hermitian, defect " + std::to_string(herm));
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.mat, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-10) {
        throw NumericalError("DensityMatrix: negative eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()));
      }
      trace += s.trace();
    }
    if (std::abs(trace - 1.0) > 1e-10) {
      throw NumericalError("DensityMatrix: trace " + std::to_string(trace) + " is not 1");
    }
  }
};

}  // namespace rotometry

#endif  // ROTOMETRY_STATES_HPP

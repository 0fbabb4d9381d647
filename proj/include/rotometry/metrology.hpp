#ifndef ROTOMETRY_METROLOGY_HPP
#define ROTOMETRY_METROLOGY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <utility>
#include <vector>

#include "rotometry/errors.hpp"
#include "rotometry/fock_basis.hpp"
#include "rotometry/models.hpp"
#include "rotometry/operators.hpp"
#include "rotometry/parallel.hpp"
#include "rotometry/states.hpp"

namespace rotometry {

// ---------------------------------------------------------------------------
// Two-mode probe states. The two modes are picked by label so the same
// builders work on a dedicated two-mode basis or inside a larger one.
// ---------------------------------------------------------------------------

inline std::shared_ptr<const FockBasis> two_mode_basis(int num_particles) {
  return FockBasis::build(num_particles, ModeSet::consecutive(2));
}

// (|N,0> + |0,N>)/sqrt(2) between the two given modes.
inline PureState noon_state(std::shared_ptr<const FockBasis> basis, int label_a, int label_b) {
  const int n = basis->num_particles();
  Occupation occ_a(static_cast<std::size_t>(basis->modes().size()), 0);
  Occupation occ_b = occ_a;
  occ_a[static_cast<std::size_t>(basis->modes().position_of(label_a))] = n;
  occ_b[static_cast<std::size_t>(basis->modes().position_of(label_b))] = n;
  const FockBasis::Index ia = basis->rank(occ_a);
  const FockBasis::Index ib = basis->rank(occ_b);
  if (ia < 0 || ib < 0) throw ConfigError("noon_state: extreme states missing from basis");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis->dim());
  v(ia) = v(ib) = 1.0 / std::sqrt(2.0);
  return PureState(std::move(basis), std::move(v));
}

// All atoms in the even superposition of the two modes: a binomial coherent
// split, the working state of an unentangled interferometer.
inline PureState unentangled_probe(std::shared_ptr<const FockBasis> basis, int label_a,
                                   int label_b) {
  const int n = basis->num_particles();
  const int pa = basis->modes().position_of(label_a);
  const int pb = basis->modes().position_of(label_b);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis->dim());
  for (int k = 0; k <= n; ++k) {
    Occupation occ(static_cast<std::size_t>(basis->modes().size()), 0);
    occ[static_cast<std::size_t>(pa)] = k;
    occ[static_cast<std::size_t>(pb)] = n - k;
    const FockBasis::Index i = basis->rank(occ);
    if (i < 0) throw ConfigError("unentangled_probe: basis does not hold the binomial ladder");
    const double log_amp = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                  std::lgamma(n - k + 1.0)) -
                           0.5 * n * std::numbers::ln2;
    v(i) = std::exp(log_amp);
  }
  v.normalize();
  return PureState(std::move(basis), std::move(v));
}

// Superposition of paired occupations |2m, N-2m> with amplitudes
// sqrt((2m)! (N-2m)!) / (2^{N/2} m! (N/2-m)!): the loss-hardened probe that
// interpolates between the binomial and NOON extremes. Needs even N.
inline PureState bat_state(std::shared_ptr<const FockBasis> basis, int label_a, int label_b) {
  const int n = basis->num_particles();
  if (n % 2 != 0) throw ConfigError("bat_state: needs an even particle number");
  const int half = n / 2;
  const int pa = basis->modes().position_of(label_a);
  const int pb = basis->modes().position_of(label_b);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis->dim());
  for (int m = 0; m <= half; ++m) {
    Occupation occ(static_cast<std::size_t>(basis->modes().size()), 0);
    occ[static_cast<std::size_t>(pa)] = 2 * m;
    occ[static_cast<std::size_t>(pb)] = n - 2 * m;
    const FockBasis::Index i = basis->rank(occ);
    if (i < 0) throw ConfigError("bat_state: basis does not hold the paired ladder");
    const double log_amp = 0.5 * (std::lgamma(2 * m + 1.0) + std::lgamma(n - 2 * m + 1.0)) -
                           half * std::numbers::ln2 - std::lgamma(m + 1.0) -
                           std::lgamma(half - m + 1.0);
    v(i) = std::exp(log_amp);
  }
  v.normalize();
  return PureState(std::move(basis), std::move(v));
}

// ---------------------------------------------------------------------------
// Quantum Fisher information for phases imprinted by weighted number
// operators G = sum_i w_i n_i (number-diagonal generators cover every probe
// in this library; weights live on mode positions).
// ---------------------------------------------------------------------------

class PhaseGenerator {
 public:
  explicit PhaseGenerator(std::vector<double> weights_by_position)
      : weights_(std::move(weights_by_position)) {}

  // G = (n_a - n_b)/2: one full fringe per unit of phase, so a NOON state of
  // N atoms carries information N^2 and the binomial split carries N.
  static PhaseGenerator half_difference(const FockBasis& basis, int label_a, int label_b) {
    std::vector<double> w(static_cast<std::size_t>(basis.modes().size()), 0.0);
    w[static_cast<std::size_t>(basis.modes().position_of(label_a))] = 0.5;
    w[static_cast<std::size_t>(basis.modes().position_of(label_b))] = -0.5;
    return PhaseGenerator(std::move(w));
  }

  // G = sum_k k n_k, the total circulation of a ring basis. A superposition of
  // L = 0 and L = N branches then carries information N^2, matching the
  // half-difference convention for two modes one unit apart.
  static PhaseGenerator circulation(const FockBasis& basis) {
    std::vector<double> w(static_cast<std::size_t>(basis.modes().size()), 0.0);
    for (int i = 0; i < basis.modes().size(); ++i) {
      w[static_cast<std::size_t>(i)] = static_cast<double>(basis.modes().label(i));
    }
    return PhaseGenerator(std::move(w));
  }

  const std::vector<double>& weights() const { return weights_; }

  double eigenvalue(const Occupation& occ) const {
    if (occ.size() != weights_.size()) {
      throw ConfigError("PhaseGenerator: occupation length does not match weights");
    }
    double g = 0.0;
    for (std::size_t i = 0; i < occ.size(); ++i) g += weights_[i] * occ[i];
    return g;
  }

  ManyBodyOperator to_operator(std::shared_ptr<const FockBasis> basis) const {
    if (static_cast<int>(weights_.size()) != basis->modes().size()) {
      throw ConfigError("PhaseGenerator: weight count does not match basis modes");
    }
    return build_diagonal(std::move(basis),
                          [this](const Occupation& occ) { return eigenvalue(occ); });
  }

 private:
  std::vector<double> weights_;
};

// F = 4 Var_psi(G) for a pure probe.
inline double pure_qfi(const PureState& psi, const PhaseGenerator& g) {
  const FockBasis& basis = *psi.basis();
  double mean = 0.0, second = 0.0;
  for (FockBasis::Index i = 0; i < basis.dim(); ++i) {
    const double p = std::norm(psi.amplitudes()(i));
    if (p == 0.0) continue;
    const double gv = g.eigenvalue(basis.state(i));
    mean += p * gv;
    second += p * gv * gv;
  }
  return 4.0 * (second - mean * mean);
}

struct MixedQfiOptions {
  // Eigenvalue pairs with lambda_i + lambda_j at or below this fraction of
  // the total trace are treated as outside the support.
  double eigenvalue_floor = 1e-12;
};

namespace detail {

struct SectorEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd generator_diag;  // G on the sector support, Fock-diagonal
};

inline SectorEigen diagonalize_sector(const DensitySector& sec, const PhaseGenerator& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sec.mat);
  if (es.info() != Eigen::Success) throw SolverError("mixed_qfi: sector diagonalization failed");
  SectorEigen out{es.eigenvalues(), es.eigenvectors(), {}};
  out.generator_diag.resize(static_cast<Eigen::Index>(sec.support.size()));
  for (std::size_t i = 0; i < sec.support.size(); ++i) {
    out.generator_diag(static_cast<Eigen::Index>(i)) =
        g.eigenvalue(sec.basis->state(sec.support[i]));
  }
  return out;
}

}  // namespace detail

// F = sum_{i,j} 2 (lambda_i - lambda_j)^2 |<i|G|j>|^2 / (lambda_i + lambda_j)
// over the eigenpairs of rho, sector by sector. Number-diagonal generators
// never couple different particle-number sectors, so the blocks add.
inline double mixed_qfi(const DensityMatrix& rho, const PhaseGenerator& g,
                        const MixedQfiOptions& opts = {}) {
  const double floor = opts.eigenvalue_floor * rho.total_trace();
  double f = 0.0;
  for (const DensitySector& sec : rho.sectors) {
    if (sec.support.empty()) continue;
    const detail::SectorEigen eig = detail::diagonalize_sector(sec, g);
    const Eigen::MatrixXcd gmat =
        eig.vectors.adjoint() * eig.generator_diag.asDiagonal() * eig.vectors;
    const Eigen::Index m = eig.values.size();
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double sum = eig.values(i) + eig.values(j);
        if (sum <= floor) continue;
        const double diff = eig.values(i) - eig.values(j);
        f += 2.0 * diff * diff * std::norm(gmat(i, j)) / sum;
      }
    }
  }
  return f;
}

// Symmetric logarithmic derivative of rho under rho' = -i[G, rho], one block
// per sector in the sector's Fock support basis. Satisfies
// rho' = (rho L + L rho)/2 on the retained support.
inline std::vector<Eigen::MatrixXcd> sld(const DensityMatrix& rho, const PhaseGenerator& g,
                                         const MixedQfiOptions& opts = {}) {
  const double floor = opts.eigenvalue_floor * rho.total_trace();
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(rho.sectors.size());
  for (const DensitySector& sec : rho.sectors) {
    if (sec.support.empty()) {
      blocks.emplace_back(0, 0);
      continue;
    }
    const detail::SectorEigen eig = detail::diagonalize_sector(sec, g);
    const Eigen::MatrixXcd gmat =
        eig.vectors.adjoint() * eig.generator_diag.asDiagonal() * eig.vectors;
    const Eigen::Index m = eig.values.size();
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double sum = eig.values(i) + eig.values(j);
        if (sum <= floor) continue;
        // rho'_{ij} = i (lambda_i - lambda_j) G_{ij} in the eigenbasis.
        l(i, j) = Complex(0.0, 2.0) * (eig.values(i) - eig.values(j)) * gmat(i, j) / sum;
      }
    }
    blocks.push_back(eig.vectors * l * eig.vectors.adjoint());
  }
  return blocks;
}

// ---------------------------------------------------------------------------
// Uniform particle loss: every mode passes a beam splitter with transmission
// 1 - loss_fraction and the reflected atoms are traced out. The result is
// block-diagonal over the number of surviving atoms; distinct loss patterns
// are distinguishable in the environment, so each pattern adds its own rank.
// ---------------------------------------------------------------------------

struct LossOptions {
  // Amplitudes below this fraction of the sector maximum drop out of the
  // stored support.
  double support_epsilon = 1e-10;
};

namespace detail {

// Enumerate loss vectors j <= occ with total j = want, calling sink(j, amp)
// with the Kraus amplitude product for transmission eta.
template <typename Sink>
void enumerate_loss_vectors(const Occupation& occ, int want, double eta, Sink&& sink) {
  Occupation j(occ.size(), 0);
  auto recurse = [&](auto&& self, std::size_t mode, int left, double log_amp2) -> void {
    if (mode == occ.size()) {
      if (left == 0) sink(j, std::exp(0.5 * log_amp2));
      return;
    }
    const int cap = std::min(occ[mode], left);
    for (int take = 0; take <= cap; ++take) {
      // |K|^2 contribution: C(s, take) eta^{s - take} (1 - eta)^take
      const double log_binom = std::lgamma(occ[mode] + 1.0) - std::lgamma(take + 1.0) -
                               std::lgamma(occ[mode] - take + 1.0);
      double term = log_binom;
      if (occ[mode] - take > 0) term += (occ[mode] - take) * std::log(eta);
      if (take > 0) term += take * std::log(1.0 - eta);
      j[mode] = take;
      self(self, mode + 1, left - take, log_amp2 + term);
    }
    j[mode] = 0;
  };
  recurse(recurse, 0, want, 0.0);
}

}  // namespace detail

inline DensityMatrix apply_loss(const PureState& psi, double loss_fraction,
                                const LossOptions& opts = {}) {
  if (loss_fraction < 0.0 || loss_fraction > 1.0) {
    throw ConfigError("apply_loss: loss fraction must lie in [0, 1]");
  }
  const FockBasis& basis = *psi.basis();
  const double eta = 1.0 - loss_fraction;

  if (loss_fraction == 0.0) return DensityMatrix::from_pure(psi);

  DensityMatrix rho;
  const int n = basis.num_particles();
  for (int lost = 0; lost <= n; ++lost) {
    const int left = n - lost;
    if (eta == 0.0 && left > 0) continue;
    auto sector_basis = FockBasis::build(left, basis.modes());

    // One conditional (unnormalized) pure state per loss pattern.
    std::map<Occupation, Eigen::VectorXcd> conditionals;
    for (FockBasis::Index i = 0; i < basis.dim(); ++i) {
      const Complex c = psi.amplitudes()(i);
      if (c == Complex(0.0)) continue;
      const Occupation& occ = basis.state(i);
      detail::enumerate_loss_vectors(occ, lost, eta, [&](const Occupation& j, double amp) {
        Occupation out = occ;
        for (std::size_t m = 0; m < out.size(); ++m) out[m] -= j[m];
        const FockBasis::Index r = sector_basis->rank(out);
        auto [it, fresh] = conditionals.try_emplace(j);
        if (fresh) it->second = Eigen::VectorXcd::Zero(sector_basis->dim());
        it->second(r) += c * amp;
      });
    }
    if (conditionals.empty()) continue;

    double max_amp = 0.0;
    for (const auto& [j, vec] : conditionals) {
      max_amp = std::max(max_amp, vec.cwiseAbs().maxCoeff());
    }
    if (max_amp == 0.0) continue;

    std::vector<FockBasis::Index> support;
    for (FockBasis::Index r = 0; r < sector_basis->dim(); ++r) {
      for (const auto& [j, vec] : conditionals) {
        if (std::abs(vec(r)) > opts.support_epsilon * max_amp) {
          support.push_back(r);
          break;
        }
      }
    }
    if (support.empty()) continue;

    DensitySector sec;
    sec.basis = sector_basis;
    sec.support = std::move(support);
    const Eigen::Index dim = static_cast<Eigen::Index>(sec.support.size());
    Eigen::MatrixXcd phi(dim, static_cast<Eigen::Index>(conditionals.size()));
    Eigen::Index col = 0;
    for (const auto& [j, vec] : conditionals) {
      for (Eigen::Index r = 0; r < dim; ++r) {
        phi(r, col) = vec(sec.support[static_cast<std::size_t>(r)]);
      }
      ++col;
    }
    sec.mat = phi * phi.adjoint();
    rho.sectors.push_back(std::move(sec));
  }
  return rho;
}

// QFI after loss, over a grid of loss fractions. Points are independent and
// run on the worker pool.
inline std::vector<std::pair<double, double>> qfi_vs_loss(const PureState& psi,
                                                          const PhaseGenerator& g,
                                                          const std::vector<double>& loss_grid,
                                                          const LossOptions& lopts = {},
                                                          const MixedQfiOptions& qopts = {}) {
  std::vector<std::pair<double, double>> out(loss_grid.size());
  parallel_for(static_cast<std::int64_t>(loss_grid.size()), [&](std::int64_t i) {
    const double l = loss_grid[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = {l, mixed_qfi(apply_loss(psi, l, lopts), g, qopts)};
  });
  return out;
}

// ---------------------------------------------------------------------------
// Two-orbital structure of a many-body state. The one-body density matrix is
// diagonalized, the basis is rotated so its two leading eigenvectors become
// modes 0 and 1, and the joint number distribution over that pair is read off.
// ---------------------------------------------------------------------------

struct OrbitalPairDistribution {
  Eigen::VectorXd natural_occupations;          // descending, sums to N
  Eigen::MatrixXcd rotation;                    // rows 0 and 1 are the leading orbitals
  std::map<std::pair<int, int>, double> joint;  // P(n in orbital 1, n in orbital 2)
  double extreme_first = 0.0;                   // P(N, 0)
  double extreme_second = 0.0;                  // P(0, N)
  double half_difference_variance = 0.0;        // Var[(n1 - n2)/2]
};

inline OrbitalPairDistribution dominant_orbital_pair(const PureState& psi,
                                                     const ModeRotationOptions& opts = {}) {
  const FockBasis& basis = *psi.basis();
  const int num_modes = basis.modes().size();
  if (num_modes < 2) throw ConfigError("dominant_orbital_pair: need at least two modes");

  const Eigen::MatrixXcd rho1 = one_body_density_matrix(psi);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho1);
  if (es.info() != Eigen::Success) throw SolverError("dominant_orbital_pair: eigensolve failed");

  OrbitalPairDistribution out;
  out.natural_occupations = es.eigenvalues().reverse();

  // The state created by b^dag = sum_i conj(w_i) a^dag_i has occupation
  // w^dag rho1 w, so the rotation rows are the eigenvectors themselves.
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(num_modes, num_modes);
  u.row(0) = es.eigenvectors().col(num_modes - 1).transpose();
  u.row(1) = es.eigenvectors().col(num_modes - 2).transpose();
  int filled = 2;
  for (int j = 0; j < num_modes && filled < num_modes; ++j) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Unit(num_modes, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (int r = 0; r < filled; ++r) {
        const Eigen::VectorXcd row = u.row(r).transpose();
        v -= row.dot(v) * row;
      }
    }
    const double norm = v.norm();
    if (norm < 1e-6) continue;
    u.row(filled++) = (v / norm).transpose();
  }
  if (filled != num_modes) throw NumericalError("dominant_orbital_pair: basis completion failed");
  out.rotation = u;

  const PureState rotated = mode_rotation(psi, u, opts);
  const int n_total = basis.num_particles();
  for (FockBasis::Index i = 0; i < basis.dim(); ++i) {
    const double p = std::norm(rotated.amplitudes()(i));
    if (p == 0.0) continue;
    const Occupation& occ = basis.state(i);
    out.joint[{occ[0], occ[1]}] += p;
  }
  double mean = 0.0, second = 0.0;
  for (const auto& [key, p] : out.joint) {
    const double d = 0.5 * (key.first - key.second);
    mean += p * d;
    second += p * d * d;
  }
  out.half_difference_variance = second - mean * mean;
  auto find_p = [&](int a, int b) {
    const auto it = out.joint.find({a, b});
    return it == out.joint.end() ? 0.0 : it->second;
  };
  out.extreme_first = find_p(n_total, 0);
  out.extreme_second = find_p(0, n_total);
  return out;
}

// ---------------------------------------------------------------------------
// Sagnac figures of merit.
// ---------------------------------------------------------------------------

inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kHbarJs = kPlanckJs / (2.0 * std::numbers::pi);
inline constexpr double kSpeedOfLightMs = 299792458.0;
inline constexpr double kAtomicMassUnitKg = 1.66053906660e-27;
inline constexpr double kRb87MassKg = 86.909180527 * kAtomicMassUnitKg;

// Per-particle Sagnac phase of a matter wave relative to a photon of the
// given wavelength enclosing the same area: m c lambda / h.
inline double atom_photon_ratio(double mass_kg, double wavelength_m) {
  if (mass_kg <= 0.0 || wavelength_m <= 0.0) {
    throw ConfigError("atom_photon_ratio: mass and wavelength must be positive");
  }
  return mass_kg * kSpeedOfLightMs * wavelength_m / kPlanckJs;
}

struct SagnacQuery {
  double mass_kg = kRb87MassKg;
  double area_m2 = 1e-6;
  double qfi = 1.0;
  long shots = 1;
};

// Rotation-rate resolution delta Omega = hbar / (2 m A sqrt(nu F)) from the
// quantum Cramer-Rao bound with phase 2 m A Omega / hbar.
inline double sagnac_precision(const SagnacQuery& q) {
  if (q.qfi <= 0.0 || q.shots < 1 || q.area_m2 <= 0.0 || q.mass_kg <= 0.0) {
    throw ConfigError("sagnac_precision: need positive mass, area, QFI and shots");
  }
  return kHbarJs / (2.0 * q.mass_kg * q.area_m2 * std::sqrt(double(q.shots) * q.qfi));
}

}  // namespace rotometry

#endif  // ROTOMETRY_METROLOGY_HPP

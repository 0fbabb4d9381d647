#ifndef ROTOMETRY_MODELS_HPP
#define ROTOMETRY_MODELS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rotometry/errors.hpp"
#include "rotometry/fock_basis.hpp"
#include "rotometry/operators.hpp"
#include "rotometry/spectral.hpp"
#include "rotometry/states.hpp"

namespace rotometry {

// ---------------------------------------------------------------------------
// Three-site ring lattice with a rotation-induced Peierls phase.
// Energies in units of the tunneling J (pass J=1).
// ---------------------------------------------------------------------------

struct ThreeSiteParams {
  int num_particles = 1;
  double tunneling = 1.0;    // J
  double interaction = 0.0;  // U
  double phase = 0.0;        // total phase phi around the loop
  BasisOptions basis_options{};

  void validate() const {
    if (num_particles < 1) throw ConfigError("ThreeSiteParams: need at least one particle");
    if (tunneling < 0.0) throw ConfigError("ThreeSiteParams: tunneling must be >= 0");
  }
};

// H = -J [e^{i phi/3} (a^b + b^c + c^a) + h.c.] + U sum_s a_s^dag^2 a_s^2
// over the three site modes {0,1,2}.
inline ManyBodyOperator three_site_site_basis(const ThreeSiteParams& p) {
  p.validate();
  auto basis = FockBasis::build(p.num_particles, ModeSet::consecutive(3), p.basis_options);
  const Complex hop = -p.tunneling * std::exp(Complex(0.0, p.phase / 3.0));
  std::vector<LadderMonomial> terms;
  terms.push_back(hopping_op(0, 1, hop));  // a^dag b
  terms.push_back(hopping_op(1, 2, hop));  // b^dag c
  terms.push_back(hopping_op(2, 0, hop));  // c^dag a
  for (int s = 0; s < 3; ++s) {
    terms.push_back(LadderMonomial{Complex(p.interaction), {s, s}, {s, s}});
  }
  return build_hermitian(std::move(basis), terms, TermConvention::raise_only);
}

// Same Hamiltonian over the quasi-momentum (flow) modes {alpha,beta,gamma} =
// {0,1,2}: diagonal mode energies plus density-density and pair-exchange
// interaction terms. Spectrum identical to the site-basis form.
inline ManyBodyOperator three_site_flow_basis(const ThreeSiteParams& p) {
  p.validate();
  auto basis = FockBasis::build(p.num_particles, ModeSet::consecutive(3), p.basis_options);
  const double J = p.tunneling;
  const double c3 = std::cos(p.phase / 3.0);
  const double s3 = std::sin(p.phase / 3.0);
  const double u3 = p.interaction / 3.0;

  std::vector<LadderMonomial> terms;
  terms.push_back(number_op(0, -2.0 * J * c3));
  terms.push_back(number_op(1, J * c3 - std::sqrt(3.0) * J * s3));
  terms.push_back(number_op(2, J * c3 + std::sqrt(3.0) * J * s3));
  for (int k = 0; k < 3; ++k) {
    terms.push_back(LadderMonomial{Complex(u3), {k, k}, {k, k}});
  }
  terms.push_back(LadderMonomial{Complex(4.0 * u3), {0, 1}, {0, 1}});
  terms.push_back(LadderMonomial{Complex(4.0 * u3), {0, 2}, {0, 2}});
  terms.push_back(LadderMonomial{Complex(4.0 * u3), {1, 2}, {1, 2}});
  // Pair-exchange terms that move two quanta between flow modes; conjugates
  // are filled in by the builder.
  terms.push_back(LadderMonomial{Complex(2.0 * u3), {1, 2}, {0, 0}});  // beta^dag gamma^dag alpha^2
  terms.push_back(LadderMonomial{Complex(2.0 * u3), {0, 2}, {1, 1}});  // alpha^dag gamma^dag beta^2
  terms.push_back(LadderMonomial{Complex(2.0 * u3), {0, 1}, {2, 2}});  // alpha^dag beta^dag gamma^2
  return build_hermitian(std::move(basis), terms, TermConvention::raise_only);
}

// Discrete Fourier matrix mapping site amplitudes to flow-mode amplitudes;
// row order {alpha, beta, gamma}, column order {a, b, c}.
inline Eigen::MatrixXcd three_site_flow_unitary() {
  const Complex w = std::exp(Complex(0.0, 2.0 * std::numbers::pi / 3.0));
  Eigen::MatrixXcd u(3, 3);
  const double r = 1.0 / std::sqrt(3.0);
  u << r, r, r,                                  //
      r, r * w, r * w * w,                       //
      r, r * std::conj(w), r * std::conj(w * w);
  return u;
}

// Re-express a many-body state after the single-particle basis change
// a^dag_i = sum_k u_{ki} b^dag_k. For one particle this is amplitudes -> u *
// amplitudes. The result lives on a basis with the same mode count; u must be
// unitary to 1e-12.
struct ModeRotationOptions {
  // Below this dimension the rotated state is expanded term by term, which is
  // exact; above it the rotation runs as a Krylov propagation of the quadratic
  // generator log(u).
  FockBasis::Index expansion_threshold = 1500;
  double krylov_tol = 1e-12;
};

namespace detail {

// Hermitian h with e^{ih} = u, via the Schur form (diagonal for a unitary).
inline Eigen::MatrixXcd one_body_log(const Eigen::MatrixXcd& u) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  const Eigen::MatrixXcd& q = schur.matrixU();
  Eigen::VectorXd angles(u.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    angles(i) = std::arg(schur.matrixT()(i, i));
  }
  Eigen::MatrixXcd h = q * angles.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint().eval());
}

}  // namespace detail

inline PureState mode_rotation(const PureState& state, const Eigen::MatrixXcd& u,
                               const ModeRotationOptions& opts = {}) {
  const FockBasis& basis = *state.basis();
  const int num_modes = basis.modes().size();
  if (u.rows() != num_modes || u.cols() != num_modes) {
    throw ConfigError("mode_rotation: unitary has wrong dimensions");
  }
  const double unitarity =
      (u * u.adjoint() - Eigen::MatrixXcd::Identity(num_modes, num_modes)).cwiseAbs().maxCoeff();
  if (unitarity > 1e-12) {
    throw ConfigError("mode_rotation: matrix is not unitary, defect " + std::to_string(unitarity));
  }
  if (basis.truncated()) {
    throw ConfigError("mode_rotation: refusing to rotate on a truncated basis");
  }

  if (basis.dim() > opts.expansion_threshold) {
    const Eigen::MatrixXcd h = detail::one_body_log(u);
    std::vector<LadderMonomial> terms;
    for (int i = 0; i < num_modes; ++i) {
      for (int j = 0; j < num_modes; ++j) {
        if (std::abs(h(i, j)) < 1e-300) continue;
        terms.push_back(hopping_op(basis.modes().label(i), basis.modes().label(j), h(i, j)));
      }
    }
    const ManyBodyOperator gen = build_hermitian(state.basis(), terms, TermConvention::full_hermitian);
    Eigen::VectorXcd rotated = krylov_propagate(gen, state.amplitudes(), -1.0, opts.krylov_tol);
    rotated /= rotated.norm();
    return PureState(state.basis(), std::move(rotated));
  }

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(basis.dim());
  std::unordered_map<Occupation, Complex, OccupationHash> ket, next;
  for (FockBasis::Index col = 0; col < basis.dim(); ++col) {
    const Complex c = state.amplitudes()(col);
    if (c == Complex(0.0)) continue;
    const Occupation& occ = basis.state(col);

    // Expand prod_i (sum_k u_{ki} b^dag_k)^{n_i} |vac>.
    ket.clear();
    ket.emplace(Occupation(static_cast<std::size_t>(num_modes), 0), Complex(1.0));
    double norm_factor = 1.0;
    for (int i = 0; i < num_modes; ++i) {
      for (int rep = 0; rep < occ[static_cast<std::size_t>(i)]; ++rep) {
        next.clear();
        for (const auto& [t, amp] : ket) {
          for (int k = 0; k < num_modes; ++k) {
            if (u(k, i) == Complex(0.0)) continue;
            Occupation t2 = t;
            const double raise = std::sqrt(static_cast<double>(t2[static_cast<std::size_t>(k)] + 1));
            ++t2[static_cast<std::size_t>(k)];
            next[std::move(t2)] += amp * u(k, i) * raise;
          }
        }
        ket.swap(next);
      }
      for (int n = 2; n <= occ[static_cast<std::size_t>(i)]; ++n) norm_factor *= n;
    }
    const double scale = 1.0 / std::sqrt(norm_factor);
    for (const auto& [t, amp] : ket) {
      out(basis.rank(t)) += c * amp * scale;
    }
  }
  return PureState(state.basis(), std::move(out));
}

// ---------------------------------------------------------------------------
// Rapidly rotating 2D pancake trap restricted to the lowest Landau level.
// Energies in units of hbar*omega_xy; the rotation rate Omega is in units of
// omega_xy. Modes are Landau orbitals m = 0..mode_cutoff.
// ---------------------------------------------------------------------------

struct PancakeParams {
  int num_particles = 2;
  double interaction = 0.0;  // dimensionless g
  double asymmetry = 0.0;    // A
  double rotation = 1.0;     // Omega / omega_xy
  int mode_cutoff = 6;       // highest Landau index m
  std::optional<long> max_total_angular_momentum;  // restrict to L <= cap
  BasisOptions basis_options{};

  void validate() const {
    if (num_particles < 1) throw ConfigError("PancakeParams: need at least one particle");
    if (asymmetry < 0.0) throw ConfigError("PancakeParams: asymmetry must be >= 0");
    if (mode_cutoff < 1) throw ConfigError("PancakeParams: mode cutoff too small");
    if (mode_cutoff < num_particles) {
      std::cerr << "warning: pancake mode cutoff " << mode_cutoff << " below particle number "
                << num_particles << "; lowest angular momentum branch is not fully resolved\n";
    }
  }
};

// Critical rotation rate where the two lowest levels of the symmetric pancake
// trap cross: Omega_c = 1 - g N / (8 pi).
inline double critical_rotation_pancake(int num_particles, double interaction) {
  return 1.0 - interaction * num_particles / (8.0 * std::numbers::pi);
}

inline ManyBodyOperator pancake_hamiltonian(const PancakeParams& p) {
  p.validate();
  BasisOptions opt = p.basis_options;
  opt.max_total_label_weight = p.max_total_angular_momentum;
  auto basis = FockBasis::build(p.num_particles, ModeSet::range(0, p.mode_cutoff), opt);

  // Kinetic part N + (1 - Omega) L plus the contact interaction, which
  // conserves L; the whole list is Hermitian as given.
  std::vector<LadderMonomial> terms;
  for (int m = 0; m <= p.mode_cutoff; ++m) {
    terms.push_back(number_op(m, 1.0 + (1.0 - p.rotation) * m));
  }
  const double gpref = p.interaction / (4.0 * std::numbers::pi);
  if (gpref != 0.0) {
    auto lg = [](int n) { return std::lgamma(static_cast<double>(n) + 1.0); };
    for (int total = 0; total <= 2 * p.mode_cutoff; ++total) {
      for (int m1 = std::max(0, total - p.mode_cutoff); m1 <= std::min(total, p.mode_cutoff); ++m1) {
        const int m2 = total - m1;
        for (int n1 = std::max(0, total - p.mode_cutoff); n1 <= std::min(total, p.mode_cutoff); ++n1) {
          const int n2 = total - n1;
          const double log_coeff = lg(total) - total * std::numbers::ln2 -
                                   0.5 * (lg(m1) + lg(m2) + lg(n1) + lg(n2));
          terms.push_back(LadderMonomial{Complex(gpref * std::exp(log_coeff)), {m1, m2}, {n1, n2}});
        }
      }
    }
  }
  ManyBodyOperator h = build_hermitian(basis, terms, TermConvention::full_hermitian);

  // Trap asymmetry couples m <-> m+2. Only the quadratic raising branch is
  // well defined in the printed operator; build it and Hermitize.
  if (p.asymmetry != 0.0) {
    std::vector<LadderMonomial> asym;
    for (int m = 0; m + 2 <= p.mode_cutoff; ++m) {
      const double coeff =
          0.5 * p.asymmetry * std::sqrt(static_cast<double>((m + 1) * (m + 2)));
      asym.push_back(LadderMonomial{Complex(coeff), {m}, {m + 2}});
    }
    h = h + build_hermitian(basis, asym, TermConvention::raise_only);
  }
  return h;
}

// ---------------------------------------------------------------------------
// 1D ring with a rotating delta barrier, in the angular-momentum basis.
// Energies in units of E0 = 2 pi^2 hbar^2 / (M L^2). The rotation Omega is a
// dimensionless phase; the k=0 and k=1 modes are degenerate at Omega = pi.
// ---------------------------------------------------------------------------

struct RingParams {
  int num_particles = 1;
  double barrier = 0.0;      // b/L in units of E0
  double interaction = 0.0;  // g/L in units of E0
  double rotation = 0.0;     // Omega
  int k_min = -1;
  int k_max = 2;
  // Multiplies the raw interaction strength; compensation for basis
  // truncation can be dialed in here. Default keeps the raw value.
  double interaction_rescale = 1.0;
  BasisOptions basis_options{};

  void validate() const {
    if (num_particles < 1) throw ConfigError("RingParams: need at least one particle");
    if (!(k_min <= 0 && 1 <= k_max)) {
      throw ConfigError("RingParams: momentum window must contain k=0 and k=1");
    }
  }
};

// H = sum_k (k - Omega/2pi)^2 n_k + (b/L) sum_{k1,k2} a^dag_{k1} a_{k2}
//   + (g/2L) sum_{k1,k2,q} a^dag_{k1} a^dag_{k2} a_{k1-q} a_{k2+q},
// with interaction terms whose intermediate momenta leave the window dropped.
inline ManyBodyOperator ring_hamiltonian(const RingParams& p) {
  p.validate();
  auto basis = FockBasis::build(p.num_particles, ModeSet::range(p.k_min, p.k_max), p.basis_options);

  std::vector<LadderMonomial> terms;
  for (int k = p.k_min; k <= p.k_max; ++k) {
    const double x = k - p.rotation / (2.0 * std::numbers::pi);
    terms.push_back(number_op(k, x * x));
  }
  if (p.barrier != 0.0) {
    for (int k1 = p.k_min; k1 <= p.k_max; ++k1) {
      for (int k2 = p.k_min; k2 <= p.k_max; ++k2) {
        terms.push_back(hopping_op(k1, k2, Complex(p.barrier)));
      }
    }
  }
  const double geff = 0.5 * p.interaction * p.interaction_rescale;
  if (geff != 0.0) {
    for (int k1 = p.k_min; k1 <= p.k_max; ++k1) {
      for (int k2 = p.k_min; k2 <= p.k_max; ++k2) {
        const int q_lo = std::max(k1 - p.k_max, p.k_min - k2);
        const int q_hi = std::min(k1 - p.k_min, p.k_max - k2);
        for (int q = q_lo; q <= q_hi; ++q) {
          terms.push_back(LadderMonomial{Complex(geff), {k1, k2}, {k1 - q, k2 + q}});
        }
      }
    }
  }
  return build_hermitian(std::move(basis), terms, TermConvention::full_hermitian);
}

}  // namespace rotometry

#endif  // ROTOMETRY_MODELS_HPP

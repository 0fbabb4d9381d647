// Independent reference implementations used only by the test suite. Each
// one recomputes a library quantity through a different route (dilation
// instead of Kraus sums, fidelity derivatives instead of eigenpair sums,
// closed forms instead of diagonalization) so agreement is meaningful.

#ifndef ROTOMETRY_TESTS_ORACLES_HPP
#define ROTOMETRY_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include <rotometry/dynamics.hpp>
#include <rotometry/metrology.hpp>
#include <rotometry/states.hpp>

namespace oracles {

using rotometry::Complex;
using rotometry::DensityMatrix;
using rotometry::FockBasis;
using rotometry::ModeSet;
using rotometry::Occupation;
using rotometry::PhaseGenerator;
using rotometry::PureState;

// --- closed forms -----------------------------------------------------------

inline double noon_qfi_after_loss(int n, double l) {
  return double(n) * n * std::pow(1.0 - l, n);
}

inline double binomial_qfi_after_loss(int n, double l) { return n * (1.0 - l); }

// Loss fraction where the NOON advantage dies: n^2 (1-l)^n = n (1-l).
inline double noon_crossover_loss(int n) {
  return 1.0 - std::pow(double(n), -1.0 / (n - 1));
}

// Single-particle energies of the stirred three-site ring.
inline std::array<double, 3> three_site_single_particle(double tunneling, double phase) {
  std::array<double, 3> e{};
  for (int k = 0; k < 3; ++k) {
    e[static_cast<std::size_t>(k)] =
        -2.0 * tunneling * std::cos((phase + 2.0 * std::numbers::pi * k) / 3.0);
  }
  std::sort(e.begin(), e.end());
  return e;
}

// --- loss by explicit dilation ---------------------------------------------

// Dense density blocks keyed by surviving atom number, over the full basis
// of that sector (same mode count as the input state).
using SectorMap = std::map<int, Eigen::MatrixXcd>;

inline SectorMap sector_dense(const DensityMatrix& rho) {
  SectorMap out;
  for (const auto& sec : rho.sectors) {
    const Eigen::Index dim = sec.basis->dim();
    auto [it, fresh] = out.try_emplace(sec.num_particles());
    if (fresh) it->second = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t i = 0; i < sec.support.size(); ++i) {
      for (std::size_t j = 0; j < sec.support.size(); ++j) {
        it->second(sec.support[i], sec.support[j]) +=
            sec.mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

// Send every mode through a beam splitter into its own environment mode,
// evolve the doubled system exactly, then trace the environment. No binomial
// Kraus weights anywhere: the splitter is a matrix exponential.
inline SectorMap loss_by_dilation(const PureState& psi, double loss_fraction) {
  const FockBasis& basis = *psi.basis();
  const int m = basis.modes().size();
  const int n = basis.num_particles();
  auto joint = FockBasis::build(n, ModeSet::consecutive(2 * m));

  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(joint->dim());
  for (FockBasis::Index i = 0; i < basis.dim(); ++i) {
    Occupation occ(static_cast<std::size_t>(2 * m), 0);
    for (int p = 0; p < m; ++p) occ[static_cast<std::size_t>(p)] = basis.state(i)[static_cast<std::size_t>(p)];
    amp(joint->rank(occ)) = psi.amplitudes()(i);
  }
  PureState state(joint, amp);

  const double theta = std::acos(std::sqrt(1.0 - loss_fraction));
  for (int p = 0; p < m; ++p) {
    std::vector<rotometry::LadderMonomial> gen = {
        rotometry::hopping_op(p, m + p, Complex(0.0, 1.0))};
    auto h = rotometry::build_hermitian(joint, gen, rotometry::TermConvention::raise_only);
    state = rotometry::Propagator(h).advance(state, theta);
  }

  // Group joint amplitudes by the environment occupation.
  SectorMap out;
  std::map<int, std::shared_ptr<const FockBasis>> sector_bases;
  std::map<Occupation, Eigen::VectorXcd> conditionals;
  for (FockBasis::Index i = 0; i < joint->dim(); ++i) {
    const Complex c = state.amplitudes()(i);
    if (c == Complex(0.0)) continue;
    const Occupation& occ = joint->state(i);
    Occupation sys(occ.begin(), occ.begin() + m);
    Occupation env(occ.begin() + m, occ.end());
    int lost = 0;
    for (int x : env) lost += x;
    auto [bit, fresh_basis] = sector_bases.try_emplace(n - lost);
    if (fresh_basis) bit->second = FockBasis::build(n - lost, ModeSet::consecutive(m));
    auto [it, fresh] = conditionals.try_emplace(env);
    if (fresh) it->second = Eigen::VectorXcd::Zero(bit->second->dim());
    it->second(bit->second->rank(sys)) += c;
  }
  for (const auto& [env, vec] : conditionals) {
    int lost = 0;
    for (int x : env) lost += x;
    auto [it, fresh] = out.try_emplace(n - lost);
    if (fresh) it->second = Eigen::MatrixXcd::Zero(vec.size(), vec.size());
    it->second += vec * vec.adjoint();
  }
  return out;
}

// --- QFI through fidelity and derivatives ----------------------------------

// Uhlmann fidelity of two block-diagonal states given as dense sector maps.
inline double uhlmann_fidelity(const SectorMap& a, const SectorMap& b) {
  double f = 0.0;
  for (const auto& [n, mat_a] : a) {
    const auto it = b.find(n);
    if (it == b.end()) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(mat_a);
    Eigen::VectorXd lam = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd sqrt_a =
        ea.eigenvectors() * lam.asDiagonal() * ea.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(sqrt_a * it->second * sqrt_a);
    f += em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  }
  return f;
}

// Rotate the number-diagonal phase e^{-i theta G} through a sector map.
inline SectorMap rotate_sectors(const DensityMatrix& rho, const PhaseGenerator& g, double theta) {
  DensityMatrix rotated = rho;
  for (auto& sec : rotated.sectors) {
    const Eigen::Index dim = static_cast<Eigen::Index>(sec.support.size());
    Eigen::VectorXcd phase(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double gv = g.eigenvalue(sec.basis->state(sec.support[static_cast<std::size_t>(i)]));
      phase(i) = std::exp(Complex(0.0, -theta * gv));
    }
    sec.mat = phase.asDiagonal() * sec.mat * phase.conjugate().asDiagonal();
  }
  return sector_dense(rotated);
}

// QFI from the Bures metric: F = 8 (1 - fidelity(rho, rho_theta)) / theta^2
// extrapolated to theta -> 0 with one Richardson step.
inline double mixed_qfi_by_bures(const DensityMatrix& rho, const PhaseGenerator& g,
                                 double theta = 1e-2) {
  const SectorMap base = sector_dense(rho);
  auto f_at = [&](double t) {
    return 8.0 * (1.0 - uhlmann_fidelity(base, rotate_sectors(rho, g, t))) / (t * t);
  };
  const double coarse = f_at(theta);
  const double fine = f_at(0.5 * theta);
  return (4.0 * fine - coarse) / 3.0;
}

// Pure-state QFI via finite-difference tangent vectors:
// F = 4 (<d psi|d psi> - |<psi|d psi>|^2), with one Richardson step.
inline double pure_qfi_by_derivative(const PureState& psi, const PhaseGenerator& g,
                                     double theta = 1e-2) {
  const FockBasis& basis = *psi.basis();
  auto rotated = [&](double t) {
    Eigen::VectorXcd v = psi.amplitudes();
    for (FockBasis::Index i = 0; i < basis.dim(); ++i) {
      v(i) *= std::exp(Complex(0.0, -t * g.eigenvalue(basis.state(i))));
    }
    return v;
  };
  auto f_at = [&](double t) {
    const Eigen::VectorXcd d = (rotated(t) - rotated(-t)) / (2.0 * t);
    const Complex proj = psi.amplitudes().dot(d);
    return 4.0 * (d.squaredNorm() - std::norm(proj));
  };
  const double coarse = f_at(theta);
  const double fine = f_at(0.5 * theta);
  return (4.0 * fine - coarse) / 3.0;
}

// --- crossing refinement ----------------------------------------------------

// Gap-based minimizers locate an anti-crossing only to the noise floor of
// the quadratic gap bottom (~1e-8 in the parameter). The weight imbalance
// between the two extreme branches crosses zero linearly at the symmetric
// point, so bisecting its sign pins the crossing to machine precision.
template <typename BuildFn>
double balance_extreme_weights(BuildFn&& build, double lo, double hi,
                               const rotometry::Occupation& low,
                               const rotometry::Occupation& high) {
  auto imbalance = [&](double x) {
    const rotometry::GroundState gs = rotometry::ground_state(build(x));
    return gs.state.probability(low) - gs.state.probability(high);
  };
  double flo = imbalance(lo);
  double fhi = imbalance(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw rotometry::BracketError("balance_extreme_weights: imbalance does not change sign");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = imbalance(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// --- fringe readout ---------------------------------------------------------

// Dominant angular frequency of a uniformly sampled real signal. A Hann
// window tames the rectangular-window sidelobes (those bias the raw estimate
// by up to a third of a bin); parabolic interpolation on the log magnitude
// then locates the peak to a small fraction of a bin.
inline double fringe_angular_frequency(const std::vector<double>& times,
                                       const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 8 || times.size() != n) throw rotometry::ConfigError("fringe: need >= 8 samples");
  const double dt = times[1] - times[0];
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(n);

  std::vector<double> windowed(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(j) / double(n - 1)));
    windowed[j] = (values[j] - mean) * hann;
  }

  std::vector<double> mag(n / 2 + 1, 0.0);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double arg = -2.0 * std::numbers::pi * double(k) * double(j) / double(n);
      acc += windowed[j] * std::exp(Complex(0.0, arg));
    }
    mag[k] = std::abs(acc);
  }
  // The Hann mainlobe of any residual DC component still touches bin 1.
  std::size_t kpk = 2;
  for (std::size_t k = 3; k <= n / 2; ++k) {
    if (mag[k] > mag[kpk]) kpk = k;
  }
  double shift = 0.0;
  if (kpk > 1 && kpk < n / 2 && mag[kpk - 1] > 0.0 && mag[kpk + 1] > 0.0) {
    const double a = std::log(mag[kpk - 1]);
    const double b = std::log(mag[kpk]);
    const double c = std::log(mag[kpk + 1]);
    const double denom = a - 2.0 * b + c;
    if (std::abs(denom) > 1e-300) shift = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  return 2.0 * std::numbers::pi * (double(kpk) + shift) / (double(n) * dt);
}

}  // namespace oracles

#endif  // ROTOMETRY_TESTS_ORACLES_HPP

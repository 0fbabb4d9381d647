#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include <rotometry/rotometry.hpp>

#include "oracles.hpp"

using namespace rotometry;

namespace {

Eigen::VectorXd dense_spectrum(const ManyBodyOperator& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

TEST(ThreeSiteModel, SingleParticleClosedForm) {
  std::mt19937 rng(31u);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> coupling(0.2, 2.0);
  for (int trial = 0; trial < 12; ++trial) {
    ThreeSiteParams p;
    p.num_particles = 1;
    p.tunneling = coupling(rng);
    p.phase = phase(rng);
    const Eigen::VectorXd ev = dense_spectrum(three_site_site_basis(p));
    const auto expected = oracles::three_site_single_particle(p.tunneling, p.phase);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(ev(i), expected[static_cast<std::size_t>(i)], 1e-12);
  }
}

TEST(ThreeSiteModel, SiteAndFlowSpectraAgree) {
  std::mt19937 rng(77u);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> strength(0.0, 2.5);
  for (int n : {1, 2, 3, 4}) {
    ThreeSiteParams p;
    p.num_particles = n;
    p.tunneling = 0.3 + strength(rng);
    p.interaction = strength(rng);
    p.phase = phase(rng);
    const Eigen::VectorXd site = dense_spectrum(three_site_site_basis(p));
    const Eigen::VectorXd flow = dense_spectrum(three_site_flow_basis(p));
    ASSERT_EQ(site.size(), flow.size());
    for (Eigen::Index i = 0; i < site.size(); ++i) EXPECT_NEAR(site(i), flow(i), 1e-9);
  }
}

TEST(ThreeSiteModel, FlowBasisIsDiagonalWithoutInteraction) {
  ThreeSiteParams p;
  p.num_particles = 3;
  p.interaction = 0.0;
  p.phase = 1.3;
  const Eigen::MatrixXcd h = three_site_flow_basis(p).to_dense();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      if (i != j) EXPECT_LT(std::abs(h(i, j)), 1e-15);
    }
  }
}

TEST(ThreeSiteModel, RotatedSiteGroundStateMatchesFlowGroundState) {
  ThreeSiteParams p;
  p.num_particles = 3;
  p.interaction = 1.0;
  p.phase = 2.0;
  const GroundState site = ground_state(three_site_site_basis(p));
  const GroundState flow = ground_state(three_site_flow_basis(p));
  ASSERT_FALSE(site.degenerate);
  const PureState rotated = mode_rotation(site.state, three_site_flow_unitary());
  EXPECT_NEAR(std::abs(rotated.overlap(flow.state)), 1.0, 1e-10);
}

TEST(ThreeSiteModel, StirringAnticrossingAtHalfFlux) {
  ThreeSiteParams base;
  base.num_particles = 3;
  base.interaction = 1.0;
  auto build = [&](double phi) {
    ThreeSiteParams p = base;
    p.phase = phi;
    return three_site_site_basis(p);
  };
  const AntiCrossing ac = find_anticrossing(2.0, 4.2, build);
  EXPECT_NEAR(ac.parameter, std::numbers::pi, 1e-6);
  EXPECT_GT(ac.gap, 0.1);  // interaction opens a real anti-crossing

  // At the crossing the flow-basis ground state balances the two
  // macroscopically distinct circulation branches. The balance point is the
  // symmetric phase itself.
  auto build_flow = [&](double phi) {
    ThreeSiteParams p = base;
    p.phase = phi;
    return three_site_flow_basis(p);
  };
  const double phi_star = oracles::balance_extreme_weights(
      build_flow, ac.parameter - 1e-3, ac.parameter + 1e-3, Occupation{3, 0, 0},
      Occupation{0, 3, 0});
  EXPECT_NEAR(phi_star, std::numbers::pi, 1e-12);

  ThreeSiteParams at = base;
  at.phase = phi_star;
  const GroundState gs = ground_state(three_site_flow_basis(at));
  const double w_low = gs.state.probability(Occupation{3, 0, 0});
  const double w_high = gs.state.probability(Occupation{0, 3, 0});
  EXPECT_NEAR(w_low, w_high, 1e-9);
  EXPECT_GT(w_low, 0.2);

  const PureState noon = noon_state(gs.state.basis(), 0, 1);
  EXPECT_GT(std::norm(noon.overlap(gs.state)), 0.5);
}

TEST(PancakeModel, CondensateInteractionEnergy) {
  PancakeParams p;
  p.num_particles = 2;
  p.interaction = 0.5;
  p.rotation = 0.9;
  p.mode_cutoff = 6;
  const ManyBodyOperator h = pancake_hamiltonian(p);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(h.dim());
  Occupation all_zero(7, 0);
  all_zero[0] = 2;
  v(h.basis()->rank(all_zero)) = 1.0;
  const PureState condensate(h.basis(), v);
  // Kinetic part is N for the zero-angular-momentum configuration.
  const double e_int = condensate.expectation(h).real() - 2.0;
  EXPECT_NEAR(e_int, p.interaction / (2.0 * std::numbers::pi), 1e-12);
}

TEST(PancakeModel, AngularMomentumParityBlocks) {
  PancakeParams p;
  p.num_particles = 3;
  p.interaction = 0.5;
  p.asymmetry = 0.03;
  p.rotation = 0.95;
  p.mode_cutoff = 5;
  const ManyBodyOperator h = pancake_hamiltonian(p);
  const Eigen::MatrixXcd dense = h.to_dense();
  const auto& basis = *h.basis();
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      const long dl = basis.label_weight(i) - basis.label_weight(j);
      if (dl % 2 != 0) {
        EXPECT_LT(std::abs(dense(i, j)), 1e-14);
      }
      if (std::labs(dl) > 2) {
        EXPECT_LT(std::abs(dense(i, j)), 1e-14);  // one asymmetry quantum at most
      }
    }
  }
}

TEST(PancakeModel, SymmetricTrapLevelCrossing) {
  PancakeParams base;
  base.num_particles = 2;
  base.interaction = 0.5;
  base.mode_cutoff = 8;
  const double expected = critical_rotation_pancake(base.num_particles, base.interaction);
  auto build = [&](double omega) {
    PancakeParams p = base;
    p.rotation = omega;
    return pancake_hamiltonian(p);
  };
  const AntiCrossing ac = find_anticrossing(expected - 0.02, expected + 0.02, build);
  EXPECT_NEAR(ac.parameter, expected, 1e-6);
  EXPECT_LT(ac.gap, 1e-8);  // symmetric trap: branches cross without coupling
}

TEST(PancakeModel, AsymmetryOpensTheCrossing) {
  PancakeParams base;
  base.num_particles = 2;
  base.interaction = 0.5;
  base.asymmetry = 0.01;
  base.mode_cutoff = 8;
  const double expected = critical_rotation_pancake(base.num_particles, base.interaction);
  auto build = [&](double omega) {
    PancakeParams p = base;
    p.rotation = omega;
    return pancake_hamiltonian(p);
  };
  const AntiCrossing ac = find_anticrossing(expected - 0.02, expected + 0.02, build);
  EXPECT_NEAR(ac.parameter, expected, 5e-3);
  EXPECT_GT(ac.gap, 1e-5);
}

TEST(RingModel, SingleParticleMatrixMatchesDirectConstruction) {
  RingParams p;
  p.num_particles = 1;
  p.barrier = 0.17;
  p.rotation = 2.2;
  p.k_min = -2;
  p.k_max = 3;
  const ManyBodyOperator h = ring_hamiltonian(p);

  const int m = p.k_max - p.k_min + 1;
  Eigen::MatrixXcd direct = Eigen::MatrixXcd::Constant(m, m, Complex(p.barrier));
  for (int k = p.k_min; k <= p.k_max; ++k) {
    const double x = k - p.rotation / (2.0 * std::numbers::pi);
    direct(k - p.k_min, k - p.k_min) += x * x;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(h.to_dense(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eb(direct, Eigen::EigenvaluesOnly);
  for (int i = 0; i < m; ++i) EXPECT_NEAR(ea.eigenvalues()(i), eb.eigenvalues()(i), 1e-12);
}

TEST(RingModel, BareDegeneracyAtHalfQuantum) {
  RingParams p;
  p.num_particles = 1;
  p.rotation = std::numbers::pi;
  p.k_min = -1;
  p.k_max = 2;
  const Eigen::VectorXd ev = dense_spectrum(ring_hamiltonian(p));
  EXPECT_LT(ev(1) - ev(0), 1e-14);
}

TEST(RingModel, BarrierGapIsTwiceTheCoupling) {
  RingParams p;
  p.num_particles = 1;
  p.barrier = 0.1;
  p.rotation = std::numbers::pi;

  // Two-mode window: the degenerate pair alone, where the splitting is
  // exactly twice the barrier coupling.
  p.k_min = 0;
  p.k_max = 1;
  Eigen::VectorXd ev = dense_spectrum(ring_hamiltonian(p));
  EXPECT_NEAR(ev(1) - ev(0), 2.0 * p.barrier, 1e-12);

  // Spectator modes push the symmetric branch down by 2 b^2 (they couple
  // only to it), so the wide-window gap sits at 2b - 2b^2 + O(b^3).
  p.k_min = -1;
  p.k_max = 2;
  ev = dense_spectrum(ring_hamiltonian(p));
  EXPECT_NEAR(ev(1) - ev(0), 2.0 * p.barrier - 2.0 * p.barrier * p.barrier, 2e-3);
}

TEST(RingModel, InteractionConservesCirculation) {
  RingParams p;
  p.num_particles = 2;
  p.interaction = 1.0;
  p.rotation = 1.0;
  p.k_min = -1;
  p.k_max = 2;
  const ManyBodyOperator h = ring_hamiltonian(p);
  const Eigen::MatrixXcd dense = h.to_dense();
  const auto& basis = *h.basis();
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (basis.label_weight(i) != basis.label_weight(j)) {
        EXPECT_LT(std::abs(dense(i, j)), 1e-15);
      }
    }
  }
}

TEST(RingModel, WindowMustCoverBothCrossingModes) {
  RingParams p;
  p.num_particles = 1;
  p.k_min = 1;  // excludes k = 0
  p.k_max = 2;
  EXPECT_THROW(ring_hamiltonian(p), ConfigError);
  p.k_min = -1;
  p.k_max = 0;  // excludes k = 1
  EXPECT_THROW(ring_hamiltonian(p), ConfigError);
}

TEST(ParameterValidation, RejectsUnphysicalInputs) {
  ThreeSiteParams t;
  t.num_particles = 0;
  EXPECT_THROW(three_site_site_basis(t), ConfigError);
  t.num_particles = 2;
  t.tunneling = -1.0;
  EXPECT_THROW(three_site_site_basis(t), ConfigError);

  PancakeParams q;
  q.asymmetry = -0.1;
  EXPECT_THROW(pancake_hamiltonian(q), ConfigError);
}

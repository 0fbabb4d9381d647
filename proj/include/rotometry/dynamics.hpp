#ifndef ROTOMETRY_DYNAMICS_HPP
#define ROTOMETRY_DYNAMICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "rotometry/errors.hpp"
#include "rotometry/models.hpp"
#include "rotometry/operators.hpp"
#include "rotometry/spectral.hpp"
#include "rotometry/states.hpp"

namespace rotometry {

// Exact time evolution exp(-i H t) through the full eigendecomposition,
// cached so repeated times against the same Hamiltonian cost one
// matrix-vector product each. Time is measured in inverse model energy units
// (hbar = 1).
class Propagator {
 public:
  explicit Propagator(const ManyBodyOperator& h) : basis_(h.basis()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
    if (es.info() != Eigen::Success) throw SolverError("Propagator: eigendecomposition failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }

  const Eigen::VectorXd& energies() const { return energies_; }

  // Spread between the extreme eigenvalues; sets the fastest phase in play.
  double spectral_span() const {
    return energies_.size() == 0 ? 0.0 : energies_(energies_.size() - 1) - energies_(0);
  }

  PureState advance(const PureState& psi, double time) const {
    if (!psi.basis()->same_basis(*basis_)) {
      throw ConfigError("Propagator: state lives on a different basis");
    }
    Eigen::VectorXcd modal = vectors_.adjoint() * psi.amplitudes();
    for (Eigen::Index i = 0; i < modal.size(); ++i) {
      modal(i) *= std::exp(Complex(0.0, -energies_(i) * time));
    }
    Eigen::VectorXcd out = vectors_ * modal;
    out.normalize();  // remove float drift so downstream norm checks stay quiet
    return PureState(basis_, std::move(out));
  }

 private:
  std::shared_ptr<const FockBasis> basis_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd vectors_;
};

inline PureState evolve(const ManyBodyOperator& h, const PureState& psi, double time) {
  return Propagator(h).advance(psi, time);
}

struct RampOptions {
  // Largest phase any eigencomponent may wind within one piecewise-constant
  // step; smaller values track the instantaneous Hamiltonian more closely.
  double max_phase_advance = 0.1;
  int min_steps = 8;
  int max_steps = 2'000'000;
};

// Drive a parameter linearly from `from` to `to` over `duration`, evolving
// under the midpoint Hamiltonian of each slice. The slice count comes from
// the spectral span at the start of the ramp.
template <typename BuildFn>
PureState ramp_evolve(BuildFn&& build, double from, double to, double duration, PureState psi,
                      const RampOptions& opts = {}) {
  if (duration < 0.0) throw ConfigError("ramp_evolve: negative duration");
  if (duration == 0.0) return psi;

  const double span = Propagator(build(from)).spectral_span();
  int steps = opts.min_steps;
  if (span > 0.0) {
    const double ideal = duration * span / opts.max_phase_advance;
    if (ideal > static_cast<double>(opts.max_steps)) {
      throw ConfigError("ramp_evolve: step budget exceeded; raise max_phase_advance");
    }
    steps = std::max(steps, static_cast<int>(std::ceil(ideal)));
  }

  const double dt = duration / steps;
  for (int s = 0; s < steps; ++s) {
    const double x = from + (to - from) * (s + 0.5) / steps;
    psi = Propagator(build(x)).advance(psi, dt);
  }
  return psi;
}

// ---------------------------------------------------------------------------
// Stirring interferometer on the barrier ring. The barrier anti-crossing at
// the degeneracy point acts as the beam splitter: ramping the stirring rate
// into it swings the condensate into a superposition of the lowest and
// first circulating branches. A detuned hold then winds their relative
// phase, and projecting back on the crossing-point ground state reads the
// fringe. With the barrier off during the hold, circulation is conserved
// and the fringe frequency is N * detuning / pi, the N-fold Sagnac speedup.
// ---------------------------------------------------------------------------

struct GyroscopeProtocolConfig {
  // Ring at the operating point; `rotation` here is the crossing value the
  // ramp ends on (pi for a symmetric momentum window).
  RingParams ring;
  double prep_rotation = 0.5 * std::numbers::pi;
  double ramp_duration = 100.0;
  RampOptions ramp{};
  // Stirring offset applied during the hold.
  double hold_detuning = 0.1;
  double hold_barrier = 0.0;
  std::vector<double> hold_times;
  EigensolveOptions eigs{};
};

struct ProtocolResult {
  PureState prepared;
  // Populations of the all-atoms-stationary and all-atoms-circulating
  // configurations after the ramp; a clean beam splitter gives ~1/2 each.
  double extreme_low_weight = 0.0;
  double extreme_high_weight = 0.0;
  double crossing_gap = 0.0;
  std::vector<double> times;
  std::vector<double> return_probability;
};

inline ProtocolResult gyroscope_protocol(const GyroscopeProtocolConfig& cfg) {
  cfg.ring.validate();
  auto at_rotation = [&](double omega) {
    RingParams p = cfg.ring;
    p.rotation = omega;
    return ring_hamiltonian(p);
  };

  GroundState start = ground_state(at_rotation(cfg.prep_rotation), cfg.eigs);
  PureState prepared = ramp_evolve(at_rotation, cfg.prep_rotation, cfg.ring.rotation,
                                   cfg.ramp_duration, start.state, cfg.ramp);

  GroundState crossing = ground_state(at_rotation(cfg.ring.rotation), cfg.eigs);

  const FockBasis& basis = *prepared.basis();
  const int n = basis.num_particles();
  Occupation all_low(static_cast<std::size_t>(basis.modes().size()), 0);
  Occupation all_high = all_low;
  all_low[static_cast<std::size_t>(basis.modes().position_of(0))] = n;
  all_high[static_cast<std::size_t>(basis.modes().position_of(1))] = n;

  ProtocolResult out{prepared, prepared.probability(all_low), prepared.probability(all_high),
                     crossing.gap, {}, {}};

  RingParams hold = cfg.ring;
  hold.rotation = cfg.ring.rotation + cfg.hold_detuning;
  hold.barrier = cfg.hold_barrier;
  Propagator hold_prop(ring_hamiltonian(hold));
  out.times = cfg.hold_times;
  out.return_probability.reserve(cfg.hold_times.size());
  for (double t : cfg.hold_times) {
    const PureState evolved = hold_prop.advance(prepared, t);
    out.return_probability.push_back(std::norm(evolved.overlap(crossing.state)));
  }
  return out;
}

}  // namespace rotometry

#endif  // ROTOMETRY_DYNAMICS_HPP

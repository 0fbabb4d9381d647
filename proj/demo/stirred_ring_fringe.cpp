// Interference protocol on the barrier ring: ramp the stirring rate up to the
// avoided crossing to beam-split the condensate between circulation sectors,
// hold at a small detuning, and watch the return probability oscillate. With
// N atoms the accumulated phase grows N times faster.

#include <cstdio>

#include <rotometry/rotometry.hpp>

int main() {
  using namespace rotometry;

  auto run = [](int atoms, double interaction) {
    GyroscopeProtocolConfig cfg;
    cfg.ring.num_particles = atoms;
    cfg.ring.barrier = 0.1;
    cfg.ring.interaction = interaction;
    cfg.ring.rotation = std::numbers::pi;
    cfg.ring.k_min = -1;
    cfg.ring.k_max = 2;
    cfg.prep_rotation = 0.5 * std::numbers::pi;
    cfg.ramp_duration = 300.0;
    cfg.hold_detuning = 0.1;
    cfg.hold_times = GridSpec{0.0, 1200.0, 121}.values();
    return gyroscope_protocol(cfg);
  };

  const ProtocolResult one = run(1, 0.0);
  const ProtocolResult two = run(2, 0.3);

  std::printf("# ramp splits the state across the crossing: N=1 weights %.4f/%.4f, "
              "N=2 weights %.4f/%.4f\n",
              one.extreme_low_weight, one.extreme_high_weight, two.extreme_low_weight,
              two.extreme_high_weight);
  std::printf("# time P_return(N=1) P_return(N=2)\n");
  for (std::size_t i = 0; i < one.times.size(); ++i) {
    std::printf("%8.2f %.6f %.6f\n", one.times[i], one.return_probability[i],
                two.return_probability[i]);
  }
  return 0;
}

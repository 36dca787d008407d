#pragma once
#include <complex>
#include <vector>

#include "holoq/gauge.hpp"
#include "holoq/grid.hpp"
#include "holoq/transport.hpp"

namespace holoq {

enum class SplitScheme {
  // Kinetic factor in canonical momentum; the coupling terms
  // -(q/m) A . p_bar + q^2 A^2 / 2m enter the real-space phase, with p_bar the
  // state's current mean momentum.  An approximation for narrow-band packets:
  // the operator character of p inside the cross term is dropped.
  Carrier,
  // Exact alternative for potentials of the form A = (A_x(y), 0) on a 2d
  // grid: the x-kinetic factor (k_x - q A_x(y))^2 / 2m is diagonal in the
  // mixed (k_x, y) representation, so no carrier approximation is needed.
  Axial,
};

struct EvolutionConfig {
  double dt = 1e-2;
  int steps = 1;
  double mass = 1.0;
  GaugePotential potential;  // sampled once at time zero (static fields)
  int record_every = 1;
  SplitScheme scheme = SplitScheme::Carrier;

  void validate(const GridSpec& grid) const;
};

struct Snapshot {
  int step = 0;
  double time = 0.0;
  WaveFunction state;
};

// Second-order split-step integration (kinetic half, potential phase, kinetic
// half).  Single-component states with U(1) potentials.  Snapshots are taken
// at step 0, every record_every-th step, and the final step.  Throws
// ValidationError if the initial state already loads an excluded region with
// more than one part in 1e6 of its mass, NumericError if it does so mid-run
// or if the norm drifts beyond 1e-8 over the whole run.
std::vector<Snapshot> evolve(const WaveFunction& psi,
                             const EvolutionConfig& cfg);

// Two packets launched with a common speed along +x, symmetric about the flux
// line; at each recorded time every comparison curve is translated with the
// pair and the displacement-operator expectation is taken in the equal-weight
// superposition.
struct ABScenarioConfig {
  double flux = 0.0;          // strength of the line built at flux_center
  double packet_speed = 1.0;  // common speed of both packets along +x
  double impact_offset = 3.0; // half the transverse separation of the pair
  // Templates anchored at the launch positions, each running from the upper
  // launch point to the lower one.
  std::vector<Curve> gamma_family;
  // Time-stepping parameters; the potential field must be a bare U(1) basis —
  // the scenario installs its own flux line and reads the charge from it.
  EvolutionConfig evolution;
  GridSpec grid;
  Vec2 flux_center = Vec2(0.0, 0.0);
  double start_x = -3.0;  // launch x of both packets
  double width = 0.8;     // initial packet width
  double overlap_tol = 1e-4;  // relative mid-flight disjointness bound
};

struct ABSample {
  int step = 0;
  double time = 0.0;
  std::vector<Complex> g;    // one expectation per comparison curve
  std::vector<int> crossed;  // 1 once the flux lies inside the closed loop
};

struct ABScenarioResult {
  std::vector<ABSample> samples;
  // First integration step at which the loop closed by the launch segment,
  // the translated curve, and the two straight trajectories encloses the
  // flux; -1 when it never does.
  std::vector<int> first_crossing_step;
  double charge = 1.0;
};

ABScenarioResult ab_scenario(const ABScenarioConfig& cfg);

}  // namespace holoq

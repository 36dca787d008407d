#include "holoq/dynamics.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "holoq/errors.hpp"
#include "holoq/gauge.hpp"
#include "holoq/geometry.hpp"
#include "holoq/grid.hpp"
#include "holoq/observables.hpp"
#include "holoq/transport.hpp"

using namespace holoq;

namespace {

GridSpec line256() {
  GridSpec g;
  g.dim = 1;
  g.points_per_axis = 256;
  g.spacing = 0.05;
  g.origin = Vec2(-6.4, 0.0);
  return g;
}

GridSpec plane128() {
  GridSpec g;
  g.dim = 2;
  g.points_per_axis = 128;
  g.spacing = 0.2;
  g.origin = Vec2(-12.8, -12.8);
  return g;
}

double position_mean(const WaveFunction& psi) {
  double m = 0.0, w = 0.0;
  const std::size_t n = psi.grid.total_points();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::norm(psi.at(i));
    m += d * psi.grid.coord(i).x();
    w += d;
  }
  return m / w;
}

double position_variance(const WaveFunction& psi) {
  const double c = position_mean(psi);
  double v = 0.0, w = 0.0;
  const std::size_t n = psi.grid.total_points();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::norm(psi.at(i));
    const double u = psi.grid.coord(i).x() - c;
    v += d * u * u;
    w += d;
  }
  return v / w;
}

// A_x depending on y only; the strict form both split schemes handle, and the
// one for which the mean momentum along x is a constant of motion.
GaugePotential shear_background(double slope) {
  GaugePotential A;
  A.background = [slope](const Vec2& x, double) {
    AlgebraField f = AlgebraField::Zero();
    f(0, 0) = slope * x.y();
    return f;
  };
  return A;
}

// Standard two-packet configuration: launch points straddle the flux line
// symmetrically and the comparison family is a straight rung plus the two
// half-circle detours around either side.
ABScenarioConfig standard_scenario(double flux) {
  ABScenarioConfig cfg;
  cfg.flux = flux;
  cfg.packet_speed = 2.0;
  cfg.impact_offset = 4.4;
  cfg.flux_center = Vec2(0.013, 0.017);
  cfg.start_x = -3.013;
  cfg.width = 0.78;
  cfg.grid = plane128();
  cfg.evolution.dt = 0.02;
  cfg.evolution.steps = 150;
  cfg.evolution.mass = 4.0;
  cfg.evolution.record_every = 15;
  const Vec2 top(cfg.start_x, cfg.flux_center.y() + cfg.impact_offset);
  const Vec2 bottom(cfg.start_x, cfg.flux_center.y() - cfg.impact_offset);
  const Vec2 center(cfg.start_x, cfg.flux_center.y());
  cfg.gamma_family = {
      segment_curve(top, bottom, 8),
      arc_curve(center, cfg.impact_offset, 0.5 * pi, -0.5 * pi, 64),
      arc_curve(center, cfg.impact_offset, 0.5 * pi, 1.5 * pi, 64),
  };
  return cfg;
}

}  // namespace

TEST_CASE("free packet follows the analytic moments") {
  const GridSpec grid = line256();
  const WaveFunction psi0 =
      gaussian_packet(grid, Vec2(0.0, 0.0), 0.3, Vec2(2.0, 0.0));
  EvolutionConfig cfg;
  cfg.dt = 0.002;
  cfg.steps = 150;
  cfg.record_every = 75;
  const auto snaps = evolve(psi0, cfg);
  REQUIRE(snaps.size() == 3);
  for (const Snapshot& s : snaps) {
    const double t = s.time;
    const double spread = 0.09 + (t / 0.6) * (t / 0.6);
    CHECK(std::abs(position_mean(s.state) - 2.0 * t) < 1e-4);
    CHECK(std::abs(position_variance(s.state) - spread) < 1e-4);
    CHECK(std::abs(momentum_moment(s.state, 1) - 2.0) < 1e-6);
    CHECK(std::abs(s.state.norm() - 1.0) < 1e-9);
  }
  CHECK(snaps.back().step == 150);
  CHECK(snaps.back().time == doctest::Approx(0.3));
}

TEST_CASE("norm is preserved over ten thousand steps") {
  const GridSpec grid = line256();
  GaugePotential A;
  A.background = [](const Vec2& x, double) {
    AlgebraField f = AlgebraField::Zero();
    f(0, 0) = 0.3 * std::sin(2.0 * pi * 2.0 * x.x() / 12.8);
    return f;
  };
  const WaveFunction psi0 =
      gaussian_packet(grid, Vec2(0.0, 0.0), 0.4, Vec2(0.8, 0.0));
  EvolutionConfig cfg;
  cfg.dt = 0.002;
  cfg.steps = 10000;
  cfg.record_every = 10000;
  cfg.potential = A;
  const auto snaps = evolve(psi0, cfg);
  REQUIRE(snaps.size() == 2);
  CHECK(std::abs(snaps.back().state.norm() / snaps.front().state.norm() - 1.0) <
        1e-8);
}

TEST_CASE("self-convergence is second order in the time step") {
  const GridSpec grid = plane128();
  const GaugePotential A = shear_background(-0.4);
  const WaveFunction psi0 =
      gaussian_packet(grid, Vec2(-2.0, -1.5), 0.9, Vec2(1.5, 1.0));
  const double T = 0.32;

  auto final_state = [&](SplitScheme scheme, int steps) {
    EvolutionConfig cfg;
    cfg.dt = T / steps;
    cfg.steps = steps;
    cfg.record_every = steps;
    cfg.potential = A;
    cfg.scheme = scheme;
    return evolve(psi0, cfg).back().state;
  };

  for (const SplitScheme scheme : {SplitScheme::Carrier, SplitScheme::Axial}) {
    CAPTURE(scheme == SplitScheme::Axial);
    const auto f16 = final_state(scheme, 16);
    const auto f32 = final_state(scheme, 32);
    const auto f64 = final_state(scheme, 64);
    const auto f128 = final_state(scheme, 128);
    const double d1 = (f16.amp - f32.amp).norm();
    const double d2 = (f32.amp - f64.amp).norm();
    const double d3 = (f64.amp - f128.amp).norm();
    CHECK(d1 / d2 > 3.4);
    CHECK(d1 / d2 < 4.6);
    CHECK(d2 / d3 > 3.4);
    CHECK(d2 / d3 < 4.6);
  }
}

TEST_CASE("axial evolution commutes with a quantized linear gauge change") {
  const GridSpec grid = plane128();
  const GaugePotential A = shear_background(-0.3);
  // Slope chosen so the multiplier is periodic on the box: the spectral shift
  // it causes lands exactly three wavenumber bins up.
  const double s = 2.0 * pi * 3.0 / grid.extent();
  GaugeTransformation u;
  u.lambda = [s](const Vec2& x) { return s * x.x(); };
  u.lambda_gradient = [s](const Vec2&) { return Vec2(s, 0.0); };

  const WaveFunction psi0 =
      gaussian_packet(grid, Vec2(-1.2, 0.8), 0.9, Vec2(1.0, 0.6));
  const WaveFunction psi0p = apply_gauge_to_wavefunction(psi0, u, A.basis);
  const GaugePotential Ap = apply_gauge_to_potential(A, u);

  EvolutionConfig cfg;
  cfg.dt = 0.02;
  cfg.steps = 80;
  cfg.record_every = 80;
  cfg.scheme = SplitScheme::Axial;
  cfg.potential = A;
  const WaveFunction end = evolve(psi0, cfg).back().state;
  cfg.potential = Ap;
  const WaveFunction endp = evolve(psi0p, cfg).back().state;

  const WaveFunction expected = apply_gauge_to_wavefunction(end, u, A.basis);
  CHECK((endp.amp - expected.amp).norm() / expected.amp.norm() < 1e-6);
}

TEST_CASE("configuration guards reject unusable setups") {
  SUBCASE("time step above the stability bound") {
    const WaveFunction psi = gaussian_packet(line256(), Vec2(0, 0), 0.3);
    EvolutionConfig cfg;
    cfg.dt = 0.003;  // spacing^2 * mass = 0.0025
    CHECK_THROWS_AS(evolve(psi, cfg), ValidationError);
  }
  SUBCASE("axial scheme needs two dimensions") {
    const WaveFunction psi = gaussian_packet(line256(), Vec2(0, 0), 0.3);
    EvolutionConfig cfg;
    cfg.dt = 0.002;
    cfg.scheme = SplitScheme::Axial;
    CHECK_THROWS_AS(evolve(psi, cfg), ValidationError);
  }
  SUBCASE("axial scheme rejects a potential with a transverse component") {
    const WaveFunction psi =
        gaussian_packet(plane128(), Vec2(-3.0, 0.0), 0.9);
    EvolutionConfig cfg;
    cfg.dt = 0.02;
    cfg.scheme = SplitScheme::Axial;
    cfg.potential = solenoid_potential(Vec2(0.013, 0.017), 0.8, 0.0);
    CHECK_THROWS_AS(evolve(psi, cfg), ValidationError);
  }
  SUBCASE("only scalar states evolve") {
    const WaveFunction psi =
        gaussian_packet(plane128(), Vec2(0.0, 0.0), 0.9, Vec2::Zero(), 0.0, 2);
    EvolutionConfig cfg;
    cfg.dt = 0.02;
    CHECK_THROWS_AS(evolve(psi, cfg), ValidationError);
  }
  SUBCASE("only abelian potentials evolve") {
    const WaveFunction psi = gaussian_packet(plane128(), Vec2(0.0, 0.0), 0.9);
    EvolutionConfig cfg;
    cfg.dt = 0.02;
    cfg.potential.basis = LieAlgebraBasis::su2(1.0);
    CHECK_THROWS_AS(evolve(psi, cfg), ValidationError);
  }
}

TEST_CASE("excluded-core collisions are detected") {
  const GridSpec grid = plane128();
  const GaugePotential A =
      solenoid_potential(Vec2(0.787, 0.013), 1.0, 0.4, 1.0);
  EvolutionConfig cfg;
  cfg.dt = 0.02;
  cfg.steps = 150;
  cfg.record_every = 150;
  cfg.potential = A;
  SUBCASE("a packet launched onto the core is rejected up front") {
    const WaveFunction psi =
        gaussian_packet(grid, Vec2(0.787, 0.813), 0.45);
    CHECK_THROWS_AS(evolve(psi, cfg), ValidationError);
  }
  SUBCASE("a packet drifting into the core stops the run") {
    const WaveFunction psi =
        gaussian_packet(grid, Vec2(-2.013, 0.013), 0.45, Vec2(2.0, 0.0));
    CHECK_THROWS_AS(evolve(psi, cfg), NumericError);
  }
}

TEST_CASE("two-packet scenario rejects ill-posed configurations") {
  SUBCASE("the potential must be a bare basis") {
    ABScenarioConfig cfg = standard_scenario(0.5);
    cfg.evolution.potential = solenoid_potential(Vec2(0, 0), 0.5, 0.0);
    CHECK_THROWS_AS(ab_scenario(cfg), ValidationError);
  }
  SUBCASE("curves must join the two launch points") {
    ABScenarioConfig cfg = standard_scenario(0.5);
    cfg.gamma_family = {segment_curve(Vec2(-3.013, 4.417), Vec2(0.0, 0.0), 4)};
    CHECK_THROWS_AS(ab_scenario(cfg), ValidationError);
  }
  SUBCASE("closed curves are not comparison templates") {
    ABScenarioConfig cfg = standard_scenario(0.5);
    cfg.gamma_family = {circle_curve(Vec2(-3.013, 0.017), 4.4, 64)};
    CHECK_THROWS_AS(ab_scenario(cfg), ValidationError);
  }
  SUBCASE("an empty comparison family is rejected") {
    ABScenarioConfig cfg = standard_scenario(0.5);
    cfg.gamma_family.clear();
    CHECK_THROWS_AS(ab_scenario(cfg), ValidationError);
  }
}

TEST_CASE("two-packet scenario with zero flux is inert") {
  const ABScenarioConfig cfg = standard_scenario(0.0);
  const ABScenarioResult res = ab_scenario(cfg);
  REQUIRE(res.samples.size() == 11);
  // Crossing bookkeeping is purely geometric, so it is active even here.
  REQUIRE(res.first_crossing_step.size() == 3);
  CHECK(res.first_crossing_step[0] == 76);
  CHECK(res.first_crossing_step[1] == 0);
  CHECK(res.first_crossing_step[2] == -1);
  for (const ABSample& s : res.samples) {
    REQUIRE(s.g.size() == 3);
    for (const Complex& g : s.g)
      CHECK(std::abs(g - Complex(0.5, 0.0)) < 1e-4);
  }
}

TEST_CASE("two-packet scenario with quarter-turn flux shifts the phase") {
  const double flux = 0.5 * pi;
  const ABScenarioConfig cfg = standard_scenario(flux);
  const ABScenarioResult res = ab_scenario(cfg);
  REQUIRE(res.samples.size() == 11);
  CHECK(res.charge == 1.0);
  CHECK(res.first_crossing_step[0] == 76);
  CHECK(res.first_crossing_step[1] == 0);
  CHECK(res.first_crossing_step[2] == -1);

  for (const ABSample& s : res.samples) {
    CHECK(s.crossed[0] == (s.step >= 76 ? 1 : 0));
    CHECK(s.crossed[1] == 1);
    CHECK(s.crossed[2] == 0);
  }

  // Straight rung: while the flux sits outside the swept loop the phase holds
  // one plateau; once inside it holds another, a step of exactly -q * flux.
  const Complex g_first = res.samples.front().g[0];
  const Complex g_last = res.samples.back().g[0];
  CHECK(std::abs(std::abs(g_first) - 0.5) < 5e-3);
  CHECK(std::abs(std::abs(g_last) - 0.5) < 5e-3);
  const double jump = std::arg(g_last) - std::arg(g_first);
  CHECK(std::abs(normalize_phase(jump + flux)) < 1e-2);

  // Opposite-side detours: their union is a full circle around the flux while
  // the packets straddle it, so mid-run the pair disagrees by -q * flux.
  for (const std::size_t i : {4u, 5u, 6u}) {
    const ABSample& s = res.samples[i];
    const double pair = std::arg(s.g[1]) - std::arg(s.g[2]);
    CHECK(std::abs(normalize_phase(pair + flux)) < 1e-3);
  }
}

// Transport-dressed copies of the free solutions solve the minimally coupled
// equation, so evolving the dressed pair and dressing the free-evolved pair
// must give interference terms with the same phase.
TEST_CASE("evolved interference matches the dressed construction") {
  const double flux = 0.5 * pi;
  const GridSpec grid = plane128();
  const double mass = 4.0, speed = 2.0, width = 0.78;
  const Vec2 base(-3.013, 0.017);
  const Vec2 lower(-3.013, 0.017 - 4.4);
  const Vec2 upper(-3.013, 0.017 + 4.4);
  const Vec2 carrier(mass * speed, 0.0);
  const GaugePotential A =
      solenoid_potential(Vec2(0.013, 0.017), flux, 0.0, 1.0);

  const WaveFunction bare_low = gaussian_packet(grid, lower, width, carrier);
  const WaveFunction bare_up = gaussian_packet(grid, upper, width, carrier);
  const auto start = build_ab_packets(bare_low, bare_up,
                                      polyline_curve({base, lower}),
                                      polyline_curve({base, upper}), A, base);

  EvolutionConfig evo;
  evo.dt = 0.02;
  evo.steps = 150;
  evo.mass = mass;
  evo.record_every = 45;
  evo.potential = A;
  const auto low_run = evolve(start.first, evo);
  const auto up_run = evolve(start.second, evo);

  EvolutionConfig free_cfg = evo;  // same stepping, no field
  free_cfg.potential = GaugePotential{};
  const auto low_free = evolve(bare_low, free_cfg);
  const auto up_free = evolve(bare_up, free_cfg);
  REQUIRE(low_run.size() == 5);  // steps 0, 45, 90, 135, 150

  NonlocalOperatorSpec spec;
  spec.curve = segment_curve(upper, lower, 8);
  spec.potential = A;
  const double r = 1.0 / std::sqrt(2.0);
  for (const std::size_t idx : {0u, 1u, 3u}) {
    const double t = low_run[idx].time;
    const Vec2 drift(speed * t, 0.0);
    const Curve route_low = t > 0.0
                                ? polyline_curve({base, lower, lower + drift})
                                : polyline_curve({base, lower});
    const Curve route_up = t > 0.0
                               ? polyline_curve({base, upper, upper + drift})
                               : polyline_curve({base, upper});
    const auto dressed =
        build_ab_packets(low_free[idx].state, up_free[idx].state, route_low,
                         route_up, A, base);
    const Complex g_static = g_gamma_expectation(
        spec, superpose(dressed.first, dressed.second, r, r));
    const Complex g_evolved = g_gamma_expectation(
        spec, superpose(low_run[idx].state, up_run[idx].state, r, r));
    CAPTURE(t);
    CHECK(std::abs(normalize_phase(std::arg(g_evolved) - std::arg(g_static))) <
          1e-3);
  }
}

#include "holoq/dynamics.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "holoq/errors.hpp"
#include "holoq/geometry.hpp"
#include "holoq/observables.hpp"

namespace holoq {
namespace {

constexpr double kCoreMassTol = 1e-6;
constexpr double kNormDriftTol = 1e-8;

// Cartesian field components at every grid point, sampled once at time zero.
struct FieldTables {
  bool active = false;
  std::vector<double> ax, ay, a2;
};

FieldTables sample_field(const GaugePotential& pot, const GridSpec& grid) {
  FieldTables tab;
  tab.active = !pot.flux_lines.empty() || !pot.exact_scalars.empty() ||
               static_cast<bool>(pot.background);
  if (!tab.active) return tab;
  const std::size_t n = grid.total_points();
  tab.ax.resize(n);
  tab.ay.assign(n, 0.0);
  tab.a2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AlgebraField f = pot.value(grid.coord(i), 0.0);
    tab.ax[i] = f(0, 0);
    if (grid.dim == 2) tab.ay[i] = f(0, 1);
    tab.a2[i] = tab.ax[i] * tab.ax[i] + tab.ay[i] * tab.ay[i];
  }
  return tab;
}

struct KTables {
  std::vector<double> kx, ky, k2;
};

KTables k_tables(const GridSpec& grid) {
  const std::size_t n = grid.total_points();
  KTables t;
  t.kx.resize(n);
  t.ky.assign(n, 0.0);
  t.k2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.kx[i] = grid.wavenumber(grid.axis_index(i, 0));
    if (grid.dim == 2) t.ky[i] = grid.wavenumber(grid.axis_index(i, 1));
    t.k2[i] = t.kx[i] * t.kx[i] + t.ky[i] * t.ky[i];
  }
  return t;
}

std::vector<std::size_t> excluded_points(const GaugePotential& pot,
                                         const GridSpec& grid) {
  std::vector<std::size_t> idx;
  if (pot.excluded_regions.empty()) return idx;
  const std::size_t n = grid.total_points();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 x = grid.coord(i);
    for (const Disc& d : pot.excluded_regions) {
      if ((x - d.center).norm() <= d.radius) {
        idx.push_back(i);
        break;
      }
    }
  }
  return idx;
}

double mass_fraction(const WaveFunction& w, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  double in = 0.0;
  for (std::size_t i : idx) in += std::norm(w.at(i));
  const double total = w.amp.squaredNorm();
  return total > 0.0 ? in / total : 0.0;
}

// One kinetic half step.  The phase leaves the spectral density untouched, so
// when asked to it also returns the mean canonical momentum, valid for the
// whole step.
Vec2 kinetic_half(WaveFunction& w, const KTables& kt, double tau, double mass,
                  bool measure) {
  detail::fft_components(w, -1);
  Vec2 pbar = Vec2::Zero();
  double weight = 0.0;
  const double c = tau / (2.0 * mass);
  const std::size_t n = static_cast<std::size_t>(w.amp.size());
  for (std::size_t i = 0; i < n; ++i) {
    w.amp[i] *= std::exp(Complex(0.0, -c * kt.k2[i]));
    if (measure) {
      const double w2 = std::norm(w.amp[i]);
      weight += w2;
      pbar.x() += w2 * kt.kx[i];
      pbar.y() += w2 * kt.ky[i];
    }
  }
  detail::fft_components(w, +1);
  if (measure && weight > 0.0) pbar /= weight;
  return pbar;
}

void potential_phase(WaveFunction& w, const FieldTables& tab, const Vec2& pbar,
                     double dt, double mass, double q) {
  const std::size_t n = static_cast<std::size_t>(w.amp.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double veff =
        -(q / mass) * (tab.ax[i] * pbar.x() + tab.ay[i] * pbar.y()) +
        (q * q / (2.0 * mass)) * tab.a2[i];
    w.amp[i] *= std::exp(Complex(0.0, -dt * veff));
  }
}

// Per-row A_x for a potential of the form (A_x(y), 0); rejects anything else.
std::vector<double> axial_rows(const FieldTables& tab, const GridSpec& grid) {
  const int n = grid.points_per_axis;
  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
  if (!tab.active) return rows;
  for (int iy = 0; iy < n; ++iy) {
    const std::size_t base = static_cast<std::size_t>(iy) * n;
    const double a0 = tab.ax[base];
    rows[static_cast<std::size_t>(iy)] = a0;
    for (int ix = 0; ix < n; ++ix) {
      const std::size_t i = base + static_cast<std::size_t>(ix);
      if (std::abs(tab.ay[i]) > 1e-12 || std::abs(tab.ax[i] - a0) > 1e-12)
        throw ValidationError(
            "the axial scheme needs a potential of the form (A_x(y), 0)");
    }
  }
  return rows;
}

void axial_y_half(WaveFunction& w, const KTables& kt, double tau, double mass) {
  detail::fft_axis(w, 1, -1);
  const double c = tau / (2.0 * mass);
  const std::size_t n = static_cast<std::size_t>(w.amp.size());
  for (std::size_t i = 0; i < n; ++i)
    w.amp[i] *= std::exp(Complex(0.0, -c * kt.ky[i] * kt.ky[i]));
  detail::fft_axis(w, 1, +1);
}

void axial_x_full(WaveFunction& w, const KTables& kt,
                  const std::vector<double>& arows, double dt, double mass,
                  double q) {
  detail::fft_axis(w, 0, -1);
  const double c = dt / (2.0 * mass);
  const std::size_t n = static_cast<std::size_t>(w.grid.points_per_axis);
  const std::size_t total = static_cast<std::size_t>(w.amp.size());
  for (std::size_t i = 0; i < total; ++i) {
    const double kxa = kt.kx[i] - q * arows[i / n];
    w.amp[i] *= std::exp(Complex(0.0, -c * kxa * kxa));
  }
  detail::fft_axis(w, 0, +1);
}

int loop_winding(const std::vector<Vec2>& poly, const Vec2& p) {
  double total = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    total += signed_angle(poly[i] - p, poly[(i + 1) % n] - p);
  }
  return static_cast<int>(std::llround(total / (2.0 * pi)));
}

// Closed loop formed by the launch segment, the two straight trajectories,
// and the translated comparison curve.  The trajectories are horizontal, so
// only the fixed launch points and the shifted curve matter.
std::vector<Vec2> crossing_polygon(const Curve& gamma, const Vec2& shift,
                                   const Vec2& lower, const Vec2& upper) {
  std::vector<Vec2> out;
  auto push = [&out](const Vec2& p) {
    if (out.empty() || (p - out.back()).norm() > 1e-12) out.push_back(p);
  };
  push(lower);
  push(upper);
  for (const Vec2& p : gamma.points) push(p + shift);
  if (out.size() > 1 && (out.front() - out.back()).norm() <= 1e-12)
    out.pop_back();
  return out;
}

}  // namespace

void EvolutionConfig::validate(const GridSpec& grid) const {
  grid.validate();
  if (!(dt > 0.0)) throw ValidationError("the time step must be positive");
  if (steps <= 0) throw ValidationError("the step count must be positive");
  if (!(mass > 0.0)) throw ValidationError("the mass must be positive");
  if (record_every <= 0) throw ValidationError("record_every must be positive");
  if (dt > grid.spacing * grid.spacing * mass * (1.0 + 1e-12))
    throw ValidationError("the time step exceeds spacing^2 * mass");
  if (scheme == SplitScheme::Axial && grid.dim != 2)
    throw ValidationError("the axial scheme needs a 2d grid");
}

std::vector<Snapshot> evolve(const WaveFunction& psi,
                             const EvolutionConfig& cfg) {
  cfg.validate(psi.grid);
  if (psi.internal_dim != 1)
    throw ValidationError("time evolution covers single-component states");
  if (!cfg.potential.abelian())
    throw ValidationError("time evolution covers U(1) potentials");
  const GridSpec& grid = psi.grid;
  const double q = cfg.potential.basis.coupling;
  const FieldTables tab = sample_field(cfg.potential, grid);
  const KTables kt = k_tables(grid);
  std::vector<double> arows;
  if (cfg.scheme == SplitScheme::Axial) arows = axial_rows(tab, grid);
  const std::vector<std::size_t> core = excluded_points(cfg.potential, grid);

  WaveFunction cur = psi;
  if (mass_fraction(cur, core) > kCoreMassTol)
    throw ValidationError(
        "the initial state loads an excluded region beyond 1e-6 of its mass");
  const double norm0 = cur.amp.norm();
  if (!(norm0 > 0.0)) throw ValidationError("cannot evolve the zero state");

  std::vector<Snapshot> out;
  auto record = [&](int step) {
    out.push_back(Snapshot{step, step * cfg.dt, cur});
  };
  record(0);
  for (int s = 1; s <= cfg.steps; ++s) {
    if (cfg.scheme == SplitScheme::Axial) {
      axial_y_half(cur, kt, 0.5 * cfg.dt, cfg.mass);
      axial_x_full(cur, kt, arows, cfg.dt, cfg.mass, q);
      axial_y_half(cur, kt, 0.5 * cfg.dt, cfg.mass);
    } else {
      const Vec2 pbar = kinetic_half(cur, kt, 0.5 * cfg.dt, cfg.mass, tab.active);
      if (tab.active) potential_phase(cur, tab, pbar, cfg.dt, cfg.mass, q);
      kinetic_half(cur, kt, 0.5 * cfg.dt, cfg.mass, false);
    }
    if (mass_fraction(cur, core) > kCoreMassTol)
      throw NumericError("the state collided with an excluded region");
    if (s % cfg.record_every == 0 || s == cfg.steps) record(s);
  }
  if (std::abs(cur.amp.norm() / norm0 - 1.0) > kNormDriftTol)
    throw NumericError("evolution norm drifted beyond 1e-8");
  return out;
}

ABScenarioResult ab_scenario(const ABScenarioConfig& cfg) {
  cfg.grid.validate();
  if (cfg.grid.dim != 2)
    throw ValidationError("the two-packet scenario needs a 2d grid");
  if (!(cfg.packet_speed > 0.0))
    throw ValidationError("the packet speed must be positive");
  if (!(cfg.impact_offset > 0.0))
    throw ValidationError("the impact offset must be positive");
  if (!(cfg.width > 0.0))
    throw ValidationError("the packet width must be positive");
  if (!(cfg.overlap_tol > 0.0))
    throw ValidationError("overlap_tol must be positive");
  if (cfg.gamma_family.empty())
    throw ValidationError("at least one comparison curve is required");
  const GaugePotential& base = cfg.evolution.potential;
  if (!base.abelian()) throw ValidationError("the scenario is U(1)-only");
  if (!base.flux_lines.empty() || !base.exact_scalars.empty() ||
      static_cast<bool>(base.background) || !base.excluded_regions.empty())
    throw ValidationError(
        "pass a bare potential; the scenario builds its own flux line");
  const double q = base.basis.coupling;

  const Vec2 lower(cfg.start_x, cfg.flux_center.y() - cfg.impact_offset);
  const Vec2 upper(cfg.start_x, cfg.flux_center.y() + cfg.impact_offset);
  for (const Curve& g : cfg.gamma_family) {
    g.validate();
    if (g.closed) throw ValidationError("comparison curves must be open");
    if ((g.start() - upper).norm() > 1e-9 || (g.end() - lower).norm() > 1e-9)
      throw ValidationError(
          "comparison curves must run from the upper launch point to the "
          "lower one");
  }

  EvolutionConfig evo = cfg.evolution;
  evo.potential = solenoid_potential(cfg.flux_center, cfg.flux, 0.0, q);
  const Vec2 carrier(evo.mass * cfg.packet_speed, 0.0);
  const WaveFunction low0 = gaussian_packet(cfg.grid, lower, cfg.width, carrier);
  const WaveFunction up0 = gaussian_packet(cfg.grid, upper, cfg.width, carrier);
  const std::vector<Snapshot> low = evolve(low0, evo);
  const std::vector<Snapshot> up = evolve(up0, evo);

  ABScenarioResult res;
  res.charge = q;
  const std::size_t ng = cfg.gamma_family.size();
  res.first_crossing_step.assign(ng, -1);
  for (int s = 0; s <= evo.steps; ++s) {
    const Vec2 shift(cfg.packet_speed * s * evo.dt, 0.0);
    for (std::size_t j = 0; j < ng; ++j) {
      if (res.first_crossing_step[j] >= 0) continue;
      const auto poly =
          crossing_polygon(cfg.gamma_family[j], shift, lower, upper);
      if (loop_winding(poly, cfg.flux_center) != 0)
        res.first_crossing_step[j] = s;
    }
  }

  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < low.size(); ++i) {
    const Snapshot& sl = low[i];
    const Snapshot& su = up[i];
    const double olap = std::abs(inner_product(sl.state, su.state)) /
                        (sl.state.norm() * su.state.norm());
    if (olap > cfg.overlap_tol) {
      if (sl.step == 0)
        throw ValidationError(
            "the launch positions are not disjoint at the requested tolerance");
      throw NumericError("the packets ceased to be disjoint during the run");
    }
    const WaveFunction psi = superpose(sl.state, su.state, r, r);
    const Vec2 shift(cfg.packet_speed * sl.time, 0.0);
    ABSample sample;
    sample.step = sl.step;
    sample.time = sl.time;
    sample.g.reserve(ng);
    sample.crossed.reserve(ng);
    for (std::size_t j = 0; j < ng; ++j) {
      NonlocalOperatorSpec spec;
      spec.curve = translated(cfg.gamma_family[j], shift);
      spec.potential = evo.potential;
      sample.g.push_back(g_gamma_expectation(spec, psi));
      sample.crossed.push_back(res.first_crossing_step[j] >= 0 &&
                                       sl.step >= res.first_crossing_step[j]
                                   ? 1
                                   : 0);
    }
    res.samples.push_back(std::move(sample));
  }
  return res;
}

}  // namespace holoq

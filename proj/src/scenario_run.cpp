#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "holoq/dynamics.hpp"
#include "holoq/errors.hpp"
#include "holoq/observables.hpp"
#include "holoq/scenario.hpp"

namespace holoq {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_summary(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_uint(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
  return buf;
}

// splitmix64 finalizer: decorrelates per-point seeds derived from the base.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t point) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (point + 1);
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : path_(path) {
    out_.open(path, std::ios::binary);
    if (!out_) throw IoError("cannot open output file \"" + path + "\"");
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("failed writing output file \"" + path_ + "\"");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

Complex display(Complex z, const Scenario& s) {
  return s.conjugate_display_phases ? std::conj(z) : z;
}

double phase_of(Complex z) { return normalize_phase(std::arg(z)); }

// Re, Im, modulus, phase cells of a displayed value.
void push_value_cells(std::vector<std::string>& cells, Complex shown) {
  cells.push_back(fmt(shown.real()));
  cells.push_back(fmt(shown.imag()));
  cells.push_back(fmt(std::abs(shown)));
  cells.push_back(fmt(phase_of(shown)));
}

WaveFunction make_packet(const GridSpec& grid, const PacketSpec& p,
                         int internal_dim) {
  return gaussian_packet(grid, p.center, p.width, p.momentum, p.phase,
                         internal_dim, p.spinor);
}

std::string output_path(const Scenario& s, const std::string& override_path) {
  return override_path.empty() ? s.output.path : override_path;
}

RunReport run_double_slit(const Scenario& s, const std::string& path) {
  const double mid = s.grid.origin.x() + 0.5 * s.grid.extent();
  const Vec2 c1(mid - 0.5 * s.slit.separation, 0.0);
  const Vec2 c2(mid + 0.5 * s.slit.separation, 0.0);
  const GaugePotential free_field;
  const NonlocalOperatorSpec op{segment_curve(c1, c2), free_field};

  CsvWriter csv(path);
  csv.row({"relative_phase", "re", "im", "modulus", "phase"});
  RunReport report;
  report.csv_path = path;
  for (const double alpha : s.sweep.numbers) {
    const WaveFunction p1 =
        gaussian_packet(s.grid, c1, s.slit.width, Vec2::Zero(), alpha);
    const WaveFunction p2 = gaussian_packet(s.grid, c2, s.slit.width);
    const WaveFunction state = superpose(p1, p2, kInvSqrt2, kInvSqrt2);
    const Complex shown = display(g_gamma_expectation(op, state), s);
    std::vector<std::string> cells{fmt(alpha)};
    push_value_cells(cells, shown);
    csv.row(cells);
    ++report.rows;
    report.summary.emplace_back(
        "phase[relative_phase=" + fmt_summary(alpha) + "]",
        fmt_summary(phase_of(shown)));
    report.summary.emplace_back(
        "modulus[relative_phase=" + fmt_summary(alpha) + "]",
        fmt_summary(std::abs(shown)));
  }
  csv.finish();
  return report;
}

// Shared by ab_static and ab_nonabelian: dress the pair once, then sweep the
// comparison curve.
RunReport run_static_interference(const Scenario& s, const std::string& path) {
  const bool spinor = s.internal_dim() == 2;
  const GaugePotential A = s.potential.build(spinor);
  const WaveFunction psi10 = make_packet(s.grid, s.packets[0], spinor ? 2 : 1);
  const WaveFunction psi20 = make_packet(s.grid, s.packets[1], spinor ? 2 : 1);
  const Curve gamma1 = s.curve_by_label(s.dressing.first).build();
  const Curve gamma2 = s.curve_by_label(s.dressing.second).build();
  const auto dressed =
      build_ab_packets(psi10, psi20, gamma1, gamma2, A, gamma1.start());
  const WaveFunction state =
      superpose(dressed.first, dressed.second, kInvSqrt2, kInvSqrt2);

  CsvWriter csv(path);
  csv.row({"curve", "re", "im", "modulus", "phase"});
  RunReport report;
  report.csv_path = path;
  std::vector<double> phases;
  for (const std::string& label : s.sweep.labels) {
    const NonlocalOperatorSpec op{s.curve_by_label(label).build(), A};
    const Complex shown = display(g_gamma_expectation(op, state), s);
    std::vector<std::string> cells{label};
    push_value_cells(cells, shown);
    csv.row(cells);
    ++report.rows;
    phases.push_back(phase_of(shown));
    report.summary.emplace_back("phase[" + label + "]",
                                fmt_summary(phases.back()));
    report.summary.emplace_back("modulus[" + label + "]",
                                fmt_summary(std::abs(shown)));
  }
  if (phases.size() == 2)
    report.summary.emplace_back(
        "phase_difference", fmt_summary(normalize_phase(phases[1] - phases[0])));
  csv.finish();
  return report;
}

RunReport run_josephson(const Scenario& s, const std::string& path) {
  const WaveFunction psi10 = make_packet(s.grid, s.packets[0], 1);
  const WaveFunction psi20 = make_packet(s.grid, s.packets[1], 1);
  const Curve gamma1 = s.curve_by_label(s.dressing.first).build();
  const Curve gamma2 = s.curve_by_label(s.dressing.second).build();
  const Curve choice_a = s.curve_by_label(s.choices[0]).build();
  const Curve choice_b = s.curve_by_label(s.choices[1]).build();

  CsvWriter csv(path);
  csv.row({"flux", "re", "im", "modulus", "phase"});
  RunReport report;
  report.csv_path = path;
  for (const double flux : s.sweep.numbers) {
    PotentialSpec p = s.potential;
    p.flux = flux;
    const GaugePotential A = p.build(false);
    const auto dressed =
        build_ab_packets(psi10, psi20, gamma1, gamma2, A, gamma1.start());
    const WaveFunction state =
        superpose(dressed.first, dressed.second, kInvSqrt2, kInvSqrt2);
    const Complex ea =
        g_gamma_expectation(NonlocalOperatorSpec{choice_a, A}, state);
    const Complex eb =
        g_gamma_expectation(NonlocalOperatorSpec{choice_b, A}, state);
    if (std::abs(ea) < 1e-14)
      throw NumericError(
          "the reference interference term vanished; the two-path ratio is "
          "undefined");
    const Complex shown = display(eb / ea, s);
    std::vector<std::string> cells{fmt(flux)};
    push_value_cells(cells, shown);
    csv.row(cells);
    ++report.rows;
    report.summary.emplace_back("phase_ratio[flux=" + fmt_summary(flux) + "]",
                                fmt_summary(phase_of(shown)));
  }
  report.summary.emplace_back("charge", fmt_summary(s.potential.charge));
  csv.finish();
  return report;
}

RunReport run_cosmic_string(const Scenario& s, const std::string& path) {
  const WaveFunction psi10 = make_packet(s.grid, s.packets[0], 1);
  const WaveFunction psi20 = make_packet(s.grid, s.packets[1], 1);
  const Curve gamma1 = s.curve_by_label(s.dressing.first).build();
  const Curve gamma2 = s.curve_by_label(s.dressing.second).build();
  const Curve connector = s.curve_by_label(s.dressing.connector).build();

  CsvWriter csv(path);
  csv.row({"deficit_angle", "re", "im", "modulus", "phase"});
  RunReport report;
  report.csv_path = path;
  std::vector<double> moduli;
  for (const double deficit : s.sweep.numbers) {
    ConeGeometry geom = s.geometry;
    geom.deficit_angle = deficit;
    const Complex shown = display(
        gravitational_ab_expectation(psi10, psi20, gamma1, gamma2, connector,
                                     geom),
        s);
    std::vector<std::string> cells{fmt(deficit)};
    push_value_cells(cells, shown);
    csv.row(cells);
    ++report.rows;
    moduli.push_back(std::abs(shown));
    report.summary.emplace_back(
        "modulus[deficit_angle=" + fmt_summary(deficit) + "]",
        fmt_summary(moduli.back()));
  }
  if (moduli.size() > 1 && moduli.front() > 0.0)
    report.summary.emplace_back(
        "modulus_ratio_last_to_first",
        fmt_summary(moduli.back() / moduli.front()));
  csv.finish();
  return report;
}

RunReport run_dynamic(const Scenario& s, const std::string& path) {
  ABScenarioConfig cfg;
  cfg.flux = s.dynamic.flux;
  cfg.packet_speed = s.dynamic.packet_speed;
  cfg.impact_offset = s.dynamic.impact_offset;
  cfg.start_x = s.dynamic.start_x;
  cfg.width = s.dynamic.width;
  cfg.flux_center = s.dynamic.flux_center;
  cfg.overlap_tol = s.dynamic.overlap_tol;
  cfg.grid = s.grid;
  for (const CurveEntry& c : s.curves) cfg.gamma_family.push_back(c.build());
  cfg.evolution.dt = s.time.dt;
  cfg.evolution.steps = s.time.steps;
  cfg.evolution.mass = s.time.mass;
  cfg.evolution.record_every = s.time.record_every;
  cfg.evolution.scheme =
      s.time.scheme == "axial" ? SplitScheme::Axial : SplitScheme::Carrier;
  cfg.evolution.potential.basis = LieAlgebraBasis::u1(s.dynamic.charge);

  const ABScenarioResult result = ab_scenario(cfg);

  CsvWriter csv(path);
  std::vector<std::string> header{"step", "time"};
  for (const CurveEntry& c : s.curves) {
    header.push_back("re_" + c.label);
    header.push_back("im_" + c.label);
    header.push_back("phase_" + c.label);
  }
  for (const CurveEntry& c : s.curves) header.push_back("crossed_" + c.label);
  csv.row(header);

  RunReport report;
  report.csv_path = path;
  for (const ABSample& sample : result.samples) {
    std::vector<std::string> cells{std::to_string(sample.step),
                                   fmt(sample.time)};
    for (std::size_t k = 0; k < sample.g.size(); ++k) {
      const Complex shown = display(sample.g[k], s);
      cells.push_back(fmt(shown.real()));
      cells.push_back(fmt(shown.imag()));
      cells.push_back(fmt(phase_of(shown)));
    }
    for (const int flag : sample.crossed)
      cells.push_back(std::to_string(flag));
    csv.row(cells);
    ++report.rows;
  }

  for (std::size_t k = 0; k < s.curves.size(); ++k) {
    const std::string& label = s.curves[k].label;
    report.summary.emplace_back(
        "first_crossing_step[" + label + "]",
        std::to_string(result.first_crossing_step[k]));
    const Complex first = display(result.samples.front().g[k], s);
    const Complex last = display(result.samples.back().g[k], s);
    report.summary.emplace_back(
        "phase_jump[" + label + "]",
        fmt_summary(normalize_phase(phase_of(last) - phase_of(first))));
  }
  report.summary.emplace_back("charge", fmt_summary(result.charge));
  csv.finish();
  return report;
}

RunReport run_gauge_suite(const Scenario& s, std::uint64_t seed,
                          const std::string& path) {
  const bool spinor = s.internal_dim() == 2;
  const GaugeGroup group = spinor ? GaugeGroup::SU2 : GaugeGroup::U1;
  const GaugePotential A = s.potential.build(spinor);
  const WaveFunction psi = make_packet(s.grid, s.packets[0], spinor ? 2 : 1);
  std::vector<Curve> curves;
  for (const CurveEntry& c : s.curves) curves.push_back(c.build());

  CsvWriter csv(path);
  csv.row({"trial", "seed", "re", "im", "modulus", "phase",
           "max_abs_deviation"});
  RunReport report;
  report.csv_path = path;
  double worst = 0.0;
  for (const double trial_value : s.sweep.numbers) {
    const auto trial = static_cast<std::uint64_t>(trial_value);
    const std::uint64_t trial_seed = mix_seed(seed, trial);
    const GaugeTransformation g = random_smooth_gauge(
        trial_seed, group, s.suite.band_limit, s.suite.amplitude, s.grid);
    const GaugePotential transformed_A = apply_gauge_to_potential(A, g);
    const WaveFunction transformed_psi =
        apply_gauge_to_wavefunction(psi, g, A.basis);

    Complex first_pre(0.0, 0.0);
    double deviation = 0.0;
    for (std::size_t k = 0; k < curves.size(); ++k) {
      const Complex pre =
          g_gamma_expectation(NonlocalOperatorSpec{curves[k], A}, psi);
      const Complex post = g_gamma_expectation(
          NonlocalOperatorSpec{curves[k], transformed_A}, transformed_psi);
      deviation = std::max(deviation, std::abs(pre - post));
      if (k == 0) first_pre = pre;
    }
    worst = std::max(worst, deviation);

    std::vector<std::string> cells{fmt_uint(trial), fmt_uint(trial_seed)};
    push_value_cells(cells, display(first_pre, s));
    cells.push_back(fmt(deviation));
    csv.row(cells);
    ++report.rows;
  }
  report.summary.emplace_back("trials", std::to_string(s.sweep.numbers.size()));
  report.summary.emplace_back("max_gauge_deviation", fmt_summary(worst));
  csv.finish();
  return report;
}

}  // namespace

RunReport run_scenario(const Scenario& s, std::uint64_t seed,
                       const std::string& output_override) {
  const std::string path = output_path(s, output_override);
  switch (s.kind) {
    case ScenarioKind::DoubleSlit:
      return run_double_slit(s, path);
    case ScenarioKind::AbStatic:
    case ScenarioKind::AbNonabelian:
      return run_static_interference(s, path);
    case ScenarioKind::JosephsonTwoPath:
      return run_josephson(s, path);
    case ScenarioKind::CosmicString:
      return run_cosmic_string(s, path);
    case ScenarioKind::AbDynamic:
      return run_dynamic(s, path);
    case ScenarioKind::GaugeInvarianceSuite:
      return run_gauge_suite(s, seed, path);
  }
  throw ValidationError("unhandled scenario kind");
}

}  // namespace holoq

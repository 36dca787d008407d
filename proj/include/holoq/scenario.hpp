#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "holoq/gauge.hpp"
#include "holoq/gravity.hpp"
#include "holoq/grid.hpp"
#include "holoq/transport.hpp"

namespace holoq {

enum class ScenarioKind {
  DoubleSlit,
  AbStatic,
  AbDynamic,
  AbNonabelian,
  JosephsonTwoPath,
  CosmicString,
  GaugeInvarianceSuite,
};

const char* scenario_kind_name(ScenarioKind k);

struct PacketSpec {
  Vec2 center = Vec2::Zero();
  double width = 1.0;
  Vec2 momentum = Vec2::Zero();
  double phase = 0.0;
  Eigen::Vector2cd spinor = Eigen::Vector2cd(1.0, 0.0);
  bool spinor_given = false;  // only legal in spinor-valued scenarios
};

// Curve description exactly as configured; the generator form survives the
// normalized dump so documents round-trip without flattening to point lists.
struct CurveEntry {
  enum class Form { Points, Circle, Segment };
  Form form = Form::Points;
  std::string label;
  // points form
  std::vector<Vec2> points;
  bool closed = false;
  // circle form
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
  int winding = 1;
  int samples_per_turn = 128;
  // segment form
  Vec2 from = Vec2::Zero();
  Vec2 to = Vec2::Zero();
  int pieces = 1;

  Curve build() const;
};

struct PotentialSpec {
  std::string kind = "none";  // none | solenoid | flux_tube
  Vec2 center = Vec2::Zero();
  double flux = 0.0;         // solenoid loop integral
  double core_radius = 0.0;
  double charge = 1.0;       // Abelian coupling
  Eigen::Vector3d flux_direction = Eigen::Vector3d(0.0, 0.0, 1.0);
  double flux_magnitude = 0.0;
  double coupling = 1.0;     // su(2) coupling

  // "none" still needs to know which group the scenario couples to.
  GaugePotential build(bool spinor_context) const;
};

struct TimeSpec {
  double dt = 0.01;
  int steps = 100;
  double mass = 1.0;
  int record_every = 1;
  std::string scheme = "carrier";  // carrier | axial
};

// Launch parameters of the flown two-packet interference run.
struct DynamicSpec {
  double flux = 0.0;
  double charge = 1.0;
  double packet_speed = 1.0;
  double impact_offset = 3.0;
  double start_x = -3.0;
  double width = 0.8;
  Vec2 flux_center = Vec2::Zero();
  double overlap_tol = 1e-4;
};

struct SuiteSpec {
  std::string group = "u1";  // u1 | su2
  int band_limit = 2;
  double amplitude = 0.35;
  double coupling = 1.0;
};

// Labels of the transport paths that dress the packet pair; `connector` names
// the comparison curve from the second packet's site to the first's where a
// single fixed curve is part of the setup rather than the sweep.
struct DressingSpec {
  std::string first;
  std::string second;
  std::string connector;
};

struct DoubleSlitSpec {
  double separation = 8.0;
  double width = 1.0;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> numbers;      // numeric sweeps
  std::vector<std::string> labels;  // curve-label sweeps
};

struct OutputSpec {
  std::string path;  // defaults to "<kind>.csv"
  std::string format = "csv";
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::DoubleSlit;
  GridSpec grid;
  std::vector<PacketSpec> packets;
  std::vector<CurveEntry> curves;
  PotentialSpec potential;
  ConeGeometry geometry;           // cosmic_string
  DoubleSlitSpec slit;             // double_slit
  DynamicSpec dynamic;             // ab_dynamic
  TimeSpec time;                   // ab_dynamic
  SuiteSpec suite;                 // gauge_invariance_suite
  DressingSpec dressing;           // interference kinds
  std::vector<std::string> choices;  // josephson_two_path: the two curve labels
  SweepSpec sweep;
  OutputSpec output;
  // Display convention only: emitted complex observables are conjugated, so
  // reported Abelian phases flip sign. The computation is untouched.
  bool conjugate_display_phases = false;

  const CurveEntry& curve_by_label(const std::string& label) const;
  int internal_dim() const;
};

// Strict parse: unknown keys are errors, defaults are filled in, curve labels
// are resolved, and the sweep parameter is checked against the scenario kind.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Canonical re-serialization with every default made explicit; parsing the
// dump reproduces the scenario exactly.
std::string normalized_dump(const Scenario& s);
bool scenario_equal(const Scenario& a, const Scenario& b);

struct RunReport {
  std::string csv_path;
  std::size_t rows = 0;
  // Kind-specific key figures in emission order.
  std::vector<std::pair<std::string, std::string>> summary;
};

RunReport run_scenario(const Scenario& s, std::uint64_t seed = 0,
                       const std::string& output_override = {});

}  // namespace holoq

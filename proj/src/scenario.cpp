#include "holoq/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "holoq/errors.hpp"

namespace holoq {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(),
                    [&](const char* k) { return it.key() == k; });
    if (!known)
      fail(path + "." + it.key(), "unknown key \"" + it.key() + "\"");
  }
}

const json* member(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_member(const json& obj, const char* key,
                           const std::string& path) {
  const json* m = member(obj, key);
  if (!m) fail(path, std::string("missing key \"") + key + "\"");
  return *m;
}

const json& as_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  return v;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "expected a finite number");
  return d;
}

long long as_integer(const json& v, const std::string& path) {
  if (v.is_number_integer() || v.is_number_unsigned())
    return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && std::nearbyint(d) == d)
      return static_cast<long long>(d);
  }
  fail(path, "expected an integer");
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Vec2 as_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty() || v.size() > 2)
    fail(path, "expected a coordinate array [x] or [x, y]");
  Vec2 out = Vec2::Zero();
  out.x() = as_number(v[0], path + "[0]");
  if (v.size() == 2) out.y() = as_number(v[1], path + "[1]");
  return out;
}

Eigen::Vector3d as_triple(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3)
    fail(path, "expected an array of three numbers");
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i)
    out[i] = as_number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Eigen::Vector2cd as_spinor(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2)
    fail(path, "expected a two-component spinor [[re, im], [re, im]]");
  Eigen::Vector2cd out;
  for (int i = 0; i < 2; ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2)
      fail(p, "expected a complex pair [re, im]");
    out[i] = Complex(as_number(v[i][0], p + "[0]"),
                     as_number(v[i][1], p + "[1]"));
  }
  return out;
}

ScenarioKind kind_from_name(const std::string& name, const std::string& path) {
  for (const ScenarioKind k :
       {ScenarioKind::DoubleSlit, ScenarioKind::AbStatic,
        ScenarioKind::AbDynamic, ScenarioKind::AbNonabelian,
        ScenarioKind::JosephsonTwoPath, ScenarioKind::CosmicString,
        ScenarioKind::GaugeInvarianceSuite}) {
    if (name == scenario_kind_name(k)) return k;
  }
  fail(path, "unknown scenario kind \"" + name + "\"");
}

void parse_grid(const json& j, const std::string& path, GridSpec& g,
                bool& origin_given) {
  check_keys(j, path, {"dimension", "size", "spacing", "origin"});
  if (const json* m = member(j, "dimension"))
    g.dim = static_cast<int>(as_integer(*m, path + ".dimension"));
  if (const json* m = member(j, "size"))
    g.points_per_axis = static_cast<int>(as_integer(*m, path + ".size"));
  if (const json* m = member(j, "spacing"))
    g.spacing = as_number(*m, path + ".spacing");
  if (const json* m = member(j, "origin")) {
    g.origin = as_point(*m, path + ".origin");
    origin_given = true;
  }
}

void parse_output(const json& j, const std::string& path, OutputSpec& o) {
  check_keys(j, path, {"path", "format"});
  if (const json* m = member(j, "path")) o.path = as_string(*m, path + ".path");
  if (const json* m = member(j, "format"))
    o.format = as_string(*m, path + ".format");
}

PacketSpec parse_packet(const json& j, const std::string& path) {
  const json& obj = as_object(j, path);
  check_keys(obj, path, {"center", "width", "momentum", "phase", "spinor"});
  PacketSpec p;
  p.center = as_point(require_member(obj, "center", path), path + ".center");
  if (const json* m = member(obj, "width"))
    p.width = as_number(*m, path + ".width");
  if (const json* m = member(obj, "momentum"))
    p.momentum = as_point(*m, path + ".momentum");
  if (const json* m = member(obj, "phase"))
    p.phase = as_number(*m, path + ".phase");
  if (const json* m = member(obj, "spinor")) {
    p.spinor = as_spinor(*m, path + ".spinor");
    p.spinor_given = true;
  }
  return p;
}

CurveEntry parse_curve(const json& j, const std::string& path) {
  const json& obj = as_object(j, path);
  CurveEntry c;
  c.label = as_string(require_member(obj, "label", path), path + ".label");
  const bool has_points = member(obj, "points") != nullptr;
  const bool has_circle = member(obj, "circle") != nullptr;
  const bool has_segment = member(obj, "segment") != nullptr;
  if (has_points + has_circle + has_segment != 1)
    fail(path, "expected exactly one of \"points\", \"circle\", \"segment\"");
  if (has_points) {
    check_keys(obj, path, {"label", "points", "closed"});
    c.form = CurveEntry::Form::Points;
    const json& pts = *member(obj, "points");
    if (!pts.is_array() || pts.size() < 2)
      fail(path + ".points", "expected an array of at least two [x, y] pairs");
    for (std::size_t i = 0; i < pts.size(); ++i)
      c.points.push_back(
          as_point(pts[i], path + ".points[" + std::to_string(i) + "]"));
    if (const json* m = member(obj, "closed"))
      c.closed = as_bool(*m, path + ".closed");
  } else if (has_circle) {
    check_keys(obj, path, {"label", "circle"});
    c.form = CurveEntry::Form::Circle;
    const std::string p = path + ".circle";
    const json& g = as_object(*member(obj, "circle"), p);
    check_keys(g, p, {"center", "radius", "winding", "samples_per_turn"});
    c.center = as_point(require_member(g, "center", p), p + ".center");
    c.radius = as_number(require_member(g, "radius", p), p + ".radius");
    if (const json* m = member(g, "winding"))
      c.winding = static_cast<int>(as_integer(*m, p + ".winding"));
    if (const json* m = member(g, "samples_per_turn"))
      c.samples_per_turn =
          static_cast<int>(as_integer(*m, p + ".samples_per_turn"));
  } else {
    check_keys(obj, path, {"label", "segment"});
    c.form = CurveEntry::Form::Segment;
    const std::string p = path + ".segment";
    const json& g = as_object(*member(obj, "segment"), p);
    check_keys(g, p, {"from", "to", "pieces"});
    c.from = as_point(require_member(g, "from", p), p + ".from");
    c.to = as_point(require_member(g, "to", p), p + ".to");
    if (const json* m = member(g, "pieces"))
      c.pieces = static_cast<int>(as_integer(*m, p + ".pieces"));
  }
  return c;
}

void parse_potential(const json& j, const std::string& path, PotentialSpec& p) {
  const json& obj = as_object(j, path);
  if (const json* m = member(obj, "kind"))
    p.kind = as_string(*m, path + ".kind");
  if (p.kind == "none") {
    check_keys(obj, path, {"kind", "charge", "coupling"});
  } else if (p.kind == "solenoid") {
    check_keys(obj, path, {"kind", "center", "flux", "core_radius", "charge"});
  } else if (p.kind == "flux_tube") {
    check_keys(obj, path, {"kind", "center", "flux_direction",
                           "flux_magnitude", "core_radius", "coupling"});
  } else {
    fail(path + ".kind", "unknown potential kind \"" + p.kind +
                             "\" (expected none, solenoid, or flux_tube)");
  }
  if (const json* m = member(obj, "center"))
    p.center = as_point(*m, path + ".center");
  if (const json* m = member(obj, "flux"))
    p.flux = as_number(*m, path + ".flux");
  if (const json* m = member(obj, "core_radius"))
    p.core_radius = as_number(*m, path + ".core_radius");
  if (const json* m = member(obj, "charge"))
    p.charge = as_number(*m, path + ".charge");
  if (const json* m = member(obj, "flux_direction"))
    p.flux_direction = as_triple(*m, path + ".flux_direction");
  if (const json* m = member(obj, "flux_magnitude"))
    p.flux_magnitude = as_number(*m, path + ".flux_magnitude");
  if (const json* m = member(obj, "coupling"))
    p.coupling = as_number(*m, path + ".coupling");
}

void parse_time(const json& j, const std::string& path, TimeSpec& t) {
  const json& obj = as_object(j, path);
  check_keys(obj, path, {"dt", "steps", "mass", "record_every", "scheme"});
  if (const json* m = member(obj, "dt")) t.dt = as_number(*m, path + ".dt");
  if (const json* m = member(obj, "steps"))
    t.steps = static_cast<int>(as_integer(*m, path + ".steps"));
  if (const json* m = member(obj, "mass"))
    t.mass = as_number(*m, path + ".mass");
  if (const json* m = member(obj, "record_every"))
    t.record_every = static_cast<int>(as_integer(*m, path + ".record_every"));
  if (const json* m = member(obj, "scheme")) {
    t.scheme = as_string(*m, path + ".scheme");
    if (t.scheme != "carrier" && t.scheme != "axial")
      fail(path + ".scheme", "expected \"carrier\" or \"axial\"");
  }
}

void parse_suite(const json& j, const std::string& path, SuiteSpec& s) {
  const json& obj = as_object(j, path);
  check_keys(obj, path, {"group", "band_limit", "amplitude", "coupling"});
  if (const json* m = member(obj, "group")) {
    s.group = as_string(*m, path + ".group");
    if (s.group != "u1" && s.group != "su2")
      fail(path + ".group", "expected \"u1\" or \"su2\"");
  }
  if (const json* m = member(obj, "band_limit"))
    s.band_limit = static_cast<int>(as_integer(*m, path + ".band_limit"));
  if (const json* m = member(obj, "amplitude"))
    s.amplitude = as_number(*m, path + ".amplitude");
  if (const json* m = member(obj, "coupling"))
    s.coupling = as_number(*m, path + ".coupling");
}

void parse_geometry(const json& j, const std::string& path, ConeGeometry& g) {
  const json& obj = as_object(j, path);
  check_keys(obj, path, {"apex", "deficit_angle", "core_radius"});
  if (const json* m = member(obj, "apex"))
    g.apex = as_point(*m, path + ".apex");
  if (const json* m = member(obj, "deficit_angle"))
    g.deficit_angle = as_number(*m, path + ".deficit_angle");
  if (const json* m = member(obj, "core_radius"))
    g.core_radius = as_number(*m, path + ".core_radius");
}

void parse_dressing(const json& j, const std::string& path, DressingSpec& d,
                    bool with_connector) {
  const json& obj = as_object(j, path);
  if (with_connector) {
    check_keys(obj, path, {"first", "second", "connector"});
    d.connector = as_string(require_member(obj, "connector", path),
                            path + ".connector");
  } else {
    check_keys(obj, path, {"first", "second"});
  }
  d.first = as_string(require_member(obj, "first", path), path + ".first");
  d.second = as_string(require_member(obj, "second", path), path + ".second");
}

void parse_sweep(const json& j, const std::string& path, SweepSpec& sw) {
  const json& obj = as_object(j, path);
  check_keys(obj, path, {"parameter", "values"});
  sw.parameter =
      as_string(require_member(obj, "parameter", path), path + ".parameter");
  const json& vals = require_member(obj, "values", path);
  if (!vals.is_array() || vals.empty())
    fail(path + ".values", "expected a nonempty array");
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const std::string p = path + ".values[" + std::to_string(i) + "]";
    if (sw.parameter == "curve") {
      sw.labels.push_back(as_string(vals[i], p));
    } else if (sw.parameter == "trial") {
      const long long t = as_integer(vals[i], p);
      if (t < 0) fail(p, "trial indices must be nonnegative");
      sw.numbers.push_back(static_cast<double>(t));
    } else {
      sw.numbers.push_back(as_number(vals[i], p));
    }
  }
}

void check_label_charset(const std::string& label, const std::string& path) {
  if (label.empty()) fail(path, "curve label must be nonempty");
  for (const char c : label) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                    c == '-' || c == '.';
    if (!ok)
      fail(path, "curve label \"" + label +
                     "\" may use only letters, digits, '_', '-', '.'");
  }
}

bool has_curve(const Scenario& s, const std::string& label) {
  return std::any_of(s.curves.begin(), s.curves.end(),
                     [&](const CurveEntry& c) { return c.label == label; });
}

void require_resolved(const Scenario& s, const std::string& label,
                      const std::string& path) {
  if (!has_curve(s, label))
    fail(path, "unresolved curve label \"" + label + "\"");
}

std::vector<const char*> sweep_parameters(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::DoubleSlit:
      return {"relative_phase"};
    case ScenarioKind::AbStatic:
    case ScenarioKind::AbNonabelian:
      return {"curve"};
    case ScenarioKind::JosephsonTwoPath:
      return {"flux"};
    case ScenarioKind::CosmicString:
      return {"deficit_angle"};
    case ScenarioKind::GaugeInvarianceSuite:
      return {"trial"};
    case ScenarioKind::AbDynamic:
      return {};
  }
  return {};
}

void finalize(Scenario& s, bool sweep_given) {
  // Labels: CSV-safe charset, unique, references resolved.
  for (std::size_t i = 0; i < s.curves.size(); ++i) {
    const std::string path = "$.curves[" + std::to_string(i) + "].label";
    check_label_charset(s.curves[i].label, path);
    for (std::size_t j = 0; j < i; ++j)
      if (s.curves[j].label == s.curves[i].label)
        fail(path, "duplicate curve label \"" + s.curves[i].label + "\"");
  }

  const bool interference = s.kind == ScenarioKind::AbStatic ||
                            s.kind == ScenarioKind::AbNonabelian ||
                            s.kind == ScenarioKind::JosephsonTwoPath ||
                            s.kind == ScenarioKind::CosmicString;
  if (interference) {
    if (s.packets.size() != 2)
      fail("$.packets", "expected exactly two packets");
    require_resolved(s, s.dressing.first, "$.dressing.first");
    require_resolved(s, s.dressing.second, "$.dressing.second");
    if (s.kind == ScenarioKind::CosmicString)
      require_resolved(s, s.dressing.connector, "$.dressing.connector");
  }
  if (s.kind == ScenarioKind::GaugeInvarianceSuite) {
    if (s.packets.size() != 1) fail("$.packets", "expected exactly one packet");
    if (s.curves.empty()) fail("$.curves", "at least one curve is required");
    if (s.suite.group == "u1" && s.potential.kind == "flux_tube")
      fail("$.potential.kind", "a u1 suite cannot couple to a flux_tube");
  }
  if (s.kind == ScenarioKind::AbDynamic && s.curves.empty())
    fail("$.curves", "at least one comparison curve is required");
  if (s.kind == ScenarioKind::JosephsonTwoPath) {
    if (s.choices.size() != 2 || s.choices[0] == s.choices[1])
      fail("$.choices", "expected two distinct curve labels");
    require_resolved(s, s.choices[0], "$.choices[0]");
    require_resolved(s, s.choices[1], "$.choices[1]");
  }

  // Spinor fields only make sense when the scenario carries an internal index.
  if (s.internal_dim() == 1) {
    for (std::size_t i = 0; i < s.packets.size(); ++i)
      if (s.packets[i].spinor_given)
        fail("$.packets[" + std::to_string(i) + "].spinor",
             "spinors need a spinor-valued scenario kind");
  }

  // Sweep: default, require, and type-check per kind.
  const std::vector<const char*> params = sweep_parameters(s.kind);
  if (!sweep_given) {
    if (s.kind == ScenarioKind::DoubleSlit) {
      s.sweep.parameter = "relative_phase";
      s.sweep.numbers = {0.0, kPi / 3.0, kPi, 1.7};
    } else if (s.kind == ScenarioKind::GaugeInvarianceSuite) {
      s.sweep.parameter = "trial";
      for (int t = 0; t < 20; ++t) s.sweep.numbers.push_back(t);
    } else if (s.kind != ScenarioKind::AbDynamic) {
      fail("$", "missing key \"sweep\"");
    }
  } else {
    const bool known =
        std::any_of(params.begin(), params.end(), [&](const char* p) {
          return s.sweep.parameter == p;
        });
    if (!known)
      fail("$.sweep.parameter",
           "sweep parameter \"" + s.sweep.parameter +
               "\" is not available for " + scenario_kind_name(s.kind));
    if (s.sweep.parameter == "curve")
      for (std::size_t i = 0; i < s.sweep.labels.size(); ++i)
        require_resolved(s, s.sweep.labels[i],
                         "$.sweep.values[" + std::to_string(i) + "]");
  }

  if (s.output.format != "csv")
    fail("$.output.format", "the only supported format is \"csv\"");
  if (s.output.path.empty())
    s.output.path = std::string(scenario_kind_name(s.kind)) + ".csv";
}

json dump_point(const Vec2& v) { return json::array({v.x(), v.y()}); }

json dump_packet(const PacketSpec& p, bool spinor_context) {
  json j;
  j["center"] = dump_point(p.center);
  j["width"] = p.width;
  j["momentum"] = dump_point(p.momentum);
  j["phase"] = p.phase;
  if (spinor_context)
    j["spinor"] = json::array(
        {json::array({p.spinor[0].real(), p.spinor[0].imag()}),
         json::array({p.spinor[1].real(), p.spinor[1].imag()})});
  return j;
}

json dump_curve(const CurveEntry& c) {
  json j;
  j["label"] = c.label;
  switch (c.form) {
    case CurveEntry::Form::Points: {
      json pts = json::array();
      for (const Vec2& p : c.points) pts.push_back(dump_point(p));
      j["points"] = pts;
      j["closed"] = c.closed;
      break;
    }
    case CurveEntry::Form::Circle:
      j["circle"] = {{"center", dump_point(c.center)},
                     {"radius", c.radius},
                     {"winding", c.winding},
                     {"samples_per_turn", c.samples_per_turn}};
      break;
    case CurveEntry::Form::Segment:
      j["segment"] = {{"from", dump_point(c.from)},
                      {"to", dump_point(c.to)},
                      {"pieces", c.pieces}};
      break;
  }
  return j;
}

json dump_potential(const PotentialSpec& p) {
  json j;
  j["kind"] = p.kind;
  if (p.kind == "none") {
    j["charge"] = p.charge;
    j["coupling"] = p.coupling;
  } else if (p.kind == "solenoid") {
    j["center"] = dump_point(p.center);
    j["flux"] = p.flux;
    j["core_radius"] = p.core_radius;
    j["charge"] = p.charge;
  } else {
    j["center"] = dump_point(p.center);
    j["flux_direction"] = json::array(
        {p.flux_direction[0], p.flux_direction[1], p.flux_direction[2]});
    j["flux_magnitude"] = p.flux_magnitude;
    j["core_radius"] = p.core_radius;
    j["coupling"] = p.coupling;
  }
  return j;
}

bool veq(const Vec2& a, const Vec2& b) {
  return a.x() == b.x() && a.y() == b.y();
}

}  // namespace

const char* scenario_kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::DoubleSlit:
      return "double_slit";
    case ScenarioKind::AbStatic:
      return "ab_static";
    case ScenarioKind::AbDynamic:
      return "ab_dynamic";
    case ScenarioKind::AbNonabelian:
      return "ab_nonabelian";
    case ScenarioKind::JosephsonTwoPath:
      return "josephson_two_path";
    case ScenarioKind::CosmicString:
      return "cosmic_string";
    case ScenarioKind::GaugeInvarianceSuite:
      return "gauge_invariance_suite";
  }
  return "";
}

Curve CurveEntry::build() const {
  Curve c;
  switch (form) {
    case Form::Points:
      c = polyline_curve(points, closed);
      break;
    case Form::Circle:
      c = circle_curve(center, radius, winding, samples_per_turn);
      break;
    case Form::Segment:
      c = segment_curve(from, to, pieces);
      break;
  }
  c.label = label;
  return c;
}

GaugePotential PotentialSpec::build(bool spinor_context) const {
  if (kind == "solenoid")
    return solenoid_potential(center, flux, core_radius, charge);
  if (kind == "flux_tube")
    return nonabelian_flux_tube(center, flux_direction, flux_magnitude,
                                core_radius, coupling);
  GaugePotential a;
  a.basis = spinor_context ? LieAlgebraBasis::su2(coupling)
                           : LieAlgebraBasis::u1(charge);
  return a;
}

const CurveEntry& Scenario::curve_by_label(const std::string& label) const {
  for (const CurveEntry& c : curves)
    if (c.label == label) return c;
  throw ValidationError("unresolved curve label \"" + label + "\"");
}

int Scenario::internal_dim() const {
  if (kind == ScenarioKind::AbNonabelian) return 2;
  if (kind == ScenarioKind::GaugeInvarianceSuite && suite.group == "su2")
    return 2;
  return 1;
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("$: ") + e.what());
  }
  if (!doc.is_object()) fail("$", "expected a config object");

  Scenario s;
  s.kind = kind_from_name(
      as_string(require_member(doc, "kind", "$"), "$.kind"), "$.kind");

  switch (s.kind) {
    case ScenarioKind::DoubleSlit:
      check_keys(doc, "$",
                 {"kind", "grid", "output", "conjugate_display_phases",
                  "sweep", "separation", "width"});
      break;
    case ScenarioKind::AbStatic:
    case ScenarioKind::AbNonabelian:
      check_keys(doc, "$",
                 {"kind", "grid", "output", "conjugate_display_phases",
                  "sweep", "packets", "curves", "potential", "dressing"});
      break;
    case ScenarioKind::JosephsonTwoPath:
      check_keys(doc, "$", {"kind", "grid", "output",
                            "conjugate_display_phases", "sweep", "packets",
                            "curves", "potential", "dressing", "choices"});
      break;
    case ScenarioKind::CosmicString:
      check_keys(doc, "$",
                 {"kind", "grid", "output", "conjugate_display_phases",
                  "sweep", "packets", "curves", "geometry", "dressing"});
      break;
    case ScenarioKind::AbDynamic:
      check_keys(doc, "$",
                 {"kind", "grid", "output", "conjugate_display_phases", "flux",
                  "charge", "packet_speed", "impact_offset", "start_x",
                  "width", "flux_center", "overlap_tol", "time", "curves"});
      break;
    case ScenarioKind::GaugeInvarianceSuite:
      check_keys(doc, "$",
                 {"kind", "grid", "output", "conjugate_display_phases",
                  "sweep", "packets", "curves", "potential", "suite"});
      break;
  }

  bool origin_given = false;
  if (const json* m = member(doc, "grid"))
    parse_grid(as_object(*m, "$.grid"), "$.grid", s.grid, origin_given);
  if (!origin_given) {
    const double half = 0.5 * s.grid.extent();
    s.grid.origin = Vec2(-half, s.grid.dim == 2 ? -half : 0.0);
  }
  s.grid.validate();
  if (s.kind == ScenarioKind::DoubleSlit && s.grid.dim != 1)
    fail("$.grid.dimension", "double_slit runs on a one-dimensional grid");
  if (s.kind != ScenarioKind::DoubleSlit &&
      s.kind != ScenarioKind::GaugeInvarianceSuite && s.grid.dim != 2)
    fail("$.grid.dimension", std::string(scenario_kind_name(s.kind)) +
                                 " runs on a two-dimensional grid");

  if (const json* m = member(doc, "output"))
    parse_output(as_object(*m, "$.output"), "$.output", s.output);
  if (const json* m = member(doc, "conjugate_display_phases"))
    s.conjugate_display_phases = as_bool(*m, "$.conjugate_display_phases");

  if (const json* m = member(doc, "separation"))
    s.slit.separation = as_number(*m, "$.separation");
  if (const json* m = member(doc, "width"))
    (s.kind == ScenarioKind::DoubleSlit ? s.slit.width : s.dynamic.width) =
        as_number(*m, "$.width");

  if (const json* m = member(doc, "packets")) {
    if (!m->is_array()) fail("$.packets", "expected an array");
    for (std::size_t i = 0; i < m->size(); ++i)
      s.packets.push_back(
          parse_packet((*m)[i], "$.packets[" + std::to_string(i) + "]"));
  }
  if (const json* m = member(doc, "curves")) {
    if (!m->is_array()) fail("$.curves", "expected an array");
    for (std::size_t i = 0; i < m->size(); ++i)
      s.curves.push_back(
          parse_curve((*m)[i], "$.curves[" + std::to_string(i) + "]"));
  }
  if (const json* m = member(doc, "potential"))
    parse_potential(*m, "$.potential", s.potential);
  if (s.kind == ScenarioKind::JosephsonTwoPath &&
      s.potential.kind != "solenoid")
    fail("$.potential", "josephson_two_path needs a solenoid potential");
  if (s.kind == ScenarioKind::AbStatic && s.potential.kind == "flux_tube")
    fail("$.potential.kind", "ab_static couples to Abelian potentials only");
  if (s.kind == ScenarioKind::AbNonabelian && s.potential.kind == "solenoid")
    fail("$.potential.kind",
         "ab_nonabelian couples to flux_tube potentials only");
  if (const json* m = member(doc, "geometry"))
    parse_geometry(*m, "$.geometry", s.geometry);
  if (const json* m = member(doc, "dressing"))
    parse_dressing(*m, "$.dressing", s.dressing,
                   s.kind == ScenarioKind::CosmicString);
  else if (s.kind == ScenarioKind::AbStatic ||
           s.kind == ScenarioKind::AbNonabelian ||
           s.kind == ScenarioKind::JosephsonTwoPath ||
           s.kind == ScenarioKind::CosmicString)
    fail("$", "missing key \"dressing\"");
  if (const json* m = member(doc, "choices")) {
    if (!m->is_array()) fail("$.choices", "expected an array of curve labels");
    for (std::size_t i = 0; i < m->size(); ++i)
      s.choices.push_back(
          as_string((*m)[i], "$.choices[" + std::to_string(i) + "]"));
  } else if (s.kind == ScenarioKind::JosephsonTwoPath) {
    fail("$", "missing key \"choices\"");
  }
  if (const json* m = member(doc, "time")) parse_time(*m, "$.time", s.time);
  if (const json* m = member(doc, "suite")) parse_suite(*m, "$.suite", s.suite);

  if (const json* m = member(doc, "flux"))
    s.dynamic.flux = as_number(*m, "$.flux");
  if (const json* m = member(doc, "charge"))
    s.dynamic.charge = as_number(*m, "$.charge");
  if (const json* m = member(doc, "packet_speed"))
    s.dynamic.packet_speed = as_number(*m, "$.packet_speed");
  if (const json* m = member(doc, "impact_offset"))
    s.dynamic.impact_offset = as_number(*m, "$.impact_offset");
  if (const json* m = member(doc, "start_x"))
    s.dynamic.start_x = as_number(*m, "$.start_x");
  if (const json* m = member(doc, "flux_center"))
    s.dynamic.flux_center = as_point(*m, "$.flux_center");
  if (const json* m = member(doc, "overlap_tol"))
    s.dynamic.overlap_tol = as_number(*m, "$.overlap_tol");

  bool sweep_given = false;
  if (const json* m = member(doc, "sweep")) {
    parse_sweep(*m, "$.sweep", s.sweep);
    sweep_given = true;
  }

  finalize(s, sweep_given);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading scenario file \"" + path + "\"");
  return parse_scenario(buf.str());
}

std::string normalized_dump(const Scenario& s) {
  json j;
  j["kind"] = scenario_kind_name(s.kind);
  j["grid"] = {{"dimension", s.grid.dim},
               {"size", s.grid.points_per_axis},
               {"spacing", s.grid.spacing},
               {"origin", dump_point(s.grid.origin)}};
  j["output"] = {{"path", s.output.path}, {"format", s.output.format}};
  j["conjugate_display_phases"] = s.conjugate_display_phases;

  const bool spinor_context = s.internal_dim() == 2;
  if (!s.packets.empty()) {
    json pk = json::array();
    for (const PacketSpec& p : s.packets)
      pk.push_back(dump_packet(p, spinor_context));
    j["packets"] = pk;
  }
  if (!s.curves.empty()) {
    json cv = json::array();
    for (const CurveEntry& c : s.curves) cv.push_back(dump_curve(c));
    j["curves"] = cv;
  }

  switch (s.kind) {
    case ScenarioKind::DoubleSlit:
      j["separation"] = s.slit.separation;
      j["width"] = s.slit.width;
      break;
    case ScenarioKind::AbStatic:
    case ScenarioKind::AbNonabelian:
      j["potential"] = dump_potential(s.potential);
      j["dressing"] = {{"first", s.dressing.first},
                       {"second", s.dressing.second}};
      break;
    case ScenarioKind::JosephsonTwoPath:
      j["potential"] = dump_potential(s.potential);
      j["dressing"] = {{"first", s.dressing.first},
                       {"second", s.dressing.second}};
      j["choices"] = json::array({s.choices[0], s.choices[1]});
      break;
    case ScenarioKind::CosmicString:
      j["geometry"] = {{"apex", dump_point(s.geometry.apex)},
                       {"deficit_angle", s.geometry.deficit_angle},
                       {"core_radius", s.geometry.core_radius}};
      j["dressing"] = {{"first", s.dressing.first},
                       {"second", s.dressing.second},
                       {"connector", s.dressing.connector}};
      break;
    case ScenarioKind::AbDynamic:
      j["flux"] = s.dynamic.flux;
      j["charge"] = s.dynamic.charge;
      j["packet_speed"] = s.dynamic.packet_speed;
      j["impact_offset"] = s.dynamic.impact_offset;
      j["start_x"] = s.dynamic.start_x;
      j["width"] = s.dynamic.width;
      j["flux_center"] = dump_point(s.dynamic.flux_center);
      j["overlap_tol"] = s.dynamic.overlap_tol;
      j["time"] = {{"dt", s.time.dt},
                   {"steps", s.time.steps},
                   {"mass", s.time.mass},
                   {"record_every", s.time.record_every},
                   {"scheme", s.time.scheme}};
      break;
    case ScenarioKind::GaugeInvarianceSuite:
      j["potential"] = dump_potential(s.potential);
      j["suite"] = {{"group", s.suite.group},
                    {"band_limit", s.suite.band_limit},
                    {"amplitude", s.suite.amplitude},
                    {"coupling", s.suite.coupling}};
      break;
  }

  if (s.kind != ScenarioKind::AbDynamic) {
    json vals = json::array();
    if (s.sweep.parameter == "curve") {
      for (const std::string& l : s.sweep.labels) vals.push_back(l);
    } else if (s.sweep.parameter == "trial") {
      for (const double v : s.sweep.numbers)
        vals.push_back(static_cast<long long>(v));
    } else {
      for (const double v : s.sweep.numbers) vals.push_back(v);
    }
    j["sweep"] = {{"parameter", s.sweep.parameter}, {"values", vals}};
  }

  return j.dump(2);
}

bool scenario_equal(const Scenario& a, const Scenario& b) {
  if (a.kind != b.kind) return false;
  if (a.grid.dim != b.grid.dim ||
      a.grid.points_per_axis != b.grid.points_per_axis ||
      a.grid.spacing != b.grid.spacing || !veq(a.grid.origin, b.grid.origin))
    return false;
  if (a.output.path != b.output.path || a.output.format != b.output.format)
    return false;
  if (a.conjugate_display_phases != b.conjugate_display_phases) return false;

  if (a.packets.size() != b.packets.size()) return false;
  for (std::size_t i = 0; i < a.packets.size(); ++i) {
    const PacketSpec& p = a.packets[i];
    const PacketSpec& q = b.packets[i];
    if (!veq(p.center, q.center) || p.width != q.width ||
        !veq(p.momentum, q.momentum) || p.phase != q.phase ||
        p.spinor[0] != q.spinor[0] || p.spinor[1] != q.spinor[1])
      return false;
  }

  if (a.curves.size() != b.curves.size()) return false;
  for (std::size_t i = 0; i < a.curves.size(); ++i) {
    const CurveEntry& c = a.curves[i];
    const CurveEntry& d = b.curves[i];
    if (c.form != d.form || c.label != d.label) return false;
    switch (c.form) {
      case CurveEntry::Form::Points:
        if (c.closed != d.closed || c.points.size() != d.points.size())
          return false;
        for (std::size_t k = 0; k < c.points.size(); ++k)
          if (!veq(c.points[k], d.points[k])) return false;
        break;
      case CurveEntry::Form::Circle:
        if (!veq(c.center, d.center) || c.radius != d.radius ||
            c.winding != d.winding ||
            c.samples_per_turn != d.samples_per_turn)
          return false;
        break;
      case CurveEntry::Form::Segment:
        if (!veq(c.from, d.from) || !veq(c.to, d.to) || c.pieces != d.pieces)
          return false;
        break;
    }
  }

  if (a.potential.kind != b.potential.kind ||
      !veq(a.potential.center, b.potential.center) ||
      a.potential.flux != b.potential.flux ||
      a.potential.core_radius != b.potential.core_radius ||
      a.potential.charge != b.potential.charge ||
      a.potential.flux_direction != b.potential.flux_direction ||
      a.potential.flux_magnitude != b.potential.flux_magnitude ||
      a.potential.coupling != b.potential.coupling)
    return false;
  if (!veq(a.geometry.apex, b.geometry.apex) ||
      a.geometry.deficit_angle != b.geometry.deficit_angle ||
      a.geometry.core_radius != b.geometry.core_radius)
    return false;
  if (a.slit.separation != b.slit.separation ||
      a.slit.width != b.slit.width)
    return false;
  if (a.dynamic.flux != b.dynamic.flux ||
      a.dynamic.charge != b.dynamic.charge ||
      a.dynamic.packet_speed != b.dynamic.packet_speed ||
      a.dynamic.impact_offset != b.dynamic.impact_offset ||
      a.dynamic.start_x != b.dynamic.start_x ||
      a.dynamic.width != b.dynamic.width ||
      !veq(a.dynamic.flux_center, b.dynamic.flux_center) ||
      a.dynamic.overlap_tol != b.dynamic.overlap_tol)
    return false;
  if (a.time.dt != b.time.dt || a.time.steps != b.time.steps ||
      a.time.mass != b.time.mass ||
      a.time.record_every != b.time.record_every ||
      a.time.scheme != b.time.scheme)
    return false;
  if (a.suite.group != b.suite.group ||
      a.suite.band_limit != b.suite.band_limit ||
      a.suite.amplitude != b.suite.amplitude ||
      a.suite.coupling != b.suite.coupling)
    return false;
  if (a.dressing.first != b.dressing.first ||
      a.dressing.second != b.dressing.second ||
      a.dressing.connector != b.dressing.connector)
    return false;
  if (a.choices != b.choices) return false;
  if (a.sweep.parameter != b.sweep.parameter ||
      a.sweep.numbers != b.sweep.numbers || a.sweep.labels != b.sweep.labels)
    return false;
  return true;
}

}  // namespace holoq

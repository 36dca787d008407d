#include "holoq/gravity.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "holoq/errors.hpp"
#include "holoq/observables.hpp"
#include "holoq/parallel.hpp"

namespace holoq {

namespace {

constexpr double kEndpointTol = 1e-12;
constexpr double kClearanceWidths = 5.0;  // packet-to-seam/core margin

void check_core_clearance(const ConeGeometry& geom,
                          const std::vector<Vec2>& pts) {
  const double guard = std::max(geom.core_radius, 1e-12);
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (segment_point_distance(pts[i - 1], pts[i], geom.apex) <= guard)
      throw ValidationError("a curve segment enters the defect core");
}

// Net signed crossings of the seam ray over one segment: the continuous sweep
// about the apex minus the principal atan2 difference is a whole number of
// turns, +1 per counterclockwise pass over the cut.
long segment_seam_crossings(const Vec2& apex, const Vec2& a, const Vec2& b) {
  const Vec2 ra = a - apex, rb = b - apex;
  const double sweep = signed_angle(ra, rb);
  const double principal = std::atan2(rb.y(), rb.x()) - std::atan2(ra.y(), ra.x());
  return std::lround((sweep - principal) / (2.0 * pi));
}

long net_seam_crossings(const Vec2& apex, const std::vector<Vec2>& pts) {
  long w = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    w += segment_seam_crossings(apex, pts[i - 1], pts[i]);
  return w;
}

void check_open_at(const Curve& c, const char* role) {
  if (c.closed)
    throw ValidationError(std::string(role) + " must be an open curve");
}

struct Moments {
  Vec2 center;
  double width = 0.0;  // larger per-axis standard deviation of |psi|^2
};

Moments packet_moments(const WaveFunction& psi) {
  const std::size_t n = psi.grid.total_points();
  double mass = 0.0;
  Vec2 mean = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::norm(psi.at(i));
    mass += w;
    mean += w * psi.grid.coord(i);
  }
  if (mass <= 0.0) throw ValidationError("a packet has no probability mass");
  mean /= mass;
  Vec2 var = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = psi.grid.coord(i) - mean;
    var += std::norm(psi.at(i)) * d.cwiseProduct(d);
  }
  var /= mass;
  return {mean, std::sqrt(std::max(var.x(), var.y()))};
}

void check_packet_clearance(const ConeGeometry& geom, const Moments& m,
                            const char* label) {
  const double margin = kClearanceWidths * m.width;
  if (geom.seam_distance(m.center) < margin)
    throw ValidationError(std::string(label) +
                          " sits within five widths of the identification seam");
  if ((m.center - geom.apex).norm() < geom.core_radius + margin)
    throw ValidationError(std::string(label) +
                          " sits within five widths of the defect core");
}

}  // namespace

void ConeGeometry::validate() const {
  if (!std::isfinite(apex.x()) || !std::isfinite(apex.y()))
    throw ValidationError("the apex position must be finite");
  if (!std::isfinite(deficit_angle) || std::abs(deficit_angle) >= 2.0 * pi)
    throw ValidationError(
        "the angular defect must lie strictly between -2 pi and 2 pi");
  if (!std::isfinite(core_radius) || core_radius < 0.0)
    throw ValidationError("the core radius must be finite and nonnegative");
}

double ConeGeometry::seam_distance(const Vec2& p) const {
  const Vec2 d = p - apex;
  if (d.x() <= 0.0) return std::abs(d.y());
  return d.norm();
}

PoincareElement compose(const PoincareElement& a, const PoincareElement& b) {
  return {a.rotation + b.rotation,
          a.translation + rot2(a.rotation) * b.translation};
}

PoincareElement inverse(const PoincareElement& e) {
  return {-e.rotation, -(rot2(-e.rotation) * e.translation)};
}

PoincareElement poincare_transport(const ConeGeometry& geom,
                                   const Curve& curve) {
  geom.validate();
  curve.validate();
  const std::vector<Vec2> pts = curve.traversal();
  check_core_clearance(geom, pts);
  const double rotation = geom.deficit_angle * net_seam_crossings(geom.apex, pts);
  const Vec2 translation =
      (pts.back() - geom.apex) - rot2(rotation) * (pts.front() - geom.apex);
  return {rotation, translation};
}

FrameTransportReport tangent_frame_distinguishability(const ConeGeometry& geom,
                                                      const Curve& loop) {
  geom.validate();
  loop.validate();
  if (!loop.closed)
    throw ValidationError("frame transport needs a closed loop");
  const std::vector<Vec2> pts = loop.traversal();
  check_core_clearance(geom, pts);

  const std::size_t segs = pts.size() - 1;
  std::vector<Vec2> dir(segs);
  for (std::size_t j = 0; j < segs; ++j) {
    dir[j] = pts[j + 1] - pts[j];
    if (dir[j].norm() <= 0.0)
      throw ValidationError("frame transport needs nonzero segments");
  }

  FrameTransportReport rep;
  double arclength = 0.0;
  double tangent = std::atan2(dir[0].y(), dir[0].x());
  double frame = tangent;  // launched along the initial tangent
  for (std::size_t j = 0; j < segs; ++j) {
    rep.samples.push_back({arclength, tangent, frame});
    arclength += dir[j].norm();
    frame += geom.deficit_angle *
             segment_seam_crossings(geom.apex, pts[j], pts[j + 1]);
    tangent += signed_angle(dir[j], dir[(j + 1) % segs]);
  }
  rep.samples.push_back({arclength, tangent, frame});
  rep.holonomy_rotation = frame - rep.samples.front().frame_angle;
  rep.frame_minus_tangent_total =
      (frame - tangent) -
      (rep.samples.front().frame_angle - rep.samples.front().tangent_angle);
  return rep;
}

WaveFunction apply_rigid_motion(const WaveFunction& psi,
                                const PoincareElement& g, const Vec2& apex) {
  psi.grid.validate();
  if (psi.grid.dim != 2)
    throw ValidationError("rigid-motion pullback needs a plane grid");
  if (psi.internal_dim != 1)
    throw ValidationError(
        "rigid-motion pullback covers single-component states");

  WaveFunction hat = psi;
  detail::fft_components(hat, -1);
  const int n = psi.grid.points_per_axis;
  const std::size_t total = psi.grid.total_points();
  double peak = 0.0;
  for (std::size_t i = 0; i < total; ++i)
    peak = std::max(peak, std::abs(hat.amp[i]));
  const double floor = 1e-13 * peak;

  // Modes above the floor, grouped by the y wavenumber; the interpolant is
  // evaluated as sum_ky e^{i ky u_y} sum_kx a e^{i kx u_x}.
  struct Row {
    double ky;
    std::vector<std::pair<int, Complex>> modes;  // x index, amplitude
  };
  std::vector<Row> rows;
  std::vector<char> x_used(n, 0);
  for (int iy = 0; iy < n; ++iy) {
    Row row{psi.grid.wavenumber(iy), {}};
    for (int ix = 0; ix < n; ++ix) {
      const Complex a = hat.amp[static_cast<std::size_t>(iy) * n + ix];
      if (std::abs(a) <= floor) continue;
      row.modes.emplace_back(ix, a);
      x_used[ix] = 1;
    }
    if (!row.modes.empty()) rows.push_back(std::move(row));
  }
  std::vector<int> used_x;
  for (int ix = 0; ix < n; ++ix)
    if (x_used[ix]) used_x.push_back(ix);
  std::vector<double> kx(n);
  for (int ix = 0; ix < n; ++ix) kx[ix] = psi.grid.wavenumber(ix);

  WaveFunction out = WaveFunction::zero(psi.grid, 1);
  const double inv = 1.0 / static_cast<double>(total);
  const Eigen::Matrix2d back = rot2(-g.rotation);
  const Vec2 origin = psi.grid.origin;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t iy) {
    std::vector<Complex> ex(n);
    for (int ix = 0; ix < n; ++ix) {
      const std::size_t flat = iy * static_cast<std::size_t>(n) + ix;
      const Vec2 x = psi.grid.coord(flat);
      const Vec2 u =
          apex + back * ((x - apex) - g.translation) - origin;
      for (const int j : used_x) ex[j] = std::polar(1.0, kx[j] * u.x());
      Complex acc = 0.0;
      for (const Row& row : rows) {
        Complex s = 0.0;
        for (const auto& [j, a] : row.modes) s += a * ex[j];
        acc += std::polar(1.0, row.ky * u.y()) * s;
      }
      out.amp[flat] = inv * acc;
    }
  });
  return out;
}

Complex gravitational_ab_expectation(const WaveFunction& psi10,
                                     const WaveFunction& psi20,
                                     const Curve& gamma1, const Curve& gamma2,
                                     const Curve& gamma,
                                     const ConeGeometry& geom) {
  geom.validate();
  if (!psi10.grid.same_as(psi20.grid))
    throw ValidationError("both packets must share one grid");
  if (psi10.grid.dim != 2)
    throw ValidationError("the string expectation needs a plane grid");
  if (psi10.internal_dim != 1 || psi20.internal_dim != 1)
    throw ValidationError(
        "the string expectation covers single-component states");
  gamma.validate();
  gamma1.validate();
  gamma2.validate();
  check_open_at(gamma, "the connecting curve");
  check_open_at(gamma1, "a dressing path");
  check_open_at(gamma2, "a dressing path");
  if ((gamma.start() - gamma2.end()).norm() > kEndpointTol ||
      (gamma.end() - gamma1.end()).norm() > kEndpointTol)
    throw ValidationError(
        "the connecting curve must run from the second packet's site to the "
        "first's");
  if ((gamma1.start() - gamma2.start()).norm() > kEndpointTol)
    throw ValidationError("dressing paths must share their base point");

  const Vec2 ell = gamma.end() - gamma.start();
  const double norm_scale = psi10.norm() * psi20.norm();
  const double overlap_tol = 1e-8 * std::max(norm_scale, 1e-300);
  const WaveFunction shifted1 = translate(psi10, -ell);
  if (std::abs(inner_product(psi10, psi20)) > overlap_tol ||
      std::abs(inner_product(shifted1, psi10)) > overlap_tol ||
      std::abs(inner_product(translate(psi20, -ell), psi20)) > overlap_tol)
    throw ValidationError(
        "the interference term needs packets disjoint from each other and "
        "from their own displaced copies");

  const Moments m1 = packet_moments(psi10);
  const Moments m2 = packet_moments(psi20);
  const Moments ms = packet_moments(shifted1);
  check_packet_clearance(geom, m1, "the first packet");
  check_packet_clearance(geom, m2, "the second packet");
  check_packet_clearance(geom, ms, "the displaced first packet");

  const Curve loop = as_closed(concat(concat(gamma2, gamma), reversed(gamma1)));
  const PoincareElement g0 = poincare_transport(geom, loop);

  const Moments image{geom.apex + g0.apply(m2.center - geom.apex), m2.width};
  check_packet_clearance(geom, image, "the transported second packet");
  const double margin = kClearanceWidths * image.width;
  const Vec2 lo = psi10.grid.origin;
  const double extent = psi10.grid.extent();
  if (image.center.x() < lo.x() + margin ||
      image.center.x() > lo.x() + extent - margin ||
      image.center.y() < lo.y() + margin ||
      image.center.y() > lo.y() + extent - margin)
    throw ValidationError(
        "the transported second packet leaves the represented region");

  const WaveFunction moved = apply_rigid_motion(psi20, g0, geom.apex);
  return cross_term_factor * inner_product(shifted1, moved);
}

}  // namespace holoq

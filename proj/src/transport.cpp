#include "holoq/transport.hpp"

#include <cmath>

#include "holoq/errors.hpp"
#include "holoq/su2.hpp"

namespace holoq {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw ValidationError(msg);
}

double segment_length_sum(const std::vector<Vec2>& pts) {
  double s = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) s += (pts[i] - pts[i - 1]).norm();
  return s;
}

}  // namespace

void Curve::validate() const {
  require(points.size() >= 2, "a curve needs at least two points");
  for (const auto& p : points)
    require(std::isfinite(p.x()) && std::isfinite(p.y()),
            "curve points must be finite");
  for (std::size_t i = 1; i < points.size(); ++i)
    require((points[i] - points[i - 1]).norm() > 0.0,
            "consecutive curve points must be distinct");
  if (closed)
    require((points.back() - points.front()).norm() > 1e-15,
            "closed curves must not repeat the first point; closure is implicit");
}

double Curve::length() const { return segment_length_sum(traversal()); }

std::vector<Vec2> Curve::traversal() const {
  std::vector<Vec2> pts = points;
  if (closed) pts.push_back(points.front());
  return pts;
}

Curve segment_curve(const Vec2& a, const Vec2& b, int pieces) {
  require(pieces >= 1, "segment subdivision must be positive");
  Curve c;
  for (int i = 0; i <= pieces; ++i)
    c.points.push_back(a + (b - a) * (static_cast<double>(i) / pieces));
  c.validate();
  return c;
}

Curve polyline_curve(std::vector<Vec2> pts, bool closed) {
  Curve c;
  c.points = std::move(pts);
  c.closed = closed;
  c.validate();
  return c;
}

Curve circle_curve(const Vec2& center, double radius, int winding,
                   int samples_per_turn) {
  require(radius > 0.0, "circle radius must be positive");
  require(winding != 0, "circle winding must be nonzero");
  require(samples_per_turn >= 8, "circle needs at least 8 samples per turn");
  Curve c;
  c.closed = true;
  const int total = std::abs(winding) * samples_per_turn;
  const double step = (winding > 0 ? 1.0 : -1.0) * 2.0 * pi / samples_per_turn;
  for (int i = 0; i < total; ++i) {
    const double th = step * i;
    c.points.push_back(center + radius * Vec2(std::cos(th), std::sin(th)));
  }
  c.validate();
  return c;
}

Curve arc_curve(const Vec2& center, double radius, double theta0, double theta1,
                int segments) {
  require(radius > 0.0, "arc radius must be positive");
  require(theta1 != theta0, "arc must sweep a nonzero angle");
  require(segments >= 1, "arc needs at least one segment");
  Curve c;
  for (int i = 0; i <= segments; ++i) {
    const double th = theta0 + (theta1 - theta0) * i / segments;
    c.points.push_back(center + radius * Vec2(std::cos(th), std::sin(th)));
  }
  c.validate();
  return c;
}

Curve concat(const Curve& a, const Curve& b) {
  require(!a.closed && !b.closed, "only open curves can be concatenated");
  require((a.points.back() - b.points.front()).norm() <= 1e-12,
          "curves to concatenate must share an endpoint");
  Curve c;
  c.points = a.points;
  c.points.insert(c.points.end(), b.points.begin() + 1, b.points.end());
  if (!a.label.empty() || !b.label.empty())
    c.label = a.label + "+" + b.label;
  c.validate();
  return c;
}

Curve reversed(const Curve& c) {
  Curve out = c;
  std::reverse(out.points.begin(), out.points.end());
  return out;
}

Curve translated(const Curve& c, const Vec2& offset) {
  Curve out = c;
  for (auto& p : out.points) p += offset;
  return out;
}

Curve as_closed(const Curve& c) {
  require(!c.closed, "curve is already closed");
  require((c.points.back() - c.points.front()).norm() <= 1e-12,
          "closing a curve requires coinciding endpoints");
  Curve out = c;
  out.points.pop_back();
  out.closed = true;
  out.validate();
  return out;
}

GroupElement group_element(Eigen::MatrixXcd m, const LieAlgebraBasis& basis) {
  const int d = basis.matrix_dim();
  require(m.rows() == d && m.cols() == d,
          "group element dimension must match the basis");
  const double defect =
      (m * m.adjoint() - Eigen::MatrixXcd::Identity(d, d)).norm();
  if (defect > 1e-10)
    throw NumericError("transport lost unitarity beyond 1e-10");
  GroupElement g;
  g.matrix = std::move(m);
  g.basis = basis;
  return g;
}

GroupElement identity_element(const LieAlgebraBasis& basis) {
  GroupElement g;
  g.matrix = Eigen::MatrixXcd::Identity(basis.matrix_dim(), basis.matrix_dim());
  g.basis = basis;
  return g;
}

namespace detail {

void check_curve_clearance(const GaugePotential& A, const Curve& curve) {
  curve.validate();
  const auto pts = curve.traversal();
  for (const auto& disc : A.excluded_regions) {
    if (disc.radius <= 0.0) continue;  // idealized lines handled below
    for (std::size_t i = 1; i < pts.size(); ++i)
      require(!segment_hits_disc(pts[i - 1], pts[i], disc),
              "curve enters an excluded region");
  }
  for (const auto& line : A.flux_lines) {
    if (line.core_radius > 0.0) continue;
    for (std::size_t i = 1; i < pts.size(); ++i)
      require(segment_point_distance(pts[i - 1], pts[i], line.center) >= 1e-12,
              "curve passes through an idealized flux line");
  }
}

}  // namespace detail

namespace {

// Romberg integration of a Vector3d-valued function on [0, 1], starting from
// 8 trapezoid panels and doubling.
Eigen::Vector3d romberg01(const std::function<Eigen::Vector3d(double)>& f,
                          const LineIntegralOptions& opt) {
  const int base = 8;
  std::vector<std::array<Eigen::Vector3d, 16>> table;
  auto trapezoid_refine = [&](int level, const Eigen::Vector3d& prev) {
    const int panels = base << level;
    if (level == 0) {
      Eigen::Vector3d s = 0.5 * (f(0.0) + f(1.0));
      for (int i = 1; i < panels; ++i) s += f(static_cast<double>(i) / panels);
      return Eigen::Vector3d(s / panels);
    }
    // reuse: T_level = T_{level-1}/2 + h * sum of new midpoints
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    for (int i = 1; i < panels; i += 2) s += f(static_cast<double>(i) / panels);
    return Eigen::Vector3d(0.5 * prev + s / panels);
  };

  Eigen::Vector3d trap = trapezoid_refine(0, Eigen::Vector3d::Zero());
  table.push_back({});
  table[0][0] = trap;
  // Accept only after two consecutive sub-tolerance refinements: a single
  // agreement can be an aliasing accident on oscillatory integrands.
  bool prev_ok = false;
  for (int k = 1; k <= opt.max_levels; ++k) {
    trap = trapezoid_refine(k, trap);
    table.push_back({});
    table[k][0] = trap;
    double pow4 = 1.0;
    for (int j = 1; j <= k && j < 16; ++j) {
      pow4 *= 4.0;
      table[k][j] =
          (pow4 * table[k][j - 1] - table[k - 1][j - 1]) / (pow4 - 1.0);
    }
    const int dk = std::min(k, 15);
    const int dp = std::min(k - 1, 15);
    const double diff = (table[k][dk] - table[k - 1][dp]).norm();
    const double scale = table[k][dk].norm();
    const bool ok = diff <= std::max(opt.atol, opt.rtol * scale);
    if (ok && prev_ok) return table[k][dk];
    prev_ok = ok;
  }
  throw NumericError("line integral did not converge under refinement");
}

// Tangent-projected algebra coefficients at x for direction d.
Eigen::Vector3d projected_coeffs(const AlgebraField& f, const Vec2& d) {
  return f.col(0) * d.x() + f.col(1) * d.y();
}

}  // namespace

AlgebraCoeffs line_integral(const GaugePotential& A, const Curve& curve,
                            double t, const LineIntegralOptions& opt) {
  detail::check_curve_clearance(A, curve);
  const auto pts = curve.traversal();

  AlgebraCoeffs total = AlgebraCoeffs::Zero();
  std::vector<const FluxLine*> numeric_lines;
  for (const auto& line : A.flux_lines) {
    bool outside_core = true;
    if (line.core_radius > 0.0) {
      for (std::size_t i = 1; i < pts.size() && outside_core; ++i)
        outside_core = segment_point_distance(pts[i - 1], pts[i],
                                              line.center) >= line.core_radius;
    }
    if (!outside_core) {
      numeric_lines.push_back(&line);
      continue;
    }
    // Outside the core the field is the exact circulating form, whose line
    // integral is flux /(2 pi) times the swept angle about the center.
    double swept = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      swept +=
          signed_angle(pts[i - 1] - line.center, pts[i] - line.center);
    total += line.flux * (swept / (2.0 * pi));
  }

  if (!curve.closed) {
    for (const auto& s : A.exact_scalars)
      total[0] += s.value(pts.back()) - s.value(pts.front());
  }

  if (A.background || !numeric_lines.empty()) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Vec2 a = pts[i - 1];
      const Vec2 d = pts[i] - a;
      auto f = [&](double s) -> Eigen::Vector3d {
        const Vec2 x = a + s * d;
        AlgebraField field = AlgebraField::Zero();
        if (A.background) field += A.background(x, t);
        for (const auto* line : numeric_lines)
          field += flux_line_field(*line, x);
        return projected_coeffs(field, d);
      };
      total += romberg01(f, opt);
    }
  }
  return total;
}

namespace {

Eigen::Matrix2cd mg4_product(const GaugePotential& A,
                             const std::vector<Vec2>& pts, double t,
                             int pieces_total) {
  const double g0 = A.basis.coupling;
  const double total_len = segment_length_sum(pts);
  const double gauss_off = std::sqrt(3.0) / 6.0;
  Eigen::Matrix2cd w = Eigen::Matrix2cd::Identity();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec2 a = pts[i - 1];
    const Vec2 d = pts[i] - a;
    const int m = std::max(
        1, static_cast<int>(std::llround(pieces_total * d.norm() / total_len)));
    const double h = 1.0 / m;
    for (int j = 0; j < m; ++j) {
      const double t0 = j * h;
      const double s1 = t0 + h * (0.5 - gauss_off);
      const double s2 = t0 + h * (0.5 + gauss_off);
      const Eigen::Vector3d v1 =
          g0 * projected_coeffs(A.value(a + s1 * d, t), d);
      const Eigen::Vector3d v2 =
          g0 * projected_coeffs(A.value(a + s2 * d, t), d);
      const Eigen::Vector3d omega =
          0.5 * h * (v1 + v2) +
          (std::sqrt(3.0) * h * h / 12.0) * v1.cross(v2);
      w = su2_exp(omega) * w;  // factors nearest the end applied leftmost
    }
  }
  return w;
}

// Single sixth-order Magnus step across one straight chord: three
// Gauss-Legendre samples combined with the standard quintic commutator
// corrections.  In the vector picture used here (X = i x.T) the bracket is
// [X, Y] = -(x cross y), which fixes the signs below.
Eigen::Matrix2cd mg6_step(const GaugePotential& A, double t, double g0,
                          const Vec2& p0, const Vec2& p1) {
  const double off = std::sqrt(15.0) / 10.0;
  const Vec2 d = p1 - p0;
  const Eigen::Vector3d a1 =
      g0 * projected_coeffs(A.value(p0 + (0.5 - off) * d, t), d);
  const Eigen::Vector3d a2 = g0 * projected_coeffs(A.value(p0 + 0.5 * d, t), d);
  const Eigen::Vector3d a3 =
      g0 * projected_coeffs(A.value(p0 + (0.5 + off) * d, t), d);
  const Eigen::Vector3d b1 = a2;
  const Eigen::Vector3d b2 = (std::sqrt(15.0) / 3.0) * (a3 - a1);
  const Eigen::Vector3d b3 = (10.0 / 3.0) * (a1 - 2.0 * a2 + a3);
  const Eigen::Vector3d c12 = b1.cross(b2);
  const Eigen::Vector3d omega = b1 + b3 / 12.0 + c12 / 12.0 -
                                b2.cross(b3) / 240.0 +
                                b1.cross(b1.cross(b3)) / 360.0 -
                                b2.cross(c12) / 240.0 -
                                b1.cross(b1.cross(c12)) / 720.0;
  return su2_exp(omega);
}

// Bisect until one step and two half steps agree within the local error
// budget; the budget halves with the interval, so the accepted local errors
// sum to at most the whole-curve tolerance.  Refinement concentrates where
// the field is rough (near flux cores) instead of fining the whole curve.
// Depth 0 never accepts, so a deceptively symmetric chord cannot pass on a
// single estimate.  For a sixth-order step the halves-vs-whole defect
// overstates the finer result's error by 2^6 - 1, so accepting at 16x the
// budget still keeps a fourfold margin.
Eigen::Matrix2cd mg6_bisect(const GaugePotential& A, double t, double g0,
                            const Vec2& p0, const Vec2& p1, double tol,
                            int depth, int max_depth) {
  const Vec2 mid = 0.5 * (p0 + p1);
  const Eigen::Matrix2cd halves =
      mg6_step(A, t, g0, mid, p1) * mg6_step(A, t, g0, p0, mid);
  if (depth > 0) {
    const Eigen::Matrix2cd whole = mg6_step(A, t, g0, p0, p1);
    if ((halves - whole).norm() <= 16.0 * tol) return halves;
  }
  if (depth >= max_depth)
    throw NumericError("ordered exponential did not converge under refinement");
  return mg6_bisect(A, t, g0, mid, p1, 0.5 * tol, depth + 1, max_depth) *
         mg6_bisect(A, t, g0, p0, mid, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

GroupElement path_ordered_exponential(const GaugePotential& A,
                                      const Curve& curve, double t,
                                      const PathOrderOptions& opt) {
  detail::check_curve_clearance(A, curve);

  if (A.abelian()) {
    const AlgebraCoeffs c = line_integral(A, curve, t, opt.integral);
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = std::exp(Complex(0.0, A.basis.coupling * c[0]));
    return group_element(std::move(m), A.basis);
  }

  if (A.commuting_direction().has_value()) {
    const AlgebraCoeffs c = line_integral(A, curve, t, opt.integral);
    return group_element(su2_exp(A.basis.coupling * c), A.basis);
  }

  const auto pts = curve.traversal();
  const double g0 = A.basis.coupling;
  const double total_len = segment_length_sum(pts);
  const int base = std::max(opt.initial_pieces, 1);
  Eigen::Matrix2cd w = Eigen::Matrix2cd::Identity();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec2 a = pts[i - 1];
    const Vec2 d = pts[i] - a;
    const int m = std::max(
        1, static_cast<int>(std::llround(base * d.norm() / total_len)));
    const double chunk_tol = opt.tol * d.norm() / (total_len * m);
    for (int j = 0; j < m; ++j) {
      const Vec2 p0 = a + (static_cast<double>(j) / m) * d;
      const Vec2 p1 = a + (static_cast<double>(j + 1) / m) * d;
      w = mg6_bisect(A, t, g0, p0, p1, chunk_tol, 0, opt.max_depth) * w;
    }
  }
  return group_element(w, A.basis);
}

GroupElement holonomy(const GaugePotential& A, const Curve& loop, double t,
                      const PathOrderOptions& opt) {
  loop.validate();
  if (!loop.closed)
    throw ValidationError("holonomy needs a closed curve");
  return path_ordered_exponential(A, loop, t, opt);
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  if (!a.basis.same_as(b.basis))
    throw ValidationError("cannot compose transports over different bases");
  return group_element(a.matrix * b.matrix, a.basis);
}

GroupElement inverse(const GroupElement& a) {
  GroupElement g;
  g.matrix = a.matrix.adjoint();
  g.basis = a.basis;
  return g;
}

namespace detail {

GroupElement path_ordered_fixed(const GaugePotential& A, const Curve& curve,
                                double t, int pieces) {
  if (A.abelian())
    throw ValidationError("fixed-budget ordered product is SU2-only");
  check_curve_clearance(A, curve);
  return group_element(mg4_product(A, curve.traversal(), t, pieces), A.basis);
}

GroupElement path_ordered_fixed6(const GaugePotential& A, const Curve& curve,
                                 double t, int pieces) {
  if (A.abelian())
    throw ValidationError("fixed-budget ordered product is SU2-only");
  check_curve_clearance(A, curve);
  const auto pts = curve.traversal();
  const double g0 = A.basis.coupling;
  Eigen::Matrix2cd w = Eigen::Matrix2cd::Identity();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec2 a = pts[i - 1];
    const Vec2 d = pts[i] - a;
    for (int j = 0; j < pieces; ++j) {
      const Vec2 p0 = a + (static_cast<double>(j) / pieces) * d;
      const Vec2 p1 = a + (static_cast<double>(j + 1) / pieces) * d;
      w = mg6_step(A, t, g0, p0, p1) * w;
    }
  }
  return group_element(w, A.basis);
}

}  // namespace detail

}  // namespace holoq

#include <doctest.h>

#include <cmath>
#include <complex>

#include "holoq/gauge.hpp"
#include "holoq/grid.hpp"
#include "holoq/su2.hpp"
#include "holoq/transport.hpp"
#include "support/oracles.hpp"

using namespace holoq;

namespace {

const Vec2 kFluxCenter(0.013, 0.017);

GridSpec plane_grid() {
  GridSpec g;
  g.dim = 2;
  g.points_per_axis = 64;
  g.spacing = 0.2;
  g.origin = Vec2(-6.4, -6.4);
  return g;
}

GaugePotential ab_pot(double flux) {
  return solenoid_potential(kFluxCenter, flux, 0.0);
}

GaugePotential tube_pot(double magnitude) {
  return nonabelian_flux_tube(kFluxCenter, Eigen::Vector3d(0, 0, 1), magnitude,
                              0.0, 0.9);
}

// Flux tube folded through a random unitary field: the resulting sampler has a
// position-dependent algebra direction, so ordering genuinely matters.
GaugePotential mixed_pot() {
  const auto g = random_smooth_gauge(11, GaugeGroup::SU2, 3, 0.4, plane_grid());
  return apply_gauge_to_potential(tube_pot(1.1), g);
}

std::vector<Vec2> densify(const std::vector<Vec2>& pts, int per_edge) {
  std::vector<Vec2> out;
  for (std::size_t i = 1; i < pts.size(); ++i)
    for (int j = 0; j < per_edge; ++j)
      out.push_back(pts[i - 1] +
                    (pts[i] - pts[i - 1]) * (static_cast<double>(j) / per_edge));
  out.push_back(pts.back());
  return out;
}

}  // namespace

TEST_CASE("curve construction and validation") {
  CHECK_THROWS_AS(polyline_curve({Vec2(0, 0)}), ValidationError);
  CHECK_THROWS_AS(polyline_curve({Vec2(0, 0), Vec2(0, 0)}), ValidationError);
  CHECK_THROWS_AS(polyline_curve({Vec2(0, 0), Vec2(1, 0), Vec2(0, 0)}, true),
                  ValidationError);
  CHECK_THROWS_AS(circle_curve(Vec2(0, 0), 1.0, 0), ValidationError);
  CHECK_THROWS_AS(arc_curve(Vec2(0, 0), 1.0, 0.5, 0.5), ValidationError);

  const auto a = segment_curve(Vec2(0, 0), Vec2(1, 0), 4);
  const auto b = segment_curve(Vec2(1, 0), Vec2(1, 2));
  const auto joined = concat(a, b);
  CHECK(joined.points.size() == 6);
  CHECK(joined.length() == doctest::Approx(3.0));
  CHECK_THROWS_AS(concat(b, a), ValidationError);

  const auto circ = circle_curve(Vec2(1, 1), 2.0, 1, 256);
  CHECK(circ.closed);
  CHECK(circ.length() == doctest::Approx(2 * pi * 2.0).epsilon(1e-3));
  CHECK_THROWS_AS(concat(circ, a), ValidationError);

  const auto rev = reversed(joined);
  CHECK((rev.start() - joined.end()).norm() == 0.0);
  const auto moved = translated(joined, Vec2(0.5, -0.5));
  CHECK((moved.start() - Vec2(0.5, -0.5)).norm() == 0.0);

  auto ring = concat(joined, polyline_curve({Vec2(1, 2), Vec2(0, 0)}));
  const auto closed_ring = as_closed(ring);
  CHECK(closed_ring.closed);
  CHECK(closed_ring.points.size() == ring.points.size() - 1);
  CHECK_THROWS_AS(as_closed(joined), ValidationError);
}

TEST_CASE("line integrals of flux lines are evaluated in closed form") {
  const auto A = ab_pot(pi);
  const auto loop = circle_curve(kFluxCenter, 2.0, 1, 128);
  CHECK(std::abs(line_integral(A, loop)[0] - pi) <= 1e-12);
  CHECK(std::abs(line_integral(A, reversed(loop))[0] + pi) <= 1e-12);
  CHECK(std::abs(line_integral(A, circle_curve(kFluxCenter, 1.0, 3, 64))[0] -
                 3 * pi) <= 1e-12);
  CHECK(std::abs(line_integral(A, circle_curve(Vec2(4, 4), 1.0, 1, 64))[0]) <=
        1e-13);

  GaugePotential empty;
  empty.basis = LieAlgebraBasis::u1(1.0);
  CHECK(line_integral(empty, loop).norm() == 0.0);

  // Quarter arc about the center sweeps a quarter of the flux.
  const auto arc = arc_curve(kFluxCenter, 1.5, 0.2, 0.2 + pi / 2, 64);
  CHECK(std::abs(line_integral(A, arc)[0] - pi / 4) <= 1e-12);

  // Irregular enclosing polygon still picks up exactly one winding.
  const auto poly = polyline_curve(
      {Vec2(2, 0.3), Vec2(0.5, 1.8), Vec2(-1.2, 0.9), Vec2(-1.7, -1.1),
       Vec2(0.4, -1.6)},
      true);
  CHECK(std::abs(line_integral(A, poly)[0] - pi) <= 1e-12);
  const auto dense = densify(poly.traversal(), 2000);
  CHECK(std::abs(oracles::trapezoid_line_integral(A, dense)[0] -
                 line_integral(A, poly)[0]) <= 5e-6);
}

TEST_CASE("exact scalars shift open-curve integrals by endpoint differences") {
  const auto A = ab_pot(1.3);
  const auto g = random_smooth_gauge(17, GaugeGroup::U1, 4, 0.5, plane_grid());
  const auto Ap = apply_gauge_to_potential(A, g);

  const auto open = polyline_curve({Vec2(-2, 1), Vec2(0.4, 2.2), Vec2(1, 2.5)});
  const double got = line_integral(Ap, open)[0] - line_integral(A, open)[0];
  CHECK(std::abs(got - (g.lambda(Vec2(1, 2.5)) - g.lambda(Vec2(-2, 1)))) <=
        1e-12);

  const auto loop = circle_curve(Vec2(0, 0), 2.0, 1, 128);
  CHECK(std::abs(line_integral(Ap, loop)[0] - line_integral(A, loop)[0]) <=
        1e-12);
}

TEST_CASE("free-form backgrounds integrate by adaptive quadrature") {
  // The same circulating profile, declared only through the sampler.
  GaugePotential bg;
  bg.basis = LieAlgebraBasis::u1(1.0);
  bg.background = [](const Vec2& x, double) {
    FluxLine line;
    line.center = kFluxCenter;
    line.flux = AlgebraCoeffs(pi, 0, 0);
    return flux_line_field(line, x);
  };
  const auto loop = circle_curve(kFluxCenter, 2.0, 1, 128);
  CHECK(std::abs(line_integral(bg, loop)[0] - pi) <= 1e-8);

  // Flux line plus constant background add up; cross-checked by trapezoid.
  auto A = ab_pot(pi);
  A.background = [](const Vec2&, double) {
    AlgebraField f = AlgebraField::Zero();
    f(0, 0) = 0.3;
    f(0, 1) = -0.1;
    return f;
  };
  const auto open = polyline_curve({Vec2(1, 1), Vec2(2.2, 1.4), Vec2(3, 2)});
  const auto dense = densify(open.traversal(), 4000);
  CHECK(std::abs(line_integral(A, open)[0] -
                 oracles::trapezoid_line_integral(A, dense)[0]) <= 1e-6);

  // An integrand the refinement ladder cannot resolve is reported, not
  // silently truncated.
  GaugePotential wild;
  wild.basis = LieAlgebraBasis::u1(1.0);
  wild.background = [](const Vec2& x, double) {
    AlgebraField f = AlgebraField::Zero();
    f(0, 0) = 2.0 + std::cos(137777.123 * (x.x() + 0.7 * x.y()));
    return f;
  };
  CHECK_THROWS_AS(line_integral(wild, segment_curve(Vec2(0, 0), Vec2(1, 0.3))),
                  NumericError);
}

TEST_CASE("solid-body interiors are integrable when not excluded") {
  // Finite core but a smaller hard exclusion: the annulus between them is
  // reachable and uses the interior profile.
  GaugePotential A;
  A.basis = LieAlgebraBasis::u1(1.0);
  FluxLine line;
  line.center = kFluxCenter;
  line.flux = AlgebraCoeffs(2.0, 0, 0);
  line.core_radius = 0.8;
  A.flux_lines.push_back(line);
  A.excluded_regions.push_back(Disc{kFluxCenter, 0.2});

  const auto inner = circle_curve(kFluxCenter, 0.5, 1, 256);
  // Inside the core the field is not flat, so the polygon integral follows the
  // polygon's own enclosed area: factor * 2 * signed area.
  const auto tv = inner.traversal();
  double area2 = 0.0;
  for (std::size_t i = 1; i < tv.size(); ++i)
    area2 += cross2(tv[i - 1] - kFluxCenter, tv[i] - kFluxCenter);
  const double want = 2.0 / (2.0 * pi * 0.8 * 0.8) * area2;
  CHECK(std::abs(line_integral(A, inner)[0] - want) <= 1e-9);
}

TEST_CASE("ordered exponential reduces to plain exponentials when commuting") {
  const auto A = ab_pot(pi);
  const auto loop = circle_curve(kFluxCenter, 2.0, 1, 128);
  const auto u = path_ordered_exponential(A, loop);
  CHECK(std::abs(u.matrix(0, 0) - Complex(-1.0, 0.0)) <= 1e-12);

  GaugePotential empty;
  empty.basis = LieAlgebraBasis::u1(1.0);
  CHECK(std::abs(path_ordered_exponential(
                     empty, segment_curve(Vec2(0, 0), Vec2(1, 1)))
                     .matrix(0, 0) -
                 Complex(1.0, 0.0)) <= 1e-15);

  const auto tube = tube_pot(1.1);
  const auto w = path_ordered_exponential(tube, loop);
  const Eigen::Matrix2cd plain =
      su2_exp(0.9 * line_integral(tube, loop));
  CHECK((w.matrix - plain).norm() <= 1e-10);
  const Eigen::Matrix2cd brute =
      oracles::brute_ordered_product(tube, loop.traversal(), 0.0, 500);
  CHECK((w.matrix - brute).norm() <= 1e-7);
}

TEST_CASE("non-commuting transport matches a fine product integral") {
  const auto A = mixed_pot();
  const auto path = polyline_curve(
      {Vec2(-2.0, -1.0), Vec2(-0.8, 1.4), Vec2(1.2, 1.1), Vec2(2.4, -0.6)});
  const auto w = path_ordered_exponential(A, path);
  const Eigen::Matrix2cd brute =
      oracles::brute_ordered_product(A, path.traversal(), 0.0, 40000);
  CHECK((w.matrix - brute).norm() <= 1e-8);
}

TEST_CASE("ordered product converges at fourth order") {
  const auto A = mixed_pot();
  const auto path =
      polyline_curve({Vec2(-1.5, -0.8), Vec2(0.3, 1.2), Vec2(1.8, 0.4)});
  const auto ref = detail::path_ordered_fixed(A, path, 0.0, 4096);
  const double e64 =
      (detail::path_ordered_fixed(A, path, 0.0, 64).matrix - ref.matrix).norm();
  const double e128 =
      (detail::path_ordered_fixed(A, path, 0.0, 128).matrix - ref.matrix)
          .norm();
  CHECK(e64 / e128 > 9.0);
  CHECK(e64 / e128 < 30.0);
}

// The adaptive product's acceptance factor assumes the single step is sixth
// order, so the error ratio under halving must sit near 2^6.
TEST_CASE("adaptive step converges at sixth order") {
  const auto A = mixed_pot();
  const auto path =
      polyline_curve({Vec2(-1.5, -0.8), Vec2(0.3, 1.2), Vec2(1.8, 0.4)});
  const auto ref = detail::path_ordered_fixed6(A, path, 0.0, 1024);
  const double e8 =
      (detail::path_ordered_fixed6(A, path, 0.0, 8).matrix - ref.matrix).norm();
  const double e16 =
      (detail::path_ordered_fixed6(A, path, 0.0, 16).matrix - ref.matrix)
          .norm();
  const double e32 =
      (detail::path_ordered_fixed6(A, path, 0.0, 32).matrix - ref.matrix)
          .norm();
  CHECK(e8 / e16 > 40.0);
  CHECK(e8 / e16 < 100.0);
  CHECK(e16 / e32 > 40.0);
  CHECK(e16 / e32 < 100.0);
}

TEST_CASE("operator ordering puts the end of the curve leftmost") {
  // Two straight legs through two constant, non-commuting field regions.
  const double alpha = 0.8, beta = 1.2, g0 = 0.9;
  GaugePotential A;
  A.basis = LieAlgebraBasis::su2(g0);
  A.background = [=](const Vec2& x, double) {
    AlgebraField f = AlgebraField::Zero();
    if (x.y() < 0.5)
      f(0, 0) = alpha;  // x-directed leg feels T_1
    else
      f(2, 1) = beta;  // upper half of the y-directed leg feels T_3
    return f;
  };
  const auto path =
      polyline_curve({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1)});
  const auto w = path_ordered_exponential(A, path);

  const Eigen::Matrix2cd first = su2_exp(Eigen::Vector3d(g0 * alpha, 0, 0));
  const Eigen::Matrix2cd second =
      su2_exp(Eigen::Vector3d(0, 0, g0 * beta * 0.5));
  CHECK((w.matrix - second * first).norm() <= 1e-10);
  CHECK((w.matrix - first * second).norm() > 1e-2);
}

TEST_CASE("transport is multiplicative across curve splits") {
  const auto A = mixed_pot();
  const std::vector<Vec2> pts = {Vec2(-2.2, 0.4), Vec2(-0.7, 1.6),
                                 Vec2(0.9, 0.8), Vec2(2.1, 1.9)};
  const auto whole = path_ordered_exponential(A, polyline_curve(pts));
  const auto first =
      path_ordered_exponential(A, polyline_curve({pts[0], pts[1], pts[2]}));
  const auto second =
      path_ordered_exponential(A, polyline_curve({pts[2], pts[3]}));
  CHECK((compose(second, first).matrix - whole.matrix).norm() <= 1e-9);
}

TEST_CASE("transports only depend on endpoints and winding") {
  const auto A = ab_pot(1.3);
  const Vec2 a(-2, -2), b(2, 2);
  // Both routes pass the flux line on the same side.
  const auto low = polyline_curve({a, Vec2(1.5, -1.8), b});
  const auto low2 = polyline_curve({a, Vec2(0.4, -0.9), Vec2(2.1, -0.3), b});
  const Complex u1v = path_ordered_exponential(A, low).matrix(0, 0);
  const Complex u2v = path_ordered_exponential(A, low2).matrix(0, 0);
  CHECK(std::abs(u1v - u2v) <= 1e-12);

  // Routing around the other side differs by the enclosed flux.
  const auto high = polyline_curve({a, Vec2(-1.5, 1.8), b});
  const Complex u3v = path_ordered_exponential(A, high).matrix(0, 0);
  CHECK(std::abs(u3v / u1v - std::exp(Complex(0, -1.3))) <= 1e-12);

  const auto B = mixed_pot();
  const auto p1 = polyline_curve({a, Vec2(1.2, -1.4), b});
  const auto p2 = polyline_curve({a, Vec2(0.3, -0.8), Vec2(1.9, 0.1), b});
  CHECK((path_ordered_exponential(B, p1).matrix -
         path_ordered_exponential(B, p2).matrix)
            .norm() <= 1e-8);
}

TEST_CASE("holonomy phases, winding additivity, and flux periodicity") {
  const auto loop = circle_curve(kFluxCenter, 1.7, 1, 128);
  const auto u = holonomy(ab_pot(1.3), loop);
  CHECK(std::abs(u.matrix(0, 0) - std::exp(Complex(0, 1.3))) <= 1e-12);

  const auto shifted = holonomy(ab_pot(1.3 + 2 * pi), loop);
  CHECK(std::abs(shifted.matrix(0, 0) - u.matrix(0, 0)) <= 1e-10);

  const auto twice = holonomy(ab_pot(1.3), circle_curve(kFluxCenter, 1.7, 2, 128));
  CHECK(std::abs(twice.matrix(0, 0) - std::exp(Complex(0, 2 * 1.3))) <= 1e-6);

  CHECK(std::abs(holonomy(ab_pot(1.3), circle_curve(Vec2(5, 5), 1.0, 1, 64))
                     .matrix(0, 0) -
                 Complex(1, 0)) <= 1e-8);

  // g0 * magnitude = 2 pi rotates by 2 pi in SU(2): holonomy is -identity.
  const auto tube = tube_pot(2.0 * pi / 0.9);
  const auto w = holonomy(tube, loop);
  CHECK((w.matrix + Eigen::Matrix2cd::Identity()).norm() <= 1e-10);

  // Radius independence outside the core.
  const auto w2 = holonomy(tube_pot(1.1), circle_curve(kFluxCenter, 0.6, 1, 64));
  const auto w3 = holonomy(tube_pot(1.1), circle_curve(kFluxCenter, 2.9, 1, 256));
  CHECK((w2.matrix - w3.matrix).norm() <= 1e-8);

  CHECK_THROWS_AS(holonomy(ab_pot(1.0), segment_curve(Vec2(0, 0), Vec2(1, 0))),
                  ValidationError);
}

TEST_CASE("transports are gauge covariant") {
  const auto A = ab_pot(1.3);
  const auto g = random_smooth_gauge(29, GaugeGroup::U1, 4, 0.5, plane_grid());
  const auto Ap = apply_gauge_to_potential(A, g);
  const auto open = polyline_curve({Vec2(-2, 0.5), Vec2(0.3, 1.9), Vec2(2, 0.2)});
  const Complex w = path_ordered_exponential(A, open).matrix(0, 0);
  const Complex wp = path_ordered_exponential(Ap, open).matrix(0, 0);
  const Complex want = std::exp(Complex(0, g.lambda(open.end()))) * w *
                       std::exp(Complex(0, -g.lambda(open.start())));
  CHECK(std::abs(wp - want) <= 1e-12);

  const auto tube = tube_pot(1.1);
  const auto gn = random_smooth_gauge(31, GaugeGroup::SU2, 3, 0.4, plane_grid());
  const auto tubep = apply_gauge_to_potential(tube, gn);
  const auto wbase = path_ordered_exponential(tube, open);
  const auto wprime = path_ordered_exponential(tubep, open);
  const Eigen::Matrix2cd covariant = gn.unitary(open.end()) * wbase.matrix *
                                     gn.unitary(open.start()).adjoint();
  CHECK((wprime.matrix - covariant).norm() <= 1e-8);
}

TEST_CASE("group elements compose, invert, and reject defects") {
  const auto A = mixed_pot();
  const auto path = polyline_curve({Vec2(-1.8, 0.2), Vec2(0.1, 1.3), Vec2(1.7, -0.4)});
  const auto w = path_ordered_exponential(A, path);
  const auto wid = identity_element(A.basis);
  CHECK((compose(w, wid).matrix - w.matrix).norm() <= 1e-14);
  CHECK((compose(w, inverse(w)).matrix - Eigen::Matrix2cd::Identity()).norm() <=
        1e-12);

  const auto wrev = path_ordered_exponential(A, reversed(path));
  CHECK((wrev.matrix - inverse(w).matrix).norm() <= 1e-10);

  const auto uab = path_ordered_exponential(ab_pot(1.0), path);
  CHECK_THROWS_AS(compose(w, uab), ValidationError);

  GroupElement tampered;
  tampered.basis = A.basis;
  tampered.matrix = 1.1 * Eigen::Matrix2cd::Identity();
  CHECK_THROWS_AS(compose(tampered, wid), NumericError);
  CHECK_THROWS_AS(group_element(tampered.matrix, A.basis), NumericError);
}

TEST_CASE("curves must stay clear of cores and flux lines") {
  const auto solid = solenoid_potential(Vec2(0.5, 0.5), 1.0, 0.4);
  CHECK_THROWS_AS(line_integral(solid, segment_curve(Vec2(-1, 0.5), Vec2(2, 0.5))),
                  ValidationError);
  // Tangent-but-clear curve passes.
  CHECK_NOTHROW(line_integral(solid, segment_curve(Vec2(-1, 1.2), Vec2(2, 1.2))));

  const auto ideal = ab_pot(1.0);
  CHECK_THROWS_AS(
      line_integral(ideal, polyline_curve({kFluxCenter - Vec2(1, 0),
                                           kFluxCenter + Vec2(1, 0)})),
      ValidationError);
  CHECK_NOTHROW(line_integral(
      ideal, polyline_curve({kFluxCenter - Vec2(1, 0) + Vec2(0, 0.05),
                             kFluxCenter + Vec2(1, 0) + Vec2(0, 0.05)})));
}

#pragma once
#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "holoq/gauge.hpp"
#include "holoq/geometry.hpp"

namespace holoq {

// Piecewise-linear curve.  A closed curve does not repeat its first point; the
// closing segment back to points.front() is implicit.
struct Curve {
  std::vector<Vec2> points;
  bool closed = false;
  std::string label;

  void validate() const;
  double length() const;
  Vec2 start() const { return points.front(); }
  Vec2 end() const { return closed ? points.front() : points.back(); }
  // Vertex list with the implicit closure appended for closed curves.
  std::vector<Vec2> traversal() const;
};

Curve segment_curve(const Vec2& a, const Vec2& b, int pieces = 1);
Curve polyline_curve(std::vector<Vec2> pts, bool closed = false);
// |winding| full laps, oriented counterclockwise for winding > 0.
Curve circle_curve(const Vec2& center, double radius, int winding = 1,
                   int samples_per_turn = 128);
Curve arc_curve(const Vec2& center, double radius, double theta0, double theta1,
                int segments = 64);
Curve concat(const Curve& a, const Curve& b);  // open curves, a.end == b.start
Curve reversed(const Curve& c);
Curve translated(const Curve& c, const Vec2& offset);
// Marks an open curve whose endpoints coincide as closed (drops the duplicate
// trailing vertex).
Curve as_closed(const Curve& c);

struct GroupElement {
  Eigen::MatrixXcd matrix;
  LieAlgebraBasis basis;
};

// Checked constructor: dimension must match the basis and the matrix must be
// unitary within 1e-10 (products of exponentials can only fail this through a
// numerical defect).
GroupElement group_element(Eigen::MatrixXcd m, const LieAlgebraBasis& basis);
GroupElement identity_element(const LieAlgebraBasis& basis);

struct LineIntegralOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  int max_levels = 12;  // trapezoid halvings per segment before giving up
};

// Componentwise integral of A along the curve.  Flux-line and pure-gradient
// contributions are evaluated in closed form; only free-form backgrounds (and
// segments dipping inside a finite flux core) need quadrature.
AlgebraCoeffs line_integral(const GaugePotential& A, const Curve& curve,
                            double t = 0.0,
                            const LineIntegralOptions& opt = {});

struct PathOrderOptions {
  int initial_pieces = 16;  // spread over the curve in proportion to length
  int max_depth = 30;       // bisection levels below a base piece before giving up
  double tol = 1e-12;  // whole-curve error budget for the ordered product
  LineIntegralOptions integral;
};

// Ordered product of segment exponentials, the factor nearest the curve's end
// applied leftmost.  Reduces to a plain exponential whenever the potential
// stays inside one commuting algebra direction.
GroupElement path_ordered_exponential(const GaugePotential& A,
                                      const Curve& curve, double t = 0.0,
                                      const PathOrderOptions& opt = {});

// path_ordered_exponential around a closed curve.
GroupElement holonomy(const GaugePotential& A, const Curve& loop,
                      double t = 0.0, const PathOrderOptions& opt = {});

GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);

namespace detail {
// Non-adaptive fourth-order Magnus product with a fixed piece budget; exposed
// for convergence studies.
GroupElement path_ordered_fixed(const GaugePotential& A, const Curve& curve,
                                double t, int pieces);
// Same with the sixth-order step used by the adaptive product, again with a
// fixed per-segment piece count so tests can measure the convergence order.
GroupElement path_ordered_fixed6(const GaugePotential& A, const Curve& curve,
                                 double t, int pieces);
// Shared precondition check: the curve must stay clear of excluded regions and
// must not pass through an idealized flux line.
void check_curve_clearance(const GaugePotential& A, const Curve& curve);
}  // namespace detail

}  // namespace holoq

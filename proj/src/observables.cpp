#include "holoq/observables.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "holoq/errors.hpp"
#include "holoq/geometry.hpp"
#include "holoq/parallel.hpp"

namespace holoq {

namespace {

constexpr double kSupportThreshold = 1e-12;   // absolute amplitude floor
constexpr double kOverlapThreshold = 1e-16;   // relative, on pointwise products
constexpr double kEndpointTol = 1e-12;

double point_norm(const WaveFunction& psi, std::size_t flat) {
  double s = 0.0;
  for (int c = 0; c < psi.internal_dim; ++c) s += std::norm(psi.at(flat, c));
  return std::sqrt(s);
}

// The operator acts with the curve rigidly translated to every base point in
// the state's support; it is ill-defined if any of those copies runs through
// an excluded region or exactly through an idealized flux axis.
void check_swept_clearance(const GaugePotential& A, const Curve& tmpl,
                           const WaveFunction& psi,
                           const std::vector<std::size_t>& support) {
  std::vector<Disc> discs;
  for (const auto& d : A.excluded_regions)
    if (d.radius > 0.0) discs.push_back(d);
  std::vector<Vec2> axes;
  for (const auto& line : A.flux_lines)
    if (line.core_radius <= 0.0) axes.push_back(line.center);
  if (discs.empty() && axes.empty()) return;

  const Vec2 t0 = tmpl.start();
  const auto pts = tmpl.traversal();
  for (const std::size_t flat : support) {
    const Vec2 shift = psi.grid.coord(flat) - t0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Vec2 a = pts[i - 1] + shift;
      const Vec2 b = pts[i] + shift;
      for (const auto& d : discs)
        if (segment_hits_disc(a, b, d))
          throw ValidationError(
              "displaced curve crosses an excluded region where the state is "
              "non-negligible");
      for (const auto& c : axes)
        if (segment_point_distance(a, b, c) < 1e-12)
          throw ValidationError(
              "displaced curve passes through an idealized flux line where "
              "the state is non-negligible");
    }
  }
}

Eigen::MatrixXcd wilson_matrix(const GaugePotential& A, const Curve& tmpl,
                               const Vec2& base, double time,
                               const PathOrderOptions& opt) {
  const Curve moved = translated(tmpl, base - tmpl.start());
  return path_ordered_exponential(A, moved, time, opt).matrix;
}

void multiply_in_place(WaveFunction& psi, std::size_t flat,
                       const Eigen::MatrixXcd& w) {
  if (psi.internal_dim == 1) {
    psi.at(flat) = w(0, 0) * psi.at(flat);
    return;
  }
  const Eigen::Vector2cd v(psi.at(flat, 0), psi.at(flat, 1));
  const Eigen::Vector2cd out = w * v;
  psi.at(flat, 0) = out(0);
  psi.at(flat, 1) = out(1);
}

void check_open_at(const Curve& c, const char* what) {
  if (c.closed)
    throw ValidationError(std::string(what) + " must be an open curve");
}

}  // namespace

namespace detail {

std::vector<std::size_t> support_points(const WaveFunction& psi,
                                        double threshold) {
  std::vector<std::size_t> out;
  const std::size_t n = psi.grid.total_points();
  for (std::size_t i = 0; i < n; ++i)
    if (point_norm(psi, i) > threshold) out.push_back(i);
  return out;
}

}  // namespace detail

Vec2 NonlocalOperatorSpec::displacement() const {
  return curve.end() - curve.start();
}

void NonlocalOperatorSpec::validate(const WaveFunction& psi) const {
  curve.validate();
  check_open_at(curve, "displacement operator curve");
  potential.basis.validate();
  psi.grid.validate();
  if (psi.internal_dim != potential.basis.matrix_dim())
    throw ValidationError(
        "state internal dimension does not match the gauge group");
  if (psi.grid.dim == 1) {
    for (const auto& p : curve.points)
      if (std::abs(p.y()) > kEndpointTol)
        throw ValidationError(
            "curve leaves the line of a one-dimensional grid");
  }
}

WaveFunction apply_f_ell(const NonlocalOperatorSpec& spec,
                         const WaveFunction& psi, double time) {
  spec.validate(psi);
  if (!spec.potential.abelian())
    throw ValidationError(
        "straight-segment displacement is defined for Abelian potentials "
        "only");
  const Vec2 ell = spec.displacement();
  const double len = ell.norm();
  if (len <= 0.0)
    throw ValidationError("straight-segment displacement must be nonzero");
  for (std::size_t i = 1; i < spec.curve.points.size(); ++i) {
    const Vec2 d = spec.curve.points[i] - spec.curve.points[i - 1];
    if (std::abs(cross2(d, ell)) > 1e-12 * d.norm() * len ||
        d.dot(ell) <= 0.0)
      throw ValidationError(
          "straight-segment displacement needs a straight, forward-running "
          "curve");
  }
  return apply_g_gamma(spec, psi, time);
}

WaveFunction apply_g_gamma(const NonlocalOperatorSpec& spec,
                           const WaveFunction& psi, double time) {
  spec.validate(psi);
  const auto support = detail::support_points(psi, kSupportThreshold);
  check_swept_clearance(spec.potential, spec.curve, psi, support);

  WaveFunction out = psi;  // below-threshold amplitudes ride along unchanged
  parallel_for(support.size(), [&](std::size_t j) {
    const std::size_t flat = support[j];
    const Eigen::MatrixXcd w =
        wilson_matrix(spec.potential, spec.curve, psi.grid.coord(flat), time,
                      spec.transport);
    multiply_in_place(out, flat, w);
  });
  return translate(out, spec.displacement());
}

Complex g_gamma_expectation(const NonlocalOperatorSpec& spec,
                            const WaveFunction& psi, double time) {
  spec.validate(psi);
  const auto support = detail::support_points(psi, kSupportThreshold);
  check_swept_clearance(spec.potential, spec.curve, psi, support);

  // <psi, T_ell W psi> = <T_{-ell} psi, W psi>: only points where both
  // factors are non-negligible contribute, which keeps the number of
  // transport evaluations proportional to the packet overlap region.
  const WaveFunction shifted = translate(psi, -spec.displacement());
  const std::size_t n = psi.grid.total_points();
  std::vector<double> product(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    product[i] = point_norm(shifted, i) * point_norm(psi, i);
    peak = std::max(peak, product[i]);
  }
  if (peak == 0.0) return Complex(0.0, 0.0);

  std::vector<std::size_t> mask;
  for (std::size_t i = 0; i < n; ++i)
    if (product[i] > kOverlapThreshold * peak) mask.push_back(i);

  std::vector<Complex> contrib(mask.size());
  parallel_for(mask.size(), [&](std::size_t j) {
    const std::size_t flat = mask[j];
    const Eigen::MatrixXcd w =
        wilson_matrix(spec.potential, spec.curve, psi.grid.coord(flat), time,
                      spec.transport);
    Complex c(0.0, 0.0);
    if (psi.internal_dim == 1) {
      c = std::conj(shifted.at(flat)) * w(0, 0) * psi.at(flat);
    } else {
      const Eigen::Vector2cd a(shifted.at(flat, 0), shifted.at(flat, 1));
      const Eigen::Vector2cd b(psi.at(flat, 0), psi.at(flat, 1));
      c = a.dot(w * b);  // Eigen's dot conjugates the first factor
    }
    contrib[j] = c;
  });
  Complex total(0.0, 0.0);
  for (const Complex& c : contrib) total += c;
  return total * std::pow(psi.grid.spacing, psi.grid.dim);
}

std::pair<WaveFunction, WaveFunction> build_ab_packets(
    const WaveFunction& psi10, const WaveFunction& psi20, const Curve& gamma1,
    const Curve& gamma2, const GaugePotential& A, const Vec2& base,
    double time) {
  if (!psi10.grid.same_as(psi20.grid) ||
      psi10.internal_dim != psi20.internal_dim)
    throw ValidationError("packet pair must live on one grid");
  A.basis.validate();
  if (psi10.internal_dim != A.basis.matrix_dim())
    throw ValidationError(
        "state internal dimension does not match the gauge group");
  gamma1.validate();
  gamma2.validate();
  check_open_at(gamma1, "dressing path");
  check_open_at(gamma2, "dressing path");
  if ((gamma1.start() - base).norm() > kEndpointTol ||
      (gamma2.start() - base).norm() > kEndpointTol)
    throw ValidationError("dressing paths must start at the common base point");

  const PathOrderOptions opt = sweep_path_options();
  std::vector<Disc> discs;
  for (const auto& d : A.excluded_regions)
    if (d.radius > 0.0) discs.push_back(d);

  auto dress = [&](const WaveFunction& psi0, const Curve& fixed) {
    detail::check_curve_clearance(A, fixed);
    const Vec2 anchor = fixed.end();
    const auto support = detail::support_points(psi0, kSupportThreshold);
    for (const std::size_t flat : support) {
      const Vec2 x = psi0.grid.coord(flat);
      if ((x - anchor).norm() <= kEndpointTol) continue;
      for (const auto& d : discs)
        if (segment_hits_disc(anchor, x, d))
          throw ValidationError(
              "straight dressing extension crosses an excluded region where "
              "the state is non-negligible");
    }
    WaveFunction out = psi0;
    parallel_for(support.size(), [&](std::size_t j) {
      const std::size_t flat = support[j];
      const Vec2 x = psi0.grid.coord(flat);
      const Curve path = ((x - anchor).norm() <= kEndpointTol)
                             ? fixed
                             : concat(fixed, segment_curve(anchor, x));
      const Eigen::MatrixXcd w =
          path_ordered_exponential(A, path, time, opt).matrix;
      multiply_in_place(out, flat, w);
    });
    return out;
  };

  return {dress(psi10, gamma1), dress(psi20, gamma2)};
}

ReductionResult closed_loop_reduction_check(const WaveFunction& psi1_0,
                                            const WaveFunction& psi2_0,
                                            const Curve& gamma1,
                                            const Curve& gamma2,
                                            const Curve& gamma,
                                            const GaugePotential& A,
                                            double time) {
  gamma.validate();
  check_open_at(gamma, "interference curve");
  if ((gamma.start() - gamma2.end()).norm() > kEndpointTol ||
      (gamma.end() - gamma1.end()).norm() > kEndpointTol)
    throw ValidationError(
        "interference curve must run from the second packet's site to the "
        "first's");
  if ((gamma1.start() - gamma2.start()).norm() > kEndpointTol)
    throw ValidationError("dressing paths must share their base point");

  const Vec2 ell = gamma.end() - gamma.start();
  const double norm_scale = psi1_0.norm() * psi2_0.norm();
  const double overlap_tol = 1e-8 * std::max(norm_scale, 1e-300);
  const WaveFunction shifted1 = translate(psi1_0, -ell);
  if (std::abs(inner_product(psi1_0, psi2_0)) > overlap_tol ||
      std::abs(inner_product(shifted1, psi1_0)) > overlap_tol ||
      std::abs(inner_product(translate(psi2_0, -ell), psi2_0)) > overlap_tol)
    throw ValidationError(
        "interference reduction needs packets disjoint from each other and "
        "from their own displaced copies");

  auto [psi1, psi2] =
      build_ab_packets(psi1_0, psi2_0, gamma1, gamma2, A, gamma1.start(), time);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const WaveFunction psi = superpose(psi1, psi2, inv_sqrt2, inv_sqrt2);

  NonlocalOperatorSpec spec;
  spec.curve = gamma;
  spec.potential = A;
  const Complex lhs = g_gamma_expectation(spec, psi, time);

  const Curve loop =
      as_closed(concat(concat(gamma2, gamma), reversed(gamma1)));
  const Eigen::MatrixXcd u0 = holonomy(A, loop, time).matrix;
  WaveFunction rotated = psi2_0;
  const std::size_t n = rotated.grid.total_points();
  for (std::size_t i = 0; i < n; ++i) multiply_in_place(rotated, i, u0);
  const Complex rhs = cross_term_factor * inner_product(shifted1, rotated);
  return {lhs, rhs};
}

}  // namespace holoq

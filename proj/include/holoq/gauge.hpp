#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "holoq/geometry.hpp"
#include "holoq/grid.hpp"

namespace holoq {

enum class GaugeGroup { U1, SU2 };

// Lie-algebra coefficients; U1 uses row 0 only.
using AlgebraCoeffs = Eigen::Vector3d;
// (algebra component, spatial component) — column 0 is x, column 1 is y.
using AlgebraField = Eigen::Matrix<double, 3, 2>;

struct LieAlgebraBasis {
  GaugeGroup group = GaugeGroup::U1;
  double coupling = 1.0;  // charge q for U1, g0 for SU2
  std::vector<Eigen::MatrixXcd> generators;  // empty for U1, sigma_k/2 for SU2

  static LieAlgebraBasis u1(double charge = 1.0);
  static LieAlgebraBasis su2(double g0);

  int matrix_dim() const { return group == GaugeGroup::U1 ? 1 : 2; }
  int algebra_dim() const { return group == GaugeGroup::U1 ? 1 : 3; }
  // sum_k c_k T_k as a matrix_dim() x matrix_dim() matrix (U1: [[c0]]).
  Eigen::MatrixXcd combine(const AlgebraCoeffs& c) const;
  bool same_as(const LieAlgebraBasis& other) const;
  void validate() const;
};

// Idealized (or finite-core) straight flux line through `center`, normal to the
// plane.  `flux` holds the loop integral picked up by one counterclockwise
// enclosure, per algebra component.
struct FluxLine {
  Vec2 center = Vec2::Zero();
  AlgebraCoeffs flux = AlgebraCoeffs::Zero();
  double core_radius = 0.0;
};

// Pure-gradient contribution with a known antiderivative, added to algebra
// row 0.  Keeping the antiderivative lets line integrals use endpoint
// differences instead of quadrature.
struct ExactScalar {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
};

// Field of a single flux line at position x: the circulating profile outside
// the core, solid-body inside, zero on the axis itself.
AlgebraField flux_line_field(const FluxLine& line, const Vec2& x);

struct GaugePotential {
  LieAlgebraBasis basis;
  std::vector<FluxLine> flux_lines;
  std::vector<ExactScalar> exact_scalars;
  // Arbitrary sampled background; may be empty.  Evaluated pointwise, so line
  // integrals over it fall back to quadrature.
  std::function<AlgebraField(const Vec2&, double)> background;
  std::vector<Disc> excluded_regions;

  AlgebraField value(const Vec2& x, double t) const;
  bool abelian() const { return basis.group == GaugeGroup::U1; }
  // If every contribution points along one fixed algebra direction (and there
  // is no free-form background), returns that unit direction; otherwise empty.
  // Along such a direction ordered exponentials reduce to scalar integrals.
  std::optional<Eigen::Vector3d> commuting_direction() const;
};

GaugePotential solenoid_potential(const Vec2& center, double flux,
                                  double core_radius, double charge = 1.0);

GaugePotential nonabelian_flux_tube(const Vec2& center,
                                    const Eigen::Vector3d& flux_direction,
                                    double flux_magnitude, double core_radius,
                                    double g0);

struct GaugeTransformation {
  enum class Kind { Abelian, NonAbelian };
  Kind kind = Kind::Abelian;

  // Abelian payload: x -> Lambda(x) and its analytic gradient.
  std::function<double(const Vec2&)> lambda;
  std::function<Vec2(const Vec2&)> lambda_gradient;

  // Non-Abelian payload: x -> U(x) and x -> {d_x U, d_y U}.
  std::function<Eigen::Matrix2cd(const Vec2&)> unitary;
  std::function<std::array<Eigen::Matrix2cd, 2>(const Vec2&)> unitary_gradient;

  GaugeTransformation inverse() const;
};

GaugePotential apply_gauge_to_potential(const GaugePotential& A,
                                        const GaugeTransformation& g);

WaveFunction apply_gauge_to_wavefunction(const WaveFunction& psi,
                                         const GaugeTransformation& g,
                                         const LieAlgebraBasis& basis);

// Deterministic band-limited random transformation on the periodic domain.
// Abelian: Lambda is a sum of random Fourier modes with |m| <= band_limit.
// Non-Abelian: U = exp(i sum_k lambda_k T_k) with three such fields; the
// gradient comes from the eigendecomposition of the exponent, not from finite
// differences.
GaugeTransformation random_smooth_gauge(std::uint64_t seed, GaugeGroup kind,
                                        int band_limit, double amplitude,
                                        const GridSpec& domain);

}  // namespace holoq

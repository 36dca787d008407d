#pragma once
#include <vector>

#include "holoq/geometry.hpp"
#include "holoq/grid.hpp"
#include "holoq/transport.hpp"

namespace holoq {

// Locally flat plane with an angular defect concentrated at one point.  The
// exterior is Euclidean; carrying a frame across the identification seam — the
// ray leaving the apex in the -x direction — rotates it by the defect angle.
// Defects that differ by a full turn produce identical rotation matrices but
// different accumulated transport angles, so both are admitted.
struct ConeGeometry {
  Vec2 apex = Vec2::Zero();
  double deficit_angle = 0.0;  // strictly inside (-2 pi, 2 pi)
  double core_radius = 0.0;

  void validate() const;
  // Distance from a point to the identification seam ray.
  double seam_distance(const Vec2& p) const;
};

// Rigid motion of the plane in apex-relative coordinates: y -> rot(R) y + t.
// The angle is kept unwrapped; rot(R) itself is periodic, the stored value is
// not.
struct PoincareElement {
  double rotation = 0.0;
  Vec2 translation = Vec2::Zero();

  static PoincareElement identity() { return {}; }
  Vec2 apply(const Vec2& y) const { return rot2(rotation) * y + translation; }
};

// a after b: (Ra + Rb, ta + rot(Ra) tb).
PoincareElement compose(const PoincareElement& a, const PoincareElement& b);
PoincareElement inverse(const PoincareElement& e);

// Frame transport along a piecewise-linear curve.  The rotation is the defect
// times the net signed seam crossings; the translation carries the developed
// start to the developed end, so a closed loop winding once about the apex
// comes out as the rotation by the defect about the loop's own base point:
// (deficit, (I - rot(deficit)) (base - apex)).  Transport over concatenated
// curves composes exactly.
PoincareElement poincare_transport(const ConeGeometry& geom, const Curve& curve);

struct FrameSample {
  double arclength = 0.0;
  double tangent_angle = 0.0;  // unwrapped direction of the local tangent
  double frame_angle = 0.0;    // unwrapped direction of the transported frame
};

// Record of carrying a frame vector around a closed loop, launched along the
// initial tangent and compared with the tangent as it goes.  The holonomy
// matrix only sees the defect mod 2 pi; the unwrapped frame-minus-tangent
// total separates defects a full turn apart, which an internal-space holonomy
// cannot do.
struct FrameTransportReport {
  double holonomy_rotation = 0.0;          // defect * winding, unwrapped
  double frame_minus_tangent_total = 0.0;  // last sample minus first
  std::vector<FrameSample> samples;
};

FrameTransportReport tangent_frame_distinguishability(const ConeGeometry& geom,
                                                      const Curve& loop);

// Pullback of a scalar plane state by the rigid motion, positions measured
// from the apex: result(x) = psi(apex + rot(-R) ((x - apex) - t)).  Off-grid
// values come from the state's trigonometric interpolant, so points pushed
// outside the domain read the periodic extension.
WaveFunction apply_rigid_motion(const WaveFunction& psi,
                                const PoincareElement& g, const Vec2& apex);

// Interference term between two displaced packets when the second branch is
// carried around the composite loop gamma2 -> gamma -> reversed gamma1:
//   1/2 <translate(psi10, -ell) | loop motion applied to psi20>,
// with ell the end-to-end vector of gamma.  Packets (and the transported
// image of the second one) must keep five widths of clearance from the seam
// and from the core.
Complex gravitational_ab_expectation(const WaveFunction& psi10,
                                     const WaveFunction& psi20,
                                     const Curve& gamma1, const Curve& gamma2,
                                     const Curve& gamma,
                                     const ConeGeometry& geom);

}  // namespace holoq

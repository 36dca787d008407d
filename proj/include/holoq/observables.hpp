#pragma once
#include <utility>

#include "holoq/gauge.hpp"
#include "holoq/grid.hpp"
#include "holoq/transport.hpp"

namespace holoq {

// Weight of the interference term when a state is prepared as an equal
// superposition (psi1 + psi2)/sqrt(2): each branch carries 1/sqrt(2).
inline constexpr double cross_term_factor = 0.5;

inline PathOrderOptions sweep_path_options() {
  PathOrderOptions opt;
  opt.tol = 1e-10;  // per-base-point transports; looser than single-shot use
  return opt;
}

// A displacement operator templated on an open curve: at every base point x
// the curve is rigidly translated to start at x, a Wilson line is accumulated
// along it, and the state is shifted by the curve's end-to-end displacement.
struct NonlocalOperatorSpec {
  Curve curve;
  GaugePotential potential;
  PathOrderOptions transport = sweep_path_options();

  Vec2 displacement() const;
  void validate(const WaveFunction& psi) const;
};

// Straight-curve, Abelian special case; rejects anything else.
WaveFunction apply_f_ell(const NonlocalOperatorSpec& spec,
                         const WaveFunction& psi, double time = 0.0);

WaveFunction apply_g_gamma(const NonlocalOperatorSpec& spec,
                           const WaveFunction& psi, double time = 0.0);

// <psi | g | psi>, evaluated over the overlap region of psi and its
// back-translate; exactly equals inner_product(psi, apply_g_gamma(...)).
Complex g_gamma_expectation(const NonlocalOperatorSpec& spec,
                            const WaveFunction& psi, double time = 0.0);

// Dress two localized packets with transport factors from a common base point:
// psi_i(x) = W(base -> end of gamma_i -> x) psi_i0(x), the last hop being a
// straight segment.
std::pair<WaveFunction, WaveFunction> build_ab_packets(
    const WaveFunction& psi10, const WaveFunction& psi20, const Curve& gamma1,
    const Curve& gamma2, const GaugePotential& A, const Vec2& base,
    double time = 0.0);

struct ReductionResult {
  Complex lhs;  // expectation on the dressed superposition
  Complex rhs;  // cross_term_factor * <shifted psi10 | loop holonomy psi20>
};

// Compares the interference term of <g> on (psi1 + psi2)/sqrt(2) against the
// closed-loop form: the three transports collapse onto the loop
// gamma2 -> gamma -> reversed(gamma1) with a single constant holonomy.
ReductionResult closed_loop_reduction_check(const WaveFunction& psi1_0,
                                            const WaveFunction& psi2_0,
                                            const Curve& gamma1,
                                            const Curve& gamma2,
                                            const Curve& gamma,
                                            const GaugePotential& A,
                                            double time = 0.0);

namespace detail {
// Flat indices whose pointwise internal norm exceeds the absolute threshold.
std::vector<std::size_t> support_points(const WaveFunction& psi,
                                        double threshold = 1e-12);
}  // namespace detail

}  // namespace holoq

#pragma once
#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "holoq/errors.hpp"
#include "holoq/geometry.hpp"

namespace holoq {

// Uniform periodic grid, 1 or 2 dimensions, power-of-two points per axis.
// Coordinates along axis a run origin[a] + i * spacing for i in [0, N).
struct GridSpec {
  int dim = 1;
  int points_per_axis = 1024;
  double spacing = 0.05;
  Vec2 origin = Vec2::Zero();

  void validate() const;
  std::size_t total_points() const;
  double extent() const { return points_per_axis * spacing; }
  int axis_index(std::size_t flat, int axis) const;
  Vec2 coord(std::size_t flat) const;
  // FFT-ordered wavenumber for a given per-axis index.
  double wavenumber(int index) const;
  bool same_as(const GridSpec& o) const;
};

// Complex amplitudes over a grid with an optional internal (spinor) index.
// Layout: amp[flat * internal_dim + component].
struct WaveFunction {
  GridSpec grid;
  int internal_dim = 1;
  Eigen::VectorXcd amp;

  static WaveFunction zero(const GridSpec& g, int internal_dim = 1);

  Complex& at(std::size_t flat, int c = 0) { return amp[flat * internal_dim + c]; }
  const Complex& at(std::size_t flat, int c = 0) const { return amp[flat * internal_dim + c]; }

  double squared_norm() const;  // Riemann sum, spacing^dim weight
  double norm() const;
  WaveFunction normalized() const;
};

// Convex mixture of pure states (weights sum to 1 within 1e-12, shared grid).
struct DensityMatrix {
  std::vector<WaveFunction> states;
  std::vector<double> weights;

  DensityMatrix(std::vector<WaveFunction> s, std::vector<double> w);
};

using OperatorHandle = std::function<WaveFunction(const WaveFunction&)>;

// Normalized Gaussian envelope exp(-|x-c|^2 / (4 width^2)) times a plane-wave
// factor exp(i (momentum . x + phase)). The width must be resolvable (>= 2 spacing)
// and the periodic tail at the domain boundary must stay below 1e-12 of the peak.
// internal_dim == 2 attaches the given unit spinor at every point.
WaveFunction gaussian_packet(const GridSpec& grid, const Vec2& center, double width,
                             const Vec2& momentum = Vec2::Zero(), double phase = 0.0,
                             int internal_dim = 1,
                             const Eigen::Vector2cd& spinor = Eigen::Vector2cd(1.0, 0.0));

// ca * a + cb * b with no renormalization.
WaveFunction superpose(const WaveFunction& a, const WaveFunction& b, Complex ca, Complex cb);

// Spectral shift: result(x) = psi(x - ell). Equals the action of exp(-i p . ell)
// with hbar = 1, so it is exactly unitary on the periodic grid.
WaveFunction translate(const WaveFunction& psi, const Vec2& ell);

// Conjugate-linear in the first argument; Riemann sum over the grid.
Complex inner_product(const WaveFunction& a, const WaveFunction& b);

// <psi| p^n |psi> along an axis, evaluated spectrally (n <= 8). The value is real
// up to roundoff; the tiny imaginary residual is reported through imag_residual.
double momentum_moment(const WaveFunction& psi, int n, int axis = 0,
                       double* imag_residual = nullptr);

// tr(rho * op) = sum_i w_i <psi_i | op psi_i>.
Complex mixture_trace(const DensityMatrix& rho, const OperatorHandle& op);

OperatorHandle translation_operator(const Vec2& ell);

namespace detail {
// Run the DFT over every internal component of psi in place. sign -1 forward,
// +1 backward; the backward pass divides by the total point count.
void fft_components(WaveFunction& psi, int sign);
// Same along a single axis of a 2d state; the backward pass divides by
// points_per_axis.
void fft_axis(WaveFunction& psi, int axis, int sign);
}  // namespace detail

}  // namespace holoq

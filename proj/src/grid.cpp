#include "holoq/grid.hpp"

#include <cmath>
#include <numeric>

#include "holoq/fft.hpp"

namespace holoq {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

constexpr double kBoundaryTail = 1e-12;

}  // namespace

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw ValidationError("grid dim must be 1 or 2");
  if (!power_of_two(points_per_axis) || points_per_axis < 8)
    throw ValidationError("points_per_axis must be a power of two >= 8");
  if (!(spacing > 0.0)) throw ValidationError("grid spacing must be positive");
}

std::size_t GridSpec::total_points() const {
  std::size_t n = static_cast<std::size_t>(points_per_axis);
  return dim == 2 ? n * n : n;
}

int GridSpec::axis_index(std::size_t flat, int axis) const {
  const auto n = static_cast<std::size_t>(points_per_axis);
  if (axis == 0) return static_cast<int>(flat % n);
  return static_cast<int>(flat / n);
}

Vec2 GridSpec::coord(std::size_t flat) const {
  Vec2 x = origin;
  x.x() += axis_index(flat, 0) * spacing;
  if (dim == 2) x.y() += axis_index(flat, 1) * spacing;
  return x;
}

double GridSpec::wavenumber(int index) const {
  const int n = points_per_axis;
  const int m = index < n / 2 ? index : index - n;
  return 2.0 * pi * m / (n * spacing);
}

bool GridSpec::same_as(const GridSpec& o) const {
  return dim == o.dim && points_per_axis == o.points_per_axis && spacing == o.spacing &&
         origin == o.origin;
}

WaveFunction WaveFunction::zero(const GridSpec& g, int internal_dim) {
  g.validate();
  if (internal_dim != 1 && internal_dim != 2)
    throw ValidationError("internal_dim must be 1 or 2");
  WaveFunction psi;
  psi.grid = g;
  psi.internal_dim = internal_dim;
  psi.amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.total_points()) * internal_dim);
  return psi;
}

double WaveFunction::squared_norm() const {
  return amp.squaredNorm() * std::pow(grid.spacing, grid.dim);
}

double WaveFunction::norm() const { return std::sqrt(squared_norm()); }

WaveFunction WaveFunction::normalized() const {
  const double n = norm();
  if (n == 0.0) throw NumericError("cannot normalize the zero state");
  WaveFunction out = *this;
  out.amp /= n;
  return out;
}

DensityMatrix::DensityMatrix(std::vector<WaveFunction> s, std::vector<double> w)
    : states(std::move(s)), weights(std::move(w)) {
  if (states.empty() || states.size() != weights.size())
    throw ValidationError("density matrix needs matching nonempty states and weights");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("mixture weights must sum to 1 within 1e-12");
  for (const auto& psi : states) {
    if (!psi.grid.same_as(states.front().grid) ||
        psi.internal_dim != states.front().internal_dim)
      throw ValidationError("mixture states must share grid and internal dimension");
  }
  for (double wi : weights)
    if (wi < 0.0) throw ValidationError("mixture weights must be nonnegative");
}

WaveFunction gaussian_packet(const GridSpec& grid, const Vec2& center, double width,
                             const Vec2& momentum, double phase, int internal_dim,
                             const Eigen::Vector2cd& spinor) {
  grid.validate();
  if (width < 2.0 * grid.spacing)
    throw ValidationError("packet width below 2 grid spacings is not resolvable");
  if (grid.dim == 1 && (center.y() != 0.0 || momentum.y() != 0.0))
    throw ValidationError("1d packets must have zero transverse center and momentum");

  // Tail amplitude where the periodic domain wraps, per axis.
  const double L = grid.extent();
  for (int a = 0; a < grid.dim; ++a) {
    const double c = center[a] - grid.origin[a];
    if (c < 0.0 || c >= L) throw ValidationError("packet center outside the grid domain");
    const double d = std::min(c, L - c);
    if (std::exp(-d * d / (4.0 * width * width)) > kBoundaryTail)
      throw ValidationError("packet tail exceeds 1e-12 of peak at the domain boundary");
    // The momentum grid must resolve the carrier plus the envelope bandwidth.
    if (std::abs(momentum[a]) + 3.0 / width > pi / grid.spacing)
      throw ValidationError("packet momentum too large for the grid resolution");
  }

  WaveFunction psi = WaveFunction::zero(grid, internal_dim);
  const double prefactor = std::pow(2.0 * pi * width * width, -0.25 * grid.dim);
  Eigen::Vector2cd chi = Eigen::Vector2cd(1.0, 0.0);
  if (internal_dim == 2) {
    const double sn = spinor.norm();
    if (sn == 0.0) throw ValidationError("spinor must be nonzero");
    chi = spinor / sn;
  }
  const std::size_t n = grid.total_points();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 x = grid.coord(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      // nearest periodic image
      double d = std::remainder(x[a] - center[a], L);
      r2 += d * d;
    }
    const Complex value =
        prefactor * std::exp(-r2 / (4.0 * width * width)) *
        std::exp(Complex(0.0, momentum.dot(x) + phase));
    if (internal_dim == 1) {
      psi.at(i) = value;
    } else {
      psi.at(i, 0) = value * chi(0);
      psi.at(i, 1) = value * chi(1);
    }
  }
  return psi;
}

WaveFunction superpose(const WaveFunction& a, const WaveFunction& b, Complex ca, Complex cb) {
  if (!a.grid.same_as(b.grid) || a.internal_dim != b.internal_dim)
    throw ValidationError("superpose needs states on the same grid");
  WaveFunction out = a;
  out.amp = ca * a.amp + cb * b.amp;
  return out;
}

namespace detail {

void fft_components(WaveFunction& psi, int sign) {
  const int n = psi.grid.points_per_axis;
  const int n0 = psi.grid.dim == 2 ? n : n;
  const int n1 = psi.grid.dim == 2 ? n : 1;
  const std::size_t pts = psi.grid.total_points();
  if (psi.internal_dim == 1) {
    fft_inplace(psi.amp.data(), n0, n1, sign);
  } else {
    std::vector<Complex> buf(pts);
    for (int c = 0; c < psi.internal_dim; ++c) {
      for (std::size_t i = 0; i < pts; ++i) buf[i] = psi.at(i, c);
      fft_inplace(buf.data(), n0, n1, sign);
      for (std::size_t i = 0; i < pts; ++i) psi.at(i, c) = buf[i];
    }
  }
  if (sign == +1) psi.amp /= static_cast<double>(pts);
}

void fft_axis(WaveFunction& psi, int axis, int sign) {
  if (psi.grid.dim != 2) throw ValidationError("axis DFT needs a 2d grid");
  if (axis != 0 && axis != 1) throw ValidationError("axis must be 0 or 1");
  const int n = psi.grid.points_per_axis;
  const std::size_t pts = psi.grid.total_points();
  if (psi.internal_dim == 1) {
    fft_axis_inplace(psi.amp.data(), n, axis, sign);
  } else {
    std::vector<Complex> buf(pts);
    for (int c = 0; c < psi.internal_dim; ++c) {
      for (std::size_t i = 0; i < pts; ++i) buf[i] = psi.at(i, c);
      fft_axis_inplace(buf.data(), n, axis, sign);
      for (std::size_t i = 0; i < pts; ++i) psi.at(i, c) = buf[i];
    }
  }
  if (sign == +1) psi.amp /= static_cast<double>(n);
}

}  // namespace detail

WaveFunction translate(const WaveFunction& psi, const Vec2& ell) {
  if (psi.grid.dim == 1 && ell.y() != 0.0)
    throw ValidationError("cannot translate a 1d state transversally");
  WaveFunction out = psi;
  detail::fft_components(out, -1);
  const int n = out.grid.points_per_axis;
  const std::size_t pts = out.grid.total_points();
  for (std::size_t i = 0; i < pts; ++i) {
    double kl = out.grid.wavenumber(static_cast<int>(i) % n) * ell.x();
    if (out.grid.dim == 2) kl += out.grid.wavenumber(static_cast<int>(i / n)) * ell.y();
    const Complex f = std::exp(Complex(0.0, -kl));
    for (int c = 0; c < out.internal_dim; ++c) out.at(i, c) *= f;
  }
  detail::fft_components(out, +1);
  return out;
}

Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (!a.grid.same_as(b.grid) || a.internal_dim != b.internal_dim)
    throw ValidationError("inner product needs states on the same grid");
  const Complex dot = a.amp.dot(b.amp);  // Eigen's dot conjugates the first factor
  return dot * std::pow(a.grid.spacing, a.grid.dim);
}

double momentum_moment(const WaveFunction& psi, int n, int axis, double* imag_residual) {
  if (n < 0 || n > 8) throw ValidationError("momentum moment order must be in [0, 8]");
  if (axis < 0 || axis >= psi.grid.dim) throw ValidationError("momentum axis out of range");
  WaveFunction op = psi;
  detail::fft_components(op, -1);
  const int npts = psi.grid.points_per_axis;
  const std::size_t pts = psi.grid.total_points();
  for (std::size_t i = 0; i < pts; ++i) {
    const int idx = axis == 0 ? static_cast<int>(i) % npts : static_cast<int>(i / npts);
    const double kn = std::pow(psi.grid.wavenumber(idx), n);
    for (int c = 0; c < psi.internal_dim; ++c) op.at(i, c) *= kn;
  }
  detail::fft_components(op, +1);
  const Complex v = inner_product(psi, op);
  if (imag_residual) *imag_residual = v.imag();
  return v.real();
}

Complex mixture_trace(const DensityMatrix& rho, const OperatorHandle& op) {
  Complex total = 0.0;
  for (std::size_t i = 0; i < rho.states.size(); ++i)
    total += rho.weights[i] * inner_product(rho.states[i], op(rho.states[i]));
  return total;
}

OperatorHandle translation_operator(const Vec2& ell) {
  return [ell](const WaveFunction& psi) { return translate(psi, ell); };
}

}  // namespace holoq

#include "holoq/gauge.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "holoq/parallel.hpp"
#include "holoq/su2.hpp"

namespace holoq {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw ValidationError(msg);
}

std::vector<Eigen::Matrix2cd> su2_generators() {
  std::vector<Eigen::Matrix2cd> g(3);
  for (int k = 0; k < 3; ++k) g[k] = 0.5 * pauli(k);
  return g;
}

}  // namespace

LieAlgebraBasis LieAlgebraBasis::u1(double charge) {
  LieAlgebraBasis b;
  b.group = GaugeGroup::U1;
  b.coupling = charge;
  b.validate();
  return b;
}

LieAlgebraBasis LieAlgebraBasis::su2(double g0) {
  LieAlgebraBasis b;
  b.group = GaugeGroup::SU2;
  b.coupling = g0;
  for (const auto& t : su2_generators()) b.generators.push_back(t);
  b.validate();
  return b;
}

void LieAlgebraBasis::validate() const {
  require(std::isfinite(coupling) && coupling != 0.0,
          "gauge coupling must be finite and nonzero");
  if (group == GaugeGroup::U1) {
    require(generators.empty(), "U1 basis carries no generator matrices");
    return;
  }
  require(static_cast<int>(generators.size()) == 3,
          "SU2 basis needs three generators");
  for (int j = 0; j < 3; ++j) {
    const auto& t = generators[j];
    require(t.rows() == 2 && t.cols() == 2, "SU2 generators must be 2x2");
    require((t - t.adjoint()).norm() <= 1e-14, "generators must be Hermitian");
    for (int k = 0; k < 3; ++k) {
      const double want = (j == k) ? 0.5 : 0.0;
      const Complex tr = (generators[j] * generators[k]).trace();
      require(std::abs(tr - want) <= 1e-14,
              "generators must satisfy tr(T_j T_k) = delta_jk / 2");
    }
  }
}

Eigen::MatrixXcd LieAlgebraBasis::combine(const AlgebraCoeffs& c) const {
  if (group == GaugeGroup::U1) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = c[0];
    return m;
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  for (int k = 0; k < 3; ++k) m += c[k] * generators[k];
  return m;
}

bool LieAlgebraBasis::same_as(const LieAlgebraBasis& other) const {
  return group == other.group && coupling == other.coupling;
}

AlgebraField flux_line_field(const FluxLine& line, const Vec2& x) {
  AlgebraField out = AlgebraField::Zero();
  const Vec2 d = x - line.center;
  const double r2 = d.squaredNorm();
  if (r2 == 0.0) return out;  // singular axis; enclosure checks live elsewhere
  const double core2 = line.core_radius * line.core_radius;
  const double denom = (r2 < core2) ? core2 : r2;
  const Vec2 prof = (1.0 / (2.0 * pi * denom)) * Vec2(-d.y(), d.x());
  out.col(0) = line.flux * prof.x();
  out.col(1) = line.flux * prof.y();
  return out;
}

AlgebraField GaugePotential::value(const Vec2& x, double t) const {
  AlgebraField out = AlgebraField::Zero();
  for (const auto& line : flux_lines) out += flux_line_field(line, x);
  for (const auto& s : exact_scalars) {
    const Vec2 gr = s.gradient(x);
    out(0, 0) += gr.x();
    out(0, 1) += gr.y();
  }
  if (background) out += background(x, t);
  return out;
}

std::optional<Eigen::Vector3d> GaugePotential::commuting_direction() const {
  if (abelian()) return Eigen::Vector3d::UnitX();
  if (background) return std::nullopt;
  Eigen::Vector3d dir = Eigen::Vector3d::Zero();
  if (!exact_scalars.empty()) dir = Eigen::Vector3d::UnitX();
  for (const auto& line : flux_lines) {
    const double n = line.flux.norm();
    if (n == 0.0) continue;
    if (dir.isZero()) {
      dir = line.flux / n;
      continue;
    }
    if (dir.cross(line.flux).norm() > 1e-12 * n) return std::nullopt;
  }
  if (dir.isZero()) dir = Eigen::Vector3d::UnitX();
  return dir;
}

GaugePotential solenoid_potential(const Vec2& center, double flux,
                                  double core_radius, double charge) {
  require(std::isfinite(flux), "flux must be finite");
  require(core_radius >= 0.0 && std::isfinite(core_radius),
          "core radius must be nonnegative");
  GaugePotential A;
  A.basis = LieAlgebraBasis::u1(charge);
  FluxLine line;
  line.center = center;
  line.flux = AlgebraCoeffs(flux, 0.0, 0.0);
  line.core_radius = core_radius;
  A.flux_lines.push_back(line);
  A.excluded_regions.push_back(Disc{center, core_radius});
  return A;
}

GaugePotential nonabelian_flux_tube(const Vec2& center,
                                    const Eigen::Vector3d& flux_direction,
                                    double flux_magnitude, double core_radius,
                                    double g0) {
  require(std::isfinite(flux_magnitude), "flux magnitude must be finite");
  require(core_radius >= 0.0 && std::isfinite(core_radius),
          "core radius must be nonnegative");
  const double n = flux_direction.norm();
  require(std::isfinite(n) && std::abs(n - 1.0) <= 1e-6,
          "flux direction must be a unit 3-vector");
  GaugePotential A;
  A.basis = LieAlgebraBasis::su2(g0);
  FluxLine line;
  line.center = center;
  line.flux = flux_magnitude * (flux_direction / n);
  line.core_radius = core_radius;
  A.flux_lines.push_back(line);
  A.excluded_regions.push_back(Disc{center, core_radius});
  return A;
}

GaugeTransformation GaugeTransformation::inverse() const {
  GaugeTransformation out;
  out.kind = kind;
  if (kind == Kind::Abelian) {
    require(static_cast<bool>(lambda) && static_cast<bool>(lambda_gradient),
            "Abelian transformation is missing its scalar field");
    auto lam = lambda;
    auto grad = lambda_gradient;
    out.lambda = [lam](const Vec2& x) { return -lam(x); };
    out.lambda_gradient = [grad](const Vec2& x) { return Vec2(-grad(x)); };
  } else {
    require(static_cast<bool>(unitary) && static_cast<bool>(unitary_gradient),
            "non-Abelian transformation is missing its unitary field");
    auto u = unitary;
    auto du = unitary_gradient;
    out.unitary = [u](const Vec2& x) { return Eigen::Matrix2cd(u(x).adjoint()); };
    out.unitary_gradient = [du](const Vec2& x) {
      const auto g = du(x);
      return std::array<Eigen::Matrix2cd, 2>{g[0].adjoint(), g[1].adjoint()};
    };
  }
  return out;
}

GaugePotential apply_gauge_to_potential(const GaugePotential& A,
                                        const GaugeTransformation& g) {
  if (g.kind == GaugeTransformation::Kind::Abelian) {
    require(A.abelian(),
            "Abelian transformation applied to a non-Abelian potential");
    require(static_cast<bool>(g.lambda) && static_cast<bool>(g.lambda_gradient),
            "Abelian transformation is missing its scalar field");
    GaugePotential out = A;
    out.exact_scalars.push_back(ExactScalar{g.lambda, g.lambda_gradient});
    return out;
  }
  require(!A.abelian(),
          "non-Abelian transformation applied to an Abelian potential");
  require(static_cast<bool>(g.unitary) && static_cast<bool>(g.unitary_gradient),
          "non-Abelian transformation is missing its unitary field");

  auto base = std::make_shared<const GaugePotential>(A);
  auto ufn = g.unitary;
  auto dufn = g.unitary_gradient;
  const double g0 = A.basis.coupling;
  auto gens = su2_generators();

  GaugePotential out;
  out.basis = A.basis;
  out.excluded_regions = A.excluded_regions;
  out.background = [base, ufn, dufn, g0, gens](const Vec2& x,
                                               double t) -> AlgebraField {
    const AlgebraField f = base->value(x, t);
    const Eigen::Matrix2cd u = ufn(x);
    const auto du = dufn(x);
    const Complex i_over_g0(0.0, 1.0 / g0);
    AlgebraField result;
    for (int a = 0; a < 2; ++a) {
      Eigen::Matrix2cd amat = Eigen::Matrix2cd::Zero();
      for (int k = 0; k < 3; ++k) amat += f(k, a) * gens[k];
      const Eigen::Matrix2cd m =
          u * amat * u.adjoint() + i_over_g0 * u * du[a].adjoint();
      for (int k = 0; k < 3; ++k)
        result(k, a) = (2.0 * (gens[k] * m).trace()).real();
    }
    return result;
  };
  return out;
}

WaveFunction apply_gauge_to_wavefunction(const WaveFunction& psi,
                                         const GaugeTransformation& g,
                                         const LieAlgebraBasis& basis) {
  WaveFunction out = psi;
  const std::size_t n = psi.grid.total_points();
  if (g.kind == GaugeTransformation::Kind::Abelian) {
    require(basis.group == GaugeGroup::U1,
            "Abelian transformation needs a U1 basis");
    require(psi.internal_dim == 1,
            "Abelian transformation acts on single-component states");
    require(static_cast<bool>(g.lambda),
            "Abelian transformation is missing its scalar field");
    const double q = basis.coupling;
    auto lam = g.lambda;
    parallel_for(n, [&](std::size_t i) {
      const Complex phase = std::exp(Complex(0.0, q * lam(out.grid.coord(i))));
      out.amp[i] *= phase;
    });
    return out;
  }
  require(basis.group == GaugeGroup::SU2,
          "non-Abelian transformation needs an SU2 basis");
  require(psi.internal_dim == 2,
          "non-Abelian transformation acts on two-component states");
  require(static_cast<bool>(g.unitary),
          "non-Abelian transformation is missing its unitary field");
  auto ufn = g.unitary;
  parallel_for(n, [&](std::size_t i) {
    const Eigen::Matrix2cd u = ufn(out.grid.coord(i));
    const Eigen::Vector2cd v(out.at(i, 0), out.at(i, 1));
    const Eigen::Vector2cd w = u * v;
    out.at(i, 0) = w[0];
    out.at(i, 1) = w[1];
  });
  return out;
}

namespace {

struct FourierMode {
  Vec2 k;
  double coeff;
  double phase;
};

std::vector<FourierMode> random_modes(std::mt19937_64& rng,
                                      const GridSpec& domain, int band_limit,
                                      double amplitude) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  const double k0 = 2.0 * pi / domain.extent();
  std::vector<FourierMode> modes;
  auto push = [&](int mx, int my) {
    FourierMode m;
    m.k = k0 * Vec2(mx, my);
    m.coeff = amplitude * unit(rng);
    m.phase = angle(rng);
    modes.push_back(m);
  };
  if (domain.dim == 1) {
    for (int m = 1; m <= band_limit; ++m) push(m, 0);
  } else {
    // Half lattice: one representative per +-m pair keeps the field real
    // without duplicate modes.
    for (int mx = 0; mx <= band_limit; ++mx)
      for (int my = -band_limit; my <= band_limit; ++my) {
        if (mx == 0 && my <= 0) continue;
        push(mx, my);
      }
  }
  return modes;
}

double field_value(const std::vector<FourierMode>& modes, const Vec2& x) {
  double s = 0.0;
  for (const auto& m : modes) s += m.coeff * std::cos(m.k.dot(x) + m.phase);
  return s;
}

Vec2 field_gradient(const std::vector<FourierMode>& modes, const Vec2& x) {
  Vec2 s = Vec2::Zero();
  for (const auto& m : modes)
    s -= m.coeff * std::sin(m.k.dot(x) + m.phase) * m.k;
  return s;
}

}  // namespace

GaugeTransformation random_smooth_gauge(std::uint64_t seed, GaugeGroup kind,
                                        int band_limit, double amplitude,
                                        const GridSpec& domain) {
  domain.validate();
  require(band_limit >= 0, "band limit must be nonnegative");
  require(band_limit <= domain.points_per_axis / 4,
          "band limit must stay at or below a quarter of the axis resolution");
  require(std::isfinite(amplitude), "amplitude must be finite");

  std::mt19937_64 rng(seed);
  GaugeTransformation g;
  if (kind == GaugeGroup::U1) {
    auto modes = random_modes(rng, domain, band_limit, amplitude);
    g.kind = GaugeTransformation::Kind::Abelian;
    g.lambda = [modes](const Vec2& x) { return field_value(modes, x); };
    g.lambda_gradient = [modes](const Vec2& x) {
      return field_gradient(modes, x);
    };
    return g;
  }

  std::array<std::vector<FourierMode>, 3> comp;
  for (int k = 0; k < 3; ++k)
    comp[k] = random_modes(rng, domain, band_limit, amplitude);
  g.kind = GaugeTransformation::Kind::NonAbelian;
  g.unitary = [comp](const Vec2& x) {
    const Eigen::Vector3d lam(field_value(comp[0], x), field_value(comp[1], x),
                              field_value(comp[2], x));
    return su2_exp(lam);
  };
  g.unitary_gradient = [comp](const Vec2& x) {
    Eigen::Vector3d lam;
    std::array<Vec2, 3> grad;
    for (int k = 0; k < 3; ++k) {
      lam[k] = field_value(comp[k], x);
      grad[k] = field_gradient(comp[k], x);
    }
    Eigen::Matrix2cd h = Eigen::Matrix2cd::Zero();
    for (int k = 0; k < 3; ++k) h += 0.5 * lam[k] * pauli(k);
    std::array<Eigen::Matrix2cd, 2> out;
    for (int a = 0; a < 2; ++a) {
      Eigen::Matrix2cd dh = Eigen::Matrix2cd::Zero();
      for (int k = 0; k < 3; ++k) dh += 0.5 * grad[k][a] * pauli(k);
      out[a] = dexp_iH(h, dh);
    }
    return out;
  };
  return g;
}

}  // namespace holoq

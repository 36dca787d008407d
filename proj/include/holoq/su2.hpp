#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace holoq {

inline const Eigen::Matrix2cd& pauli(int k) {
  using C = std::complex<double>;
  static const Eigen::Matrix2cd s[3] = {
      (Eigen::Matrix2cd() << C(0, 0), C(1, 0), C(1, 0), C(0, 0)).finished(),
      (Eigen::Matrix2cd() << C(0, 0), C(0, -1), C(0, 1), C(0, 0)).finished(),
      (Eigen::Matrix2cd() << C(1, 0), C(0, 0), C(0, 0), C(-1, 0)).finished()};
  return s[k];
}

// exp(i a . sigma/2), closed form: cos(|a|/2) I + i sin(|a|/2) (a_hat . sigma).
inline Eigen::Matrix2cd su2_exp(const Eigen::Vector3d& a) {
  const double theta = a.norm();
  Eigen::Matrix2cd out = std::cos(0.5 * theta) * Eigen::Matrix2cd::Identity();
  if (theta > 0.0) {
    const std::complex<double> f(0.0, std::sin(0.5 * theta) / theta);
    for (int k = 0; k < 3; ++k) out += f * a[k] * pauli(k);
  }
  return out;
}

// Directional derivative of H -> exp(iH) at Hermitian H along Hermitian dH,
// via the eigendecomposition H = V diag(d) V* and the divided-difference
// kernel (e^{i d_j} - e^{i d_l})/(d_j - d_l), with the confluent limit
// i e^{i d_j} on (near-)degenerate pairs.
inline Eigen::Matrix2cd dexp_iH(const Eigen::Matrix2cd& H,
                                const Eigen::Matrix2cd& dH) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es;
  es.computeDirect(H);
  const Eigen::Vector2d d = es.eigenvalues();
  const Eigen::Matrix2cd V = es.eigenvectors();
  const Eigen::Matrix2cd B = V.adjoint() * dH * V;
  Eigen::Matrix2cd K;
  for (int j = 0; j < 2; ++j) {
    for (int l = 0; l < 2; ++l) {
      const double gap = d[j] - d[l];
      if (std::abs(gap) < 1e-12) {
        const double mid = 0.5 * (d[j] + d[l]);
        K(j, l) = std::complex<double>(0.0, 1.0) *
                  std::exp(std::complex<double>(0.0, mid));
      } else {
        K(j, l) = (std::exp(std::complex<double>(0.0, d[j])) -
                   std::exp(std::complex<double>(0.0, d[l]))) /
                  gap;
      }
    }
  }
  return V * K.cwiseProduct(B) * V.adjoint();
}

}  // namespace holoq

#pragma once

#include <cmath>
#include <random>

#include "phsmor/core.hpp"
#include "phsmor/types.hpp"

namespace phs::test {

inline double rel(const MatrixXc& a, const MatrixXc& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline MatrixXd gaussian(std::mt19937& g, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd;
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = nd(g);
  return m;
}

// Orthogonal factor of a Gaussian matrix.
inline MatrixXd orthogonal(std::mt19937& g, Eigen::Index n) {
  Eigen::HouseholderQR<MatrixXd> qr(gaussian(g, n, n));
  return qr.householderQ();
}

// Boundary operators from the flow/effort parametrization:
// R0 [e(b); e(a)] = [P(e(b) - e(a)); e(b) + e(a)] / sqrt2, W_B = M [I S] (or [S I]), W_C = M^-T [0 I] (or [I 0]).
inline std::pair<MatrixXd, MatrixXd> random_boundary(std::mt19937& g, const MatrixXd& P) {
  const Eigen::Index n = P.rows();
  const MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXd R0(2 * n, 2 * n);
  R0 << P, -P, I, I;
  R0 /= std::sqrt(2.0);
  const MatrixXd K = gaussian(g, n, n), S = K - K.transpose();
  const VectorXd d = VectorXd::Ones(n) + 0.3 * gaussian(g, n, 1).cwiseAbs();
  const MatrixXd M = orthogonal(g, n) * d.asDiagonal();
  MatrixXd WB(n, 2 * n), WC(n, 2 * n);
  const MatrixXd Mit = M.inverse().transpose();
  if (std::uniform_int_distribution<int>(0, 1)(g)) {
    WB << I, S;
    WC << MatrixXd::Zero(n, n), I;
  } else {
    WB << S, I;
    WC << I, MatrixXd::Zero(n, n);
  }
  return {M * WB * R0, Mit * WC * R0};
}

// Random valid model: symmetric invertible P, G with PSD symmetric part (or skew only), SPD H.
inline BcPhsSpec random_spec(std::mt19937& g, bool lossless) {
  std::uniform_int_distribution<int> sz(1, 2);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  BcPhsSpec s;
  s.n1 = sz(g);
  s.n2 = sz(g);
  const int n = s.n();
  VectorXd ev(n);
  for (int i = 0; i < n; ++i) ev(i) = (i % 2 ? -1.0 : 1.0) * mag(g);
  const MatrixXd U = orthogonal(g, n);
  s.P = U * ev.asDiagonal() * U.transpose();
  s.P = 0.5 * (s.P + s.P.transpose());
  const MatrixXd K = gaussian(g, n, n);
  s.G = 0.5 * (K - K.transpose());
  if (!lossless) {
    const MatrixXd L = gaussian(g, n, n);
    s.G += 0.3 * L * L.transpose();
  }
  auto spd = [&](int m) {
    const MatrixXd A = gaussian(g, m, m);
    return MatrixXd(A * A.transpose() + m * MatrixXd::Identity(m, m));
  };
  const MatrixXd H1 = spd(s.n1), H2 = spd(s.n2);
  const double w = mag(g);
  s.H1 = {[H1, w](double z) { return MatrixXd((1.0 + 0.5 * std::sin(w * z)) * H1); }, s.n1, s.n1};
  s.H2 = SpatialFunction::constant(H2);
  std::tie(s.VB, s.VC) = random_boundary(g, s.P);
  s.name = "random";
  return s;
}

}  // namespace phs::test

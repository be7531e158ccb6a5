#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace phs {

using cplx = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<double>;

// Dense descriptor realization  E x' = A x + B u,  y = C x + D u.
// Q is an optional storage matrix; when present the energy is x^T Q x / 2.
template <typename Scalar>
struct Descriptor {
  Mat<Scalar> E, A, B, C, D;
  std::optional<MatrixXd> Q;

  Eigen::Index order() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }
};

using RealDescriptor = Descriptor<double>;
using ComplexDescriptor = Descriptor<cplx>;

}  // namespace phs

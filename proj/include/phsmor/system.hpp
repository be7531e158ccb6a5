#pragma once

#include <memory>

#include "phsmor/pfem.hpp"

namespace phs {

// Sparse view of an assembled model in descriptor form:
// A = (J - R) S, C = B^T S with S = E^{-1} Q. S is never formed.
class PhOperator {
public:
  explicit PhOperator(const AssembledFom& fom);

  const AssembledFom& fom() const { return *fom_; }
  Eigen::Index order() const { return fom_->size(); }
  Eigen::Index inputs() const { return fom_->B.cols(); }

  MatrixXd S(const MatrixXd& X) const;  // E^{-1} Q X
  MatrixXd A(const MatrixXd& X) const;  // (J - R) E^{-1} Q X
  MatrixXd E(const MatrixXd& X) const { return fom_->E * X; }
  const MatrixXd& B() const { return fom_->B; }
  const MatrixXd& C() const { return C_; }  // dense n x N_t

private:
  std::shared_ptr<const AssembledFom> fom_;
  std::shared_ptr<Eigen::SimplicialLLT<SpMat>> Ellt_;
  MatrixXd C_;
};

// Dense descriptor form with D = 0 and Q carried over.
RealDescriptor to_descriptor(const AssembledFom& fom);

// Factorization of (sE - A) reused for all right-hand sides.
template <typename Scalar>
class DenseResolvent {
public:
  DenseResolvent(const Descriptor<Scalar>& sys, cplx s);
  MatrixXc solve(const MatrixXc& rhs) const { return lu_.solve(rhs); }
  MatrixXc solve_transposed(const MatrixXc& rhs) const { return lu_.transpose().solve(rhs); }
  MatrixXc transfer() const;
  double rcond() const { return rcond_; }

private:
  const Descriptor<Scalar>* sys_;
  Eigen::PartialPivLU<MatrixXc> lu_;
  double rcond_ = 0.0;
};

// Sparse augmented solve [[sE, -(J-R)], [-Q, E]] whose leading block inverse is (sE - A)^{-1}.
class PhResolvent {
public:
  PhResolvent(const PhOperator& op, cplx s);
  MatrixXc solve(const MatrixXc& rhs) const;
  MatrixXc solve_transposed(const MatrixXc& rhs) const;
  MatrixXc transfer() const;

private:
  const PhOperator* op_;
  cplx s_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>> lu_;
};

template <typename Scalar>
DenseResolvent<Scalar> resolvent(const Descriptor<Scalar>& sys, cplx s) {
  return DenseResolvent<Scalar>(sys, s);
}
inline PhResolvent resolvent(const PhOperator& op, cplx s) { return PhResolvent(op, s); }

// G(s) = C (sE - A)^{-1} B + D.
template <typename System>
MatrixXc eval_transfer(const System& sys, cplx s) {
  return resolvent(sys, s).transfer();
}

// Finite generalized eigenvalues of (A, E).
template <typename Scalar>
VectorXc pencil_eigenvalues(const Descriptor<Scalar>& sys);

double spectral_abscissa(const RealDescriptor& sys);

}  // namespace phs

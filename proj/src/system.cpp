#include "phsmor/system.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace phs {

namespace {

std::string sci(cplx s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", s.real(), s.imag());
  return buf;
}

constexpr double kMaxCondition = 1e14;

}  // namespace

PhOperator::PhOperator(const AssembledFom& fom)
    : fom_(std::make_shared<const AssembledFom>(fom)),
      Ellt_(std::make_shared<Eigen::SimplicialLLT<SpMat>>(fom.E)) {
  if (Ellt_->info() != Eigen::Success)
    throw Error(Errc::FactorizationFailure, "E is not symmetric positive definite");
  C_ = (fom_->Q * Ellt_->solve(fom_->B)).transpose();
}

MatrixXd PhOperator::S(const MatrixXd& X) const { return Ellt_->solve(MatrixXd(fom_->Q * X)); }

MatrixXd PhOperator::A(const MatrixXd& X) const {
  return (fom_->J - fom_->R) * S(X);
}

RealDescriptor to_descriptor(const AssembledFom& fom) {
  Eigen::SimplicialLLT<SpMat> llt(fom.E);
  if (llt.info() != Eigen::Success)
    throw Error(Errc::FactorizationFailure, "E is not symmetric positive definite");
  const MatrixXd S = llt.solve(MatrixXd(fom.Q));
  const double resid = (fom.E * S - MatrixXd(fom.Q)).norm();
  if (!(resid <= 1e-10 * std::max(1.0, fom.Q.norm())))
    throw Error(Errc::FactorizationFailure, "E S = Q residual too large");
  RealDescriptor d;
  d.E = MatrixXd(fom.E);
  d.A = (fom.J - fom.R) * S;
  d.B = fom.B;
  d.C = fom.B.transpose() * S;
  d.D = MatrixXd::Zero(fom.B.cols(), fom.B.cols());
  d.Q = MatrixXd(fom.Q);
  return d;
}

template <typename Scalar>
DenseResolvent<Scalar>::DenseResolvent(const Descriptor<Scalar>& sys, cplx s) : sys_(&sys) {
  const MatrixXc M = s * sys.E.template cast<cplx>() - sys.A.template cast<cplx>();
  lu_.compute(M);
  rcond_ = lu_.rcond();
  if (!(rcond_ * kMaxCondition >= 1.0))
    throw Error(Errc::NearSingularPencil, "sE - A is near singular at s = " + sci(s));
}

template <typename Scalar>
MatrixXc DenseResolvent<Scalar>::transfer() const {
  MatrixXc G = sys_->C.template cast<cplx>() * solve(sys_->B.template cast<cplx>());
  if (sys_->D.size() > 0) G += sys_->D.template cast<cplx>();
  return G;
}

template class DenseResolvent<double>;
template class DenseResolvent<cplx>;

PhResolvent::PhResolvent(const PhOperator& op, cplx s) : op_(&op), s_(s) {
  const auto& f = op.fom();
  const Eigen::Index N = f.size();
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(4 * f.E.nonZeros() + 2 * f.J.nonZeros() + 2 * f.R.nonZeros());
  auto add = [&](const SpMat& m, Eigen::Index r0, Eigen::Index c0, cplx scale) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it)
        t.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
  };
  add(f.E, 0, 0, s);
  add(f.J, 0, N, -1.0);
  add(f.R, 0, N, 1.0);
  add(f.Q, N, 0, -1.0);
  add(f.E, N, N, 1.0);
  Eigen::SparseMatrix<cplx> M(2 * N, 2 * N);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>>();
  lu_->analyzePattern(M);
  lu_->factorize(M);
  if (lu_->info() != Eigen::Success)
    throw Error(Errc::NearSingularPencil, "sE - A is singular at s = " + sci(s));
}

MatrixXc PhResolvent::solve(const MatrixXc& rhs) const {
  const Eigen::Index N = op_->order();
  MatrixXc big = MatrixXc::Zero(2 * N, rhs.cols());
  big.topRows(N) = rhs;
  MatrixXc x = lu_->solve(big);
  if (!x.allFinite()) throw Error(Errc::NearSingularPencil, "non-finite resolvent at s = " + sci(s_));
  return x.topRows(N);
}

MatrixXc PhResolvent::solve_transposed(const MatrixXc& rhs) const {
  const Eigen::Index N = op_->order();
  MatrixXc big = MatrixXc::Zero(2 * N, rhs.cols());
  big.topRows(N) = rhs;
  MatrixXc x = lu_->transpose().solve(big);
  if (!x.allFinite()) throw Error(Errc::NearSingularPencil, "non-finite resolvent at s = " + sci(s_));
  return x.topRows(N);
}

MatrixXc PhResolvent::transfer() const {
  const Eigen::Index N = op_->order();
  const MatrixXd& B = op_->B();
  MatrixXc big = MatrixXc::Zero(2 * N, B.cols());
  big.topRows(N) = B.cast<cplx>();
  const MatrixXc x = lu_->solve(big);
  if (!x.allFinite()) throw Error(Errc::NearSingularPencil, "non-finite resolvent at s = " + sci(s_));
  return B.transpose().cast<cplx>() * x.bottomRows(N);
}

template <typename Scalar>
VectorXc pencil_eigenvalues(const Descriptor<Scalar>& sys) {
  // E is nonsingular for every system handled here, so reduce to a standard problem.
  Eigen::PartialPivLU<MatrixXc> lu(sys.E.template cast<cplx>());
  const MatrixXc M = lu.solve(sys.A.template cast<cplx>());
  Eigen::ComplexEigenSolver<MatrixXc> es(M, false);
  if (es.info() != Eigen::Success) throw Error(Errc::EigensolveFailure, "pencil eigenvalues");
  return es.eigenvalues();
}

template VectorXc pencil_eigenvalues<double>(const Descriptor<double>&);
template VectorXc pencil_eigenvalues<cplx>(const Descriptor<cplx>&);

double spectral_abscissa(const RealDescriptor& sys) {
  Eigen::GeneralizedEigenSolver<MatrixXd> ges(sys.A, sys.E, false);
  if (ges.info() != Eigen::Success) throw Error(Errc::EigensolveFailure, "QZ failed");
  const auto& al = ges.alphas();
  const auto& be = ges.betas();
  const double scale = std::max(1.0, sys.E.norm());
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < al.size(); ++i) {
    if (std::abs(be(i)) <= 1e-13 * scale) continue;
    m = std::max(m, (al(i) / be(i)).real());
  }
  return m;
}

}  // namespace phs

#include "phsmor/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace phs {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double rel(const MatrixXc& diff, double scale) { return diff.norm() / std::max(scale, 1e-300); }

}  // namespace

Eigen::Index TangentialData::ports() const {
  if (!right.empty()) return right.front().r.size();
  if (!left.empty()) return left.front().l.size();
  return 0;
}

std::vector<cplx> right_points(const TangentialData& d) {
  std::vector<cplx> p;
  for (const auto& x : d.right) p.push_back(x.lambda);
  return p;
}

std::vector<cplx> left_points(const TangentialData& d) {
  std::vector<cplx> p;
  for (const auto& x : d.left) p.push_back(x.mu);
  return p;
}

template <typename System>
TangentialData generate_data(const System& sys, std::vector<double> freqs) {
  std::sort(freqs.begin(), freqs.end());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (!(freqs[i] > 0.0)) throw Error(Errc::InvalidConfig, "frequencies must be positive");
    if (i && freqs[i] == freqs[i - 1])
      throw Error(Errc::CollidingPoints, "duplicate frequency " + sci(freqs[i]));
  }
  const Eigen::Index n = sys.inputs();
  TangentialData d;
  int nr = 0, nl = 0;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const cplx s(0.0, freqs[i]);
    const MatrixXc G = eval_transfer(sys, s);
    if (i % 2 == 0) {
      const int dir = nr++ % static_cast<int>(n);
      const VectorXc r = VectorXc::Unit(n, dir);
      const VectorXc w = G * r;
      d.right.push_back({s, r, w, dir});
      d.right.push_back({std::conj(s), r, w.conjugate(), dir});
    } else {
      const int dir = nl++ % static_cast<int>(n);
      const Eigen::RowVectorXcd l = Eigen::RowVectorXcd::Unit(n, dir);
      const Eigen::RowVectorXcd v = l * G;
      d.left.push_back({s, l, v, dir});
      d.left.push_back({std::conj(s), l, v.conjugate(), dir});
    }
  }
  for (const auto& r : d.right)
    for (const auto& l : d.left)
      if (std::abs(r.lambda - l.mu) == 0.0)
        throw Error(Errc::CollidingPoints, "left and right points coincide");
  return d;
}

template TangentialData generate_data<RealDescriptor>(const RealDescriptor&, std::vector<double>);
template TangentialData generate_data<ComplexDescriptor>(const ComplexDescriptor&, std::vector<double>);
template TangentialData generate_data<PhOperator>(const PhOperator&, std::vector<double>);

SylvesterResiduals sylvester_residuals(const LoewnerPencil& p) {
  const MatrixXc Md = p.M.asDiagonal(), Ld = p.Lambda.asDiagonal();
  const MatrixXc ML = Md * p.L, LL = p.L * Ld, VR = p.V * p.R, LW = p.Lrows * p.W;
  SylvesterResiduals r;
  r.L = rel(ML - LL - (VR - LW), std::max({ML.norm(), LL.norm(), VR.norm(), LW.norm()}));
  const MatrixXc MS = Md * p.sL, SL = p.sL * Ld, MVR = Md * VR, LWL = LW * Ld;
  r.sL = rel(MS - SL - (MVR - LWL), std::max({MS.norm(), SL.norm(), MVR.norm(), LWL.norm()}));
  return r;
}

LoewnerPencil build_pencil(const TangentialData& data, double tol) {
  const Eigen::Index Nr = static_cast<Eigen::Index>(data.right.size());
  const Eigen::Index Nl = static_cast<Eigen::Index>(data.left.size());
  const Eigen::Index n = data.ports();
  LoewnerPencil p;
  p.data = data;
  p.Lambda.resize(Nr);
  p.M.resize(Nl);
  p.R.resize(n, Nr);
  p.W.resize(n, Nr);
  p.Lrows.resize(Nl, n);
  p.V.resize(Nl, n);
  for (Eigen::Index j = 0; j < Nr; ++j) {
    p.Lambda(j) = data.right[j].lambda;
    p.R.col(j) = data.right[j].r;
    p.W.col(j) = data.right[j].w;
  }
  for (Eigen::Index i = 0; i < Nl; ++i) {
    p.M(i) = data.left[i].mu;
    p.Lrows.row(i) = data.left[i].l;
    p.V.row(i) = data.left[i].v;
  }
  p.L.resize(Nl, Nr);
  p.sL.resize(Nl, Nr);
  for (Eigen::Index i = 0; i < Nl; ++i)
    for (Eigen::Index j = 0; j < Nr; ++j) {
      const cplx den = p.M(i) - p.Lambda(j);
      if (den == 0.0) throw Error(Errc::ZeroDenominator, "mu_i == lambda_j");
      const cplx vr = (p.V.row(i) * p.R.col(j)).value();
      const cplx lw = (p.Lrows.row(i) * p.W.col(j)).value();
      p.L(i, j) = (vr - lw) / den;
      p.sL(i, j) = (p.M(i) * vr - p.Lambda(j) * lw) / den;
    }
  const auto res = sylvester_residuals(p);
  if (!(res.L <= tol) || !(res.sL <= tol))
    throw Error(Errc::DataModelMismatch,
                "Sylvester identity residuals " + sci(res.L) + ", " + sci(res.sL));
  return p;
}

namespace {

double min_sv_ratio(const MatrixXc& m) {
  Eigen::JacobiSVD<MatrixXc> svd(m);
  const auto& s = svd.singularValues();
  return s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
}

}  // namespace

ComplexDescriptor realize(const LoewnerPencil& p, double rank_tol) {
  if (p.L.rows() != p.L.cols())
    throw Error(Errc::RankDeficientData, "realization needs as many left as right points");
  const Eigen::Index N = p.L.rows();
  ComplexDescriptor d;
  d.E = -p.L;
  d.A = -p.sL;
  d.B = p.V;
  d.C = p.W;
  d.D = MatrixXc::Zero(p.W.rows(), p.V.cols());
  if (rank_tol <= 0.0) return d;
  MatrixXc wide(N, 2 * N), tall(2 * N, N);
  wide << p.L, p.sL;
  tall << p.L, p.sL;
  const double rw = min_sv_ratio(wide.adjoint()), rt = min_sv_ratio(tall);
  if (rw < rank_tol || rt < rank_tol)
    throw Error(Errc::RankDeficientData, "[L sL] is rank deficient (sigma ratio " +
                                             sci(std::min(rw, rt)) + "); truncate instead");
  std::vector<cplx> pts;
  for (Eigen::Index j = 0; j < N; ++j) pts.push_back(p.Lambda(j));
  for (Eigen::Index i = 0; i < N; ++i) pts.push_back(p.M(i));
  for (const cplx x : pts) {
    const double r = min_sv_ratio(x * p.L - p.sL);
    if (r < rank_tol)
      throw Error(Errc::RankDeficientData, "x L - sL is rank deficient at a data point (ratio " +
                                               sci(r) + ")");
  }
  return d;
}

ComplexDescriptor realize_with_feedthrough(const LoewnerPencil& p, const MatrixXd& D) {
  const MatrixXc Dc = D.cast<cplx>();
  ComplexDescriptor d;
  d.E = -p.L;
  d.A = -p.sL + p.Lrows * Dc * p.R;
  d.B = p.V - p.Lrows * Dc;
  d.C = p.W - Dc * p.R;
  d.D = Dc;
  return d;
}

MatrixXc pair_transform(const std::vector<cplx>& pts, double tol) {
  const auto N = static_cast<Eigen::Index>(pts.size());
  MatrixXc J = MatrixXc::Zero(N, N);
  const double s = 1.0 / std::numbers::sqrt2;
  const cplx i1(0.0, 1.0);
  for (Eigen::Index k = 0; k < N;) {
    const cplx z = pts[k];
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) <= tol * scale) {
      J(k, k) = 1.0;
      ++k;
      continue;
    }
    if (k + 1 >= N || std::abs(pts[k + 1] - std::conj(z)) > tol * scale)
      throw Error(Errc::NonConjugateOrdering,
                  "point " + std::to_string(k) + " is not followed by its conjugate");
    J(k, k) = s;
    J(k, k + 1) = -i1 * s;
    J(k + 1, k) = s;
    J(k + 1, k + 1) = i1 * s;
    k += 2;
  }
  return J;
}

RealRealization real_transform(const ComplexDescriptor& sys, const std::vector<cplx>& lp,
                               const std::vector<cplx>& rp, double tol) {
  RealRealization out;
  out.JL = pair_transform(lp, tol);
  out.JR = pair_transform(rp, tol);
  const MatrixXc E = out.JL.adjoint() * sys.E * out.JR;
  const MatrixXc A = out.JL.adjoint() * sys.A * out.JR;
  const MatrixXc B = out.JL.adjoint() * sys.B;
  const MatrixXc C = sys.C * out.JR;
  double residue = 0.0;
  for (const MatrixXc* m : {&E, &A, &B, &C})
    if (m->size()) residue = std::max(residue, m->imag().norm() / std::max(m->norm(), 1e-300));
  out.imag_residue = residue;
  if (residue > tol)
    throw Error(Errc::NonConjugateOrdering,
                "real transform leaves imaginary residue " + sci(residue));
  out.sys.E = E.real();
  out.sys.A = A.real();
  out.sys.B = B.real();
  out.sys.C = C.real();
  out.sys.D = sys.D.size() ? MatrixXd(sys.D.real()) : MatrixXd::Zero(C.rows(), B.cols());
  return out;
}

Truncation svd_truncate(const RealDescriptor& sys, double rank_tol, int fixed_k) {
  const Eigen::Index N = sys.E.rows();
  MatrixXd wide(N, 2 * N), tall(2 * N, N);
  wide << sys.E, sys.A;
  tall << sys.E, sys.A;
  Eigen::BDCSVD<MatrixXd> sw(wide, Eigen::ComputeThinU);
  Eigen::BDCSVD<MatrixXd> st(tall, Eigen::ComputeThinV);
  const VectorXd& s = sw.singularValues();
  int k = fixed_k;
  if (k <= 0) {
    k = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) >= rank_tol * s(0)) ++k;
  }
  k = std::min<int>(k, static_cast<int>(N));
  Truncation t;
  t.k = k;
  t.Y = sw.matrixU().leftCols(k);
  t.X = st.matrixV().leftCols(k);
  t.rom.sys.E = t.Y.transpose() * sys.E * t.X;
  t.rom.sys.A = t.Y.transpose() * sys.A * t.X;
  t.rom.sys.B = t.Y.transpose() * sys.B;
  t.rom.sys.C = sys.C * t.X;
  t.rom.sys.D = sys.D.size() ? sys.D : MatrixXd::Zero(sys.C.rows(), sys.B.cols());
  t.rom.sigma = s;
  t.rom.provenance = Provenance::Standard;
  return t;
}

namespace {

MatrixXc apply_real(const MatrixXc& X, auto&& f) {
  const MatrixXd re = f(MatrixXd(X.real())), im = f(MatrixXd(X.imag()));
  MatrixXc out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

template <typename Sys, typename ApplyE, typename ApplyA>
Projector projector_impl(const Sys& fom, const MatrixXd& B, const MatrixXd& C, ApplyE&& applyE,
                         ApplyA&& applyA, const LoewnerPencil& p, const MatrixXc& JR,
                         const MatrixXd& X, double tol) {
  const Eigen::Index Nt = B.rows(), Nr = p.Lambda.size(), Nl = p.M.size();
  Projector pr;
  pr.Cb.resize(Nt, Nr);
  pr.Ob.resize(Nl, Nt);
  const MatrixXc Bc = B.cast<cplx>(), Ct = C.transpose().cast<cplx>();
  for (Eigen::Index j = 0; j < Nr; ++j)
    pr.Cb.col(j) = resolvent(fom, p.Lambda(j)).solve(Bc * p.R.col(j));
  for (Eigen::Index i = 0; i < Nl; ++i)
    pr.Ob.row(i) = resolvent(fom, p.M(i)).solve_transposed(Ct * p.Lrows.row(i).transpose()).transpose();

  const MatrixXc El = -p.L, Al = -p.sL;
  pr.res_E = rel(pr.Ob * apply_real(pr.Cb, applyE) - El, El.norm());
  pr.res_A = rel(pr.Ob * apply_real(pr.Cb, applyA) - Al, Al.norm());
  pr.res_B = rel(pr.Ob * Bc - p.V, p.V.norm());
  pr.res_C = rel(C.cast<cplx>() * pr.Cb - p.W, p.W.norm());
  const double worst = std::max({pr.res_E, pr.res_A, pr.res_B, pr.res_C});
  if (!(worst <= tol))
    throw Error(Errc::DataModelMismatch, "projector identities fail with residual " + sci(worst));

  const MatrixXc T = pr.Cb * JR * X.cast<cplx>();
  const double im = T.imag().norm() / std::max(T.norm(), 1e-300);
  if (im > 1e-10)
    throw Error(Errc::NonConjugateOrdering, "projector has imaginary residue " + sci(im));
  pr.T = T.real();
  return pr;
}

}  // namespace

Projector build_projector(const PhOperator& fom, const LoewnerPencil& p, const MatrixXc& JR,
                          const MatrixXd& X, double tol) {
  return projector_impl(
      fom, fom.B(), fom.C(), [&](const MatrixXd& m) { return fom.E(m); },
      [&](const MatrixXd& m) { return fom.A(m); }, p, JR, X, tol);
}

Projector build_projector(const RealDescriptor& fom, const LoewnerPencil& p, const MatrixXc& JR,
                          const MatrixXd& X, double tol) {
  return projector_impl(
      fom, fom.B, fom.C, [&](const MatrixXd& m) { return MatrixXd(fom.E * m); },
      [&](const MatrixXd& m) { return MatrixXd(fom.A * m); }, p, JR, X, tol);
}

}  // namespace phs

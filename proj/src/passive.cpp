#include "phsmor/passive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phs {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double min_eig(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

MatrixXd feedthrough(const RealDescriptor& sys) {
  return sys.D.size() ? sys.D : MatrixXd::Zero(sys.C.rows(), sys.B.cols());
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Passive: return "passive";
    case Verdict::NotPassive: return "not_passive";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

VectorXd default_grid() {
  VectorXd g(400);
  for (int i = 0; i < 400; ++i) g(i) = std::pow(10.0, -2.0 + 5.0 * i / 399.0);
  return g;
}

SpectralZeroSet spectral_zeros(const RealDescriptor& rom, const MatrixXd& Dr,
                               const ZeroOptions& opt) {
  const Eigen::Index k = rom.order(), n = rom.inputs();
  if (Dr.rows() != n || Dr.cols() != n) throw Error(Errc::ShapeMismatch, "Dr must be n x n");
  Eigen::LLT<MatrixXd> dr_llt(Dr + Dr.transpose());
  if (dr_llt.info() != Eigen::Success || min_eig(Dr + Dr.transpose()) <= 0.0)
    throw Error(Errc::DefinitenessViolation, "Dr + Dr^T must be positive definite");

  const MatrixXd Dt = feedthrough(rom) + Dr;
  const Eigen::Index m = 2 * k + n;
  MatrixXd M1 = MatrixXd::Zero(m, m), M2 = MatrixXd::Zero(m, m);
  M1.block(0, k, k, k) = rom.A;
  M1.block(0, 2 * k, k, n) = rom.B;
  M1.block(k, 0, k, k) = rom.A.transpose();
  M1.block(k, 2 * k, k, n) = rom.C.transpose();
  M1.block(2 * k, 0, n, k) = rom.B.transpose();
  M1.block(2 * k, k, n, k) = rom.C;
  M1.block(2 * k, 2 * k, n, n) = Dt + Dt.transpose();
  M2.block(0, k, k, k) = rom.E;
  M2.block(k, 0, k, k) = -rom.E.transpose();

  Eigen::GeneralizedEigenSolver<MatrixXd> ges(M1, M2, false);
  if (ges.info() != Eigen::Success) throw Error(Errc::EigensolveFailure, "QZ did not converge");

  SpectralZeroSet out;
  out.Dr = Dr;
  const double bscale = std::max(1.0, M2.norm());
  std::vector<cplx> upper;  // Im > 0 or real, Re > 0
  for (Eigen::Index i = 0; i < m; ++i) {
    const cplx a = ges.alphas()(i);
    const double b = ges.betas()(i);
    if (std::abs(b) <= opt.beta_tol * bscale) continue;
    const cplx s = a / b;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || std::abs(s) > opt.cutoff) continue;
    out.finite.push_back(s);
    const double scale = std::max(1.0, std::abs(s));
    if (!(s.real() > 1e-10 * scale)) continue;
    if (opt.max_freq > 0.0 && std::abs(s.imag()) > opt.max_freq) continue;
    if (s.imag() < -1e-12 * scale) continue;  // represented by the conjugate of its partner
    upper.push_back(std::abs(s.imag()) <= 1e-12 * scale ? cplx(s.real(), 0.0) : s);
  }
  std::sort(upper.begin(), upper.end(), [](cplx x, cplx y) {
    if (x.imag() != y.imag()) return x.imag() < y.imag();
    return x.real() < y.real();
  });

  const MatrixXc M1c = M1.cast<cplx>(), M2c = M2.cast<cplx>();
  for (const cplx s : upper) {
    Eigen::JacobiSVD<MatrixXc> svd(M1c - s * M2c, Eigen::ComputeFullV);
    const VectorXc v = svd.matrixV().col(m - 1);
    VectorXc r = v.tail(n);
    if (r.norm() <= 1e-8 * v.norm()) {
      ++out.dropped_degenerate;
      continue;
    }
    r /= r.norm();
    if (s.imag() == 0.0) {
      Eigen::Index idx;
      r.cwiseAbs().maxCoeff(&idx);
      r *= std::conj(r(idx)) / std::abs(r(idx));
      r = r.real().cast<cplx>();
      r /= r.norm();
      out.zeros.push_back({s, r});
    } else {
      out.zeros.push_back({s, r});
      out.zeros.push_back({std::conj(s), r.conjugate()});
    }
  }
  if (out.zeros.empty())
    throw Error(Errc::EmptyZeroSet, std::to_string(out.finite.size()) +
                                        " finite eigenvalues, none retained (" +
                                        std::to_string(out.dropped_degenerate) + " degenerate)");
  return out;
}

PassivityCertificate passivity_check(const RealDescriptor& sys, const VectorXd& grid,
                                     const CertificateOptions& opt) {
  PassivityCertificate c;
  c.grid = grid;
  c.min_popov_eig.resize(grid.size());
  bool missing = false;
  c.min_popov = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    try {
      const MatrixXc G = eval_transfer(sys, cplx(0.0, grid(i)));
      Eigen::SelfAdjointEigenSolver<MatrixXc> es(G + G.adjoint(), Eigen::EigenvaluesOnly);
      c.min_popov_eig(i) = es.eigenvalues()(0);
      c.min_popov = std::min(c.min_popov, c.min_popov_eig(i));
    } catch (const Error&) {
      c.min_popov_eig(i) = std::numeric_limits<double>::quiet_NaN();
      missing = true;
    }
  }
  c.spectral_abscissa = spectral_abscissa(sys);
  if (c.spectral_abscissa > opt.tol_stab || c.min_popov < -opt.tol_popov)
    c.verdict = Verdict::NotPassive;
  else if (missing || !std::isfinite(c.spectral_abscissa))
    c.verdict = Verdict::Inconclusive;
  else
    c.verdict = Verdict::Passive;
  return c;
}

PassiveResult passive_reduce(const RealDescriptor& rom, const MatrixXd& Dr,
                             const PassiveOptions& opt, const PhOperator* fom) {
  PassiveResult res;
  res.zeros = spectral_zeros(rom, Dr, opt.zeros);
  const Eigen::Index n = rom.inputs();
  const MatrixXc Drc = Dr.cast<cplx>();
  auto shifted = [&](cplx s) { return MatrixXc(eval_transfer(rom, s) + Drc); };

  for (const auto& z : res.zeros.zeros) {
    const MatrixXc Gs = shifted(z.s);
    const MatrixXc Gm = shifted(-std::conj(z.s));
    const VectorXc w = Gs * z.r;
    const Eigen::RowVectorXcd l = z.r.adjoint();
    const Eigen::RowVectorXcd v = opt.left_values == LeftValues::Mu ? Eigen::RowVectorXcd(l * Gm)
                                                                    : Eigen::RowVectorXcd(l * Gs);
    res.data.right.push_back({z.s, z.r, w, -1});
    res.data.left.push_back({-std::conj(z.s), l, v, -1});
    res.max_zero_residual =
        std::max(res.max_zero_residual, ((Gs + Gm.adjoint()) * z.r).norm() / z.r.norm());
  }

  const LoewnerPencil pencil = build_pencil(res.data);
  const MatrixXd Dt = feedthrough(rom) + Dr;
  const ComplexDescriptor cd = opt.realization == Realization::Feedthrough
                                   ? realize_with_feedthrough(pencil, Dt)
                                   : [&] {
                                       ComplexDescriptor d;
                                       d.E = -pencil.L;
                                       d.A = -pencil.sL;
                                       d.B = pencil.V;
                                       d.C = pencil.W;
                                       d.D = MatrixXc::Zero(n, n);
                                       return d;
                                     }();
  const RealRealization rr = real_transform(cd, left_points(res.data), right_points(res.data));
  res.rom.sys = rr.sys;
  res.rom.sys.D = (opt.realization == Realization::Feedthrough ? Dt : MatrixXd::Zero(n, n)) - Dr;
  res.rom.provenance = Provenance::SpectralZero;

  try {
    const PhFactors f = extract_ph(res.rom);
    res.rom.sys.Q = f.Q;
  } catch (const Error&) {
    // no definite storage; energy of this model stays undefined
  }

  if (fom) {
    MatrixXc Cb(fom->order(), static_cast<Eigen::Index>(res.data.right.size()));
    const MatrixXc Bc = fom->B().cast<cplx>();
    for (std::size_t j = 0; j < res.data.right.size(); ++j)
      Cb.col(static_cast<Eigen::Index>(j)) =
          resolvent(*fom, res.data.right[j].lambda).solve(Bc * res.data.right[j].r);
    const MatrixXc T = Cb * rr.JR;
    const double im = T.imag().norm() / std::max(T.norm(), 1e-300);
    if (im > 1e-10)
      throw Error(Errc::NonConjugateOrdering, "projector has imaginary residue " + sci(im));
    res.rom.T = T.real();
  }

  res.certificate = passivity_check(res.rom.sys, opt.grid, opt.certificate);
  if (opt.require_certificate && res.certificate.verdict != Verdict::Passive)
    throw Error(Errc::CertificateFailure,
                "verdict " + verdict_name(res.certificate.verdict) + ", min Popov eigenvalue " +
                    sci(res.certificate.min_popov) + ", spectral abscissa " +
                    sci(res.certificate.spectral_abscissa));
  return res;
}

PhFactors extract_ph(const Rom& rom) {
  if (rom.provenance != Provenance::SpectralZero)
    throw Error(Errc::NotDefinite, "extraction needs a spectral-zero model");
  const RealDescriptor& s = rom.sys;
  const double asym = (s.E - s.E.transpose()).norm();
  if (asym > 1e-6 * std::max(1.0, s.E.norm()))
    throw Error(Errc::NotDefinite, "E is not symmetric (" + sci(asym) + ")");
  const MatrixXd Es = sym(s.E);

  PhFactors f;
  Eigen::LLT<MatrixXd> llt;
  if (llt.compute(-Es); llt.info() == Eigen::Success) {
    f.Q = -Es;
    f.loewner_positive = true;
  } else if (llt.compute(Es); llt.info() == Eigen::Success) {
    f.Q = Es;
  } else {
    throw Error(Errc::NotDefinite, "neither E nor -E is positive definite");
  }

  Eigen::PartialPivLU<MatrixXd> Elu(s.E);
  const MatrixXd As = Elu.solve(s.A), Bs = Elu.solve(s.B);
  const MatrixXd Qinv = llt.solve(MatrixXd::Identity(Es.rows(), Es.cols()));
  const MatrixXd M = As * Qinv;
  f.J = 0.5 * (M - M.transpose());
  f.R = -0.5 * (M + M.transpose());
  const MatrixXd QiCt = Qinv * s.C.transpose();
  f.G = 0.5 * (Bs + QiCt);
  f.P = 0.5 * (QiCt - Bs);
  const MatrixXd D = feedthrough(s);
  f.S = sym(D);
  f.N = 0.5 * (D - D.transpose());

  f.skew_residual = (f.J + f.J.transpose()).norm();
  f.min_eig_R = min_eig(f.R);
  const Eigen::Index k = f.R.rows(), n = f.S.rows();
  MatrixXd W(k + n, k + n);
  W << f.R, f.P, f.P.transpose(), f.S;
  f.min_eig_W = min_eig(W);
  return f;
}

MatrixXc ph_transfer(const PhFactors& f, cplx s) {
  const Eigen::Index k = f.Q.rows();
  const MatrixXc A = ((f.J - f.R) * f.Q).cast<cplx>();
  const MatrixXc B = (f.G - f.P).cast<cplx>();
  const MatrixXc C = ((f.G + f.P).transpose() * f.Q).cast<cplx>();
  const MatrixXc M = s * MatrixXc::Identity(k, k) - A;
  return C * M.partialPivLu().solve(B) + (f.S + f.N).cast<cplx>();
}

}  // namespace phs

#include "phsmor/simulate.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace phs {

namespace {

void check_options(const SimOptions& opt, Eigen::Index n) {
  if (!(opt.dt > 0.0) || !(opt.T > 0.0) || opt.decimation < 1)
    throw Error(Errc::InvalidConfig, "simulation needs dt > 0, T > 0, decimation >= 1");
  if (opt.feedback) {
    if (opt.feedback->K.rows() != n || opt.feedback->K.cols() != n || opt.feedback->r.size() != n)
      throw Error(Errc::ShapeMismatch, "feedback K must be n x n and r of size n");
  }
}

Eigen::Index step_count(const SimOptions& opt) {
  return static_cast<Eigen::Index>(std::llround(opt.T / opt.dt));
}

Trajectory allocate(Eigen::Index n, Eigen::Index N, Eigen::Index steps, const SimOptions& opt) {
  Trajectory tr;
  tr.dt = opt.dt;
  tr.decimation = opt.decimation;
  tr.t = VectorXd::LinSpaced(steps + 1, 0.0, opt.dt * static_cast<double>(steps));
  tr.u.resize(n, steps + 1);
  tr.y.resize(n, steps + 1);
  tr.H.resize(steps + 1);
  tr.um.resize(n, steps);
  tr.ym.resize(n, steps);
  tr.dissipation = VectorXd::Zero(steps);
  const Eigen::Index kept = steps / opt.decimation + 1;
  tr.X.resize(N, kept);
  tr.kept.reserve(kept);
  return tr;
}

void keep_state(Trajectory& tr, Eigen::Index k, const VectorXd& x) {
  if (k % tr.decimation != 0) return;
  tr.X.col(static_cast<Eigen::Index>(tr.kept.size())) = x;
  tr.kept.push_back(k);
}

VectorXd checked_input(const InputSignal& u, double t, Eigen::Index n) {
  VectorXd v = u(t);
  if (v.size() != n) throw Error(Errc::ShapeMismatch, "input signal has wrong size");
  return v;
}

}  // namespace

InputSignal zero_input(Eigen::Index n) {
  return [n](double) { return VectorXd::Zero(n); };
}

Trajectory simulate(const AssembledFom& fom, const InputSignal& u, const VectorXd& x0,
                    const SimOptions& opt) {
  const Eigen::Index N = fom.size(), n = fom.B.cols();
  check_options(opt, n);
  if (x0.size() != N) throw Error(Errc::ShapeMismatch, "x0 has wrong size");
  const double dt = opt.dt;
  const Eigen::Index steps = step_count(opt);

  const SpMat Bs = fom.B.sparseView();
  SpMat Kcl = fom.J - fom.R;
  MatrixXd K = MatrixXd::Zero(n, n);
  VectorXd r = VectorXd::Zero(n);
  if (opt.feedback) {
    K = opt.feedback->K;
    r = opt.feedback->r;
    Kcl -= SpMat(Bs * SpMat(K.sparseView()) * SpMat(Bs.transpose()));
  }

  std::vector<Eigen::Triplet<double>> t;
  auto add = [&](const SpMat& m, Eigen::Index r0, Eigen::Index c0, double scale) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it)
        t.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
  };
  add(fom.E, 0, 0, 1.0);
  add(Kcl, 0, N, -dt);
  add(fom.Q, N, 0, -0.5);
  add(fom.E, N, N, 1.0);
  SpMat M(2 * N, 2 * N);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success)
    throw Error(Errc::SingularStepMatrix, "midpoint step matrix could not be factorized");

  Eigen::SimplicialLLT<SpMat> Ellt(fom.E);
  if (Ellt.info() != Eigen::Success) throw Error(Errc::FactorizationFailure, "E");

  Trajectory tr = allocate(n, N, steps, opt);
  VectorXd x = x0;
  auto record = [&](Eigen::Index k) {
    const VectorXd e = Ellt.solve(VectorXd(fom.Q * x));
    const VectorXd y = fom.B.transpose() * e;
    tr.y.col(k) = y;
    tr.u.col(k) = -K * y + r + checked_input(u, tr.t(k), n);
    tr.H(k) = 0.5 * x.dot(fom.Q * x);
    keep_state(tr, k, x);
  };
  record(0);

  VectorXd rhs(2 * N), z(2 * N);
  for (Eigen::Index k = 0; k < steps; ++k) {
    const VectorXd v = r + checked_input(u, tr.t(k) + 0.5 * dt, n);
    rhs.head(N) = fom.E * x + dt * (fom.B * v);
    rhs.tail(N) = 0.5 * (fom.Q * x);
    z = lu.solve(rhs);
    if (!z.allFinite())
      throw Error(Errc::SingularStepMatrix, "non-finite state at step " + std::to_string(k));
    const auto em = z.tail(N);
    const VectorXd ym = fom.B.transpose() * em;
    tr.ym.col(k) = ym;
    tr.um.col(k) = -K * ym + v;
    tr.dissipation(k) = em.dot(fom.R * em);
    x = z.head(N);
    record(k + 1);
  }
  return tr;
}

Trajectory simulate(const RealDescriptor& sys, const InputSignal& u, const VectorXd& x0,
                    const SimOptions& opt) {
  const Eigen::Index N = sys.order(), n = sys.inputs();
  check_options(opt, n);
  if (x0.size() != N) throw Error(Errc::ShapeMismatch, "x0 has wrong size");
  const double dt = opt.dt;
  const Eigen::Index steps = step_count(opt);

  const MatrixXd D = sys.D.size() ? sys.D : MatrixXd::Zero(n, n);
  MatrixXd K = MatrixXd::Zero(n, n);
  VectorXd r = VectorXd::Zero(n);
  if (opt.feedback) {
    K = opt.feedback->K;
    r = opt.feedback->r;
  }
  // u_eff = F (-K C x + v) with F = (I + K D)^{-1}
  Eigen::PartialPivLU<MatrixXd> Flu(MatrixXd::Identity(n, n) + K * D);
  if (!(Flu.rcond() > 1e-14)) throw Error(Errc::SingularStepMatrix, "I + K D is singular");
  const MatrixXd F = Flu.inverse();
  const MatrixXd Acl = sys.A - sys.B * F * K * sys.C;
  const MatrixXd Bcl = sys.B * F;

  Eigen::PartialPivLU<MatrixXd> lu(sys.E - 0.5 * dt * Acl);
  if (!(lu.rcond() > 1e-14))
    throw Error(Errc::SingularStepMatrix, "E - dt/2 A is singular for dt = " + std::to_string(dt));
  const MatrixXd Ep = sys.E + 0.5 * dt * Acl;

  Trajectory tr = allocate(n, N, steps, opt);
  auto effective = [&](const VectorXd& x, const VectorXd& v) -> VectorXd {
    return F * (-K * (sys.C * x) + v);
  };
  VectorXd x = x0;
  auto record = [&](Eigen::Index k) {
    const VectorXd ue = effective(x, r + checked_input(u, tr.t(k), n));
    tr.u.col(k) = ue;
    tr.y.col(k) = sys.C * x + D * ue;
    tr.H(k) = sys.Q ? 0.5 * x.dot(*sys.Q * x) : std::numeric_limits<double>::quiet_NaN();
    keep_state(tr, k, x);
  };
  record(0);

  for (Eigen::Index k = 0; k < steps; ++k) {
    const VectorXd v = r + checked_input(u, tr.t(k) + 0.5 * dt, n);
    const VectorXd xn = lu.solve(Ep * x + dt * (Bcl * v));
    if (!xn.allFinite())
      throw Error(Errc::SingularStepMatrix, "non-finite state at step " + std::to_string(k));
    const VectorXd xm = 0.5 * (x + xn);
    const VectorXd ue = effective(xm, v);
    tr.um.col(k) = ue;
    tr.ym.col(k) = sys.C * xm + D * ue;
    x = xn;
    record(k + 1);
  }
  return tr;
}

BalanceReport energy_balance_report(const Trajectory& tr, const AssembledFom& fom) {
  const Eigen::Index steps = tr.steps();
  BalanceReport rep;
  rep.residual.resize(steps);
  rep.max_H = tr.H.maxCoeff();
  const bool full = tr.decimation == 1 && tr.X.cols() == steps + 1 && tr.X.rows() == fom.size();
  std::optional<Eigen::SimplicialLLT<SpMat>> Ellt;
  if (full) Ellt.emplace(fom.E);
  for (Eigen::Index k = 0; k < steps; ++k) {
    double diss = tr.dissipation(k);
    double Hk = tr.H(k), Hk1 = tr.H(k + 1);
    if (full) {
      const VectorXd xm = 0.5 * (tr.X.col(k) + tr.X.col(k + 1));
      const VectorXd em = Ellt->solve(VectorXd(fom.Q * xm));
      diss = em.dot(fom.R * em);
      Hk = 0.5 * tr.X.col(k).dot(fom.Q * tr.X.col(k));
      Hk1 = 0.5 * tr.X.col(k + 1).dot(fom.Q * tr.X.col(k + 1));
    }
    rep.residual(k) = (Hk1 - Hk) - tr.dt * (tr.ym.col(k).dot(tr.um.col(k)) - diss);
  }
  rep.max_abs = steps ? rep.residual.cwiseAbs().maxCoeff() : 0.0;
  return rep;
}

}  // namespace phs

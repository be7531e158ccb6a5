#include "phsmor/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "quadrature.hpp"

namespace phs {

std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::SymmetryViolation: return "SymmetryViolation";
    case Errc::DefinitenessViolation: return "DefinitenessViolation";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::BoundaryConditionViolation: return "BoundaryConditionViolation";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::UnknownPreset: return "UnknownPreset";
    case Errc::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case Errc::InvalidN: return "InvalidN";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::StructureViolation: return "StructureViolation";
    case Errc::FactorizationFailure: return "FactorizationFailure";
    case Errc::SingularStepMatrix: return "SingularStepMatrix";
    case Errc::NearSingularPencil: return "NearSingularPencil";
    case Errc::CollidingPoints: return "CollidingPoints";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::RankDeficientData: return "RankDeficientData";
    case Errc::NonConjugateOrdering: return "NonConjugateOrdering";
    case Errc::DataModelMismatch: return "DataModelMismatch";
    case Errc::EigensolveFailure: return "EigensolveFailure";
    case Errc::EmptyZeroSet: return "EmptyZeroSet";
    case Errc::CertificateFailure: return "CertificateFailure";
    case Errc::NotDefinite: return "NotDefinite";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

bool is_validation_error(Errc e) {
  switch (e) {
    case Errc::SymmetryViolation:
    case Errc::DefinitenessViolation:
    case Errc::RankDeficient:
    case Errc::BoundaryConditionViolation:
    case Errc::ShapeMismatch:
    case Errc::UnknownPreset:
    case Errc::NonPositiveCoefficient:
    case Errc::InvalidN:
    case Errc::InvalidConfig:
    case Errc::CollidingPoints:
      return true;
    default:
      return false;
  }
}

SpatialFunction SpatialFunction::constant(const MatrixXd& m) {
  return {[m](double) { return m; }, m.rows(), m.cols()};
}

SpatialFunction SpatialFunction::diagonal(std::vector<std::function<double(double)>> entries) {
  const auto k = static_cast<Eigen::Index>(entries.size());
  return {[entries = std::move(entries), k](double z) {
            MatrixXd m = MatrixXd::Zero(k, k);
            for (Eigen::Index i = 0; i < k; ++i) m(i, i) = entries[i](z);
            return m;
          },
          k, k};
}

MatrixXd BcPhsSpec::H(double z) const {
  MatrixXd h = MatrixXd::Zero(n(), n());
  h.topLeftCorner(n1, n1) = H1(z);
  h.bottomRightCorner(n2, n2) = H2(z);
  return h;
}

std::vector<double> chebyshev_points(double a, double b, int m) {
  std::vector<double> z(m);
  for (int k = 0; k < m; ++k) {
    const double t = std::cos(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * m));
    z[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  return z;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

Eigen::Index numeric_rank(const MatrixXd& m, double rel = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  return (s.array() > rel * s(0)).count();
}

MatrixXd bc_form(const MatrixXd& Pinv) {
  const auto n = Pinv.rows();
  MatrixXd M = MatrixXd::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = Pinv;
  M.bottomRightCorner(n, n) = -Pinv;
  return M;
}

}  // namespace

std::vector<Violation> check(const BcPhsSpec& s, const Tolerances& tol) {
  std::vector<Violation> out;
  const int n = s.n();
  if (s.n1 < 0 || s.n2 < 0 || n == 0 || s.P.rows() != n || s.P.cols() != n || s.G.rows() != n ||
      s.G.cols() != n || s.VB.rows() != n || s.VB.cols() != 2 * n || s.VC.rows() != n ||
      s.VC.cols() != 2 * n || s.H1.rows != s.n1 || s.H1.cols != s.n1 || s.H2.rows != s.n2 ||
      s.H2.cols != s.n2 || !(s.a < s.b)) {
    out.push_back({Errc::ShapeMismatch, "inconsistent dimensions or interval", 0.0});
    return out;
  }

  const double asym = (s.P - s.P.transpose()).norm();
  if (asym > tol.bc) out.push_back({Errc::SymmetryViolation, "P is not symmetric", asym});

  Eigen::JacobiSVD<MatrixXd> psvd(s.P);
  const auto& ps = psvd.singularValues();
  const double condP = ps(n - 1) > 0.0 ? ps(0) / ps(n - 1) : INFINITY;
  if (!(condP < tol.cond_P))
    out.push_back({Errc::RankDeficient, "P is singular or ill-conditioned (cond " + fmt(condP) + ")",
                   condP});

  const double gnorm = s.G.norm();
  const double tol_psd = tol.psd_rel * gnorm;
  if (gnorm > 0.0) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s.G + s.G.transpose(), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < -tol_psd)
      out.push_back({Errc::DefinitenessViolation, "G + G^T is not positive semi-definite", lmin});
  }

  for (double z : chebyshev_points(s.a, s.b, tol.samples)) {
    const MatrixXd h1 = s.H1(z), h2 = s.H2(z);
    for (const MatrixXd* h : {&h1, &h2}) {
      if (h->size() == 0) continue;
      if (!h->allFinite()) {
        out.push_back({Errc::DefinitenessViolation, "H is not finite at z=" + fmt(z), z});
        return out;
      }
      if ((*h - h->transpose()).norm() > tol.bc * std::max(1.0, h->norm())) {
        out.push_back({Errc::SymmetryViolation, "H is not symmetric at z=" + fmt(z), z});
        return out;
      }
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(*h, Eigen::EigenvaluesOnly);
      if (!(es.eigenvalues()(0) > 0.0)) {
        out.push_back({Errc::DefinitenessViolation, "H is not positive definite at z=" + fmt(z),
                       es.eigenvalues()(0)});
        return out;
      }
    }
  }

  if (numeric_rank(s.VB) != n) out.push_back({Errc::RankDeficient, "VB does not have rank n", 0.0});
  if (numeric_rank(s.VC) != n) out.push_back({Errc::RankDeficient, "VC does not have rank n", 0.0});

  if (condP < tol.cond_P) {
    const MatrixXd M = bc_form(s.P.inverse());
    const double rb = (s.VB * M * s.VB.transpose()).norm();
    const double rc = (s.VC * M * s.VC.transpose()).norm();
    if (rb > tol.bc)
      out.push_back({Errc::BoundaryConditionViolation,
                     "VB diag(P^-1, -P^-1) VB^T != 0 (norm " + fmt(rb) + ")", rb});
    if (rc > tol.bc)
      out.push_back({Errc::BoundaryConditionViolation,
                     "VC diag(P^-1, -P^-1) VC^T != 0 (norm " + fmt(rc) + ")", rc});
  }

  MatrixXd half = MatrixXd::Zero(2 * n, 2 * n);
  half.topLeftCorner(n, n) = 0.5 * s.P;
  half.bottomRightCorner(n, n) = -0.5 * s.P;
  const MatrixXd Jxi = half - s.VC.transpose() * s.VB;
  const double skew = (Jxi + Jxi.transpose()).norm();
  if (skew > tol.bc)
    out.push_back({Errc::BoundaryConditionViolation,
                   "1/2 diag(P, -P) - VC^T VB is not skew (norm " + fmt(skew) + ")", skew});
  return out;
}

ValidatedModel validate(const BcPhsSpec& spec, const Tolerances& tol) {
  const auto v = check(spec, tol);
  if (!v.empty()) {
    std::string msg = v.front().detail;
    for (std::size_t i = 1; i < v.size(); ++i) msg += "; " + v[i].detail;
    throw Error(v.front().kind, msg);
  }
  const int n = spec.n();
  ValidatedModel m;
  m.spec = spec;
  MatrixXd half = MatrixXd::Zero(2 * n, 2 * n);
  half.topLeftCorner(n, n) = 0.5 * spec.P;
  half.bottomRightCorner(n, n) = -0.5 * spec.P;
  m.Jxi = half - spec.VC.transpose() * spec.VB;
  m.iep = (spec.G + spec.G.transpose()).norm() <= tol.psd_rel * spec.G.norm();
  return m;
}

namespace {

void require_positive(std::initializer_list<std::pair<const char*, double>> coeffs) {
  for (const auto& [name, v] : coeffs)
    if (!(v > 0.0)) throw Error(Errc::NonPositiveCoefficient, std::string(name) + " must be > 0");
}

MatrixXd rows(int r, int c, std::initializer_list<double> v) {
  MatrixXd m(r, c);
  auto it = v.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = *it++;
  return m;
}

}  // namespace

BcPhsSpec preset(std::string_view name, const PresetParams& p) {
  if (!(p.a < p.b)) throw Error(Errc::ShapeMismatch, "interval must satisfy a < b");
  BcPhsSpec s;
  s.name = std::string(name);
  s.a = p.a;
  s.b = p.b;
  if (name == "wave_neumann" || name == "wave_mixed") {
    require_positive({{"T0", p.T0}, {"rho0", p.rho0}});
    s.n1 = s.n2 = 1;
    s.P = rows(2, 2, {0, 1, 1, 0});
    s.G = MatrixXd::Zero(2, 2);
    s.H1 = SpatialFunction::constant(MatrixXd::Constant(1, 1, p.T0));
    s.H2 = SpatialFunction::constant(MatrixXd::Constant(1, 1, 1.0 / p.rho0));
    // boundary vector ordering: [e1(b), e2(b), e1(a), e2(a)]
    if (name == "wave_neumann") {
      s.VB = rows(2, 4, {0, 0, 1, 0, 1, 0, 0, 0});
      s.VC = rows(2, 4, {0, 0, 0, -1, 0, 1, 0, 0});
    } else {
      s.VB = rows(2, 4, {0, 0, 0, 1, 1, 0, 0, 0});
      s.VC = rows(2, 4, {0, 0, -1, 0, 0, 1, 0, 0});
    }
    return s;
  }
  if (name == "timoshenko") {
    require_positive({{"K", p.K}, {"EI", p.EI}, {"rho", p.rho}, {"Irho", p.Irho}});
    if (p.g1 < 0.0 || p.g2 < 0.0)
      throw Error(Errc::NonPositiveCoefficient, "g1, g2 must be >= 0");
    s.n1 = s.n2 = 2;
    s.P = MatrixXd::Zero(4, 4);
    s.P.topRightCorner(2, 2).setIdentity();
    s.P.bottomLeftCorner(2, 2).setIdentity();
    const MatrixXd G12 = rows(2, 2, {0, 1, 0, 0});
    s.G = MatrixXd::Zero(4, 4);
    s.G.topRightCorner(2, 2) = G12;
    s.G.bottomLeftCorner(2, 2) = -G12.transpose();
    s.G(2, 2) = p.g1;
    s.G(3, 3) = p.g2;
    s.H1 = SpatialFunction::constant(rows(2, 2, {p.K, 0, 0, p.EI}));
    s.H2 = SpatialFunction::constant(rows(2, 2, {1.0 / p.rho, 0, 0, 1.0 / p.Irho}));
    // u = (e3(a), e4(a), e1(b), e2(b)),  y = (-e1(a), -e2(a), e3(b), e4(b))
    s.VB = MatrixXd::Zero(4, 8);
    s.VB(0, 6) = s.VB(1, 7) = s.VB(2, 0) = s.VB(3, 1) = 1.0;
    s.VC = MatrixXd::Zero(4, 8);
    s.VC(0, 4) = s.VC(1, 5) = -1.0;
    s.VC(2, 2) = s.VC(3, 3) = 1.0;
    return s;
  }
  throw Error(Errc::UnknownPreset, std::string(name));
}

double hamiltonian_density(const ValidatedModel& model, const SpatialFunction& x,
                           const Quadrature& q) {
  const auto& s = model.spec;
  if (x.rows != s.n() || x.cols != 1)
    throw Error(Errc::ShapeMismatch, "state function must be n x 1");
  const double h = (s.b - s.a) / q.panels;
  double acc = 0.0;
  for (int p = 0; p < q.panels; ++p) {
    detail::integrate_on<detail::GaussRule5>(s.a + p * h, s.a + (p + 1) * h, [&](double z, double w) {
      const VectorXd v = x(z);
      acc += w * v.dot(s.H(z) * v);
    });
  }
  return 0.5 * acc;
}

}  // namespace phs

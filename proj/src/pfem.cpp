#include "phsmor/pfem.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "quadrature.hpp"

namespace phs {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Element index containing z, clamped to the last element at z = b.
int element_of(const Basis& B, double z) {
  int e = static_cast<int>(std::floor((z - B.a) / B.h));
  return std::clamp(e, 0, B.N - 2);
}

bool same_mesh(const Basis& x, const Basis& y) {
  return x.N == y.N && x.a == y.a && x.b == y.b;
}

// Scalar interaction matrices between two bases. mass(k, l) = int phi_k psi_l w,
// deriv(k, l) = int phi_k psi_l'. Closed form on a shared mesh, exact Gauss
// quadrature on merged breakpoints otherwise.
struct Pairing {
  MatrixXd mass, deriv;
};

Pairing pair_bases(const Basis& x, const Basis& y) {
  Pairing p{MatrixXd::Zero(x.N, y.N), MatrixXd::Zero(x.N, y.N)};
  if (same_mesh(x, y)) {
    const double h = x.h;
    for (int e = 0; e + 1 < x.N; ++e) {
      p.mass(e, e) += h / 3.0;
      p.mass(e + 1, e + 1) += h / 3.0;
      p.mass(e, e + 1) += h / 6.0;
      p.mass(e + 1, e) += h / 6.0;
      p.deriv(e, e) -= 0.5;
      p.deriv(e, e + 1) += 0.5;
      p.deriv(e + 1, e) -= 0.5;
      p.deriv(e + 1, e + 1) += 0.5;
    }
    return p;
  }
  std::vector<double> cuts(x.nodes.data(), x.nodes.data() + x.N);
  cuts.insert(cuts.end(), y.nodes.data(), y.nodes.data() + y.N);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double u, double v) { return std::abs(u - v) < 1e-14; }),
             cuts.end());
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c], hi = cuts[c + 1];
    const int ex = element_of(x, 0.5 * (lo + hi)), ey = element_of(y, 0.5 * (lo + hi));
    detail::integrate_on<detail::GaussRule3>(lo, hi, [&](double z, double w) {
      for (int k = ex; k <= ex + 1; ++k)
        for (int l = ey; l <= ey + 1; ++l) {
          const double fk = x.phi(k, z);
          p.mass(k, l) += w * fk * y.phi(l, z);
          p.deriv(k, l) += w * fk * (l == ey ? -1.0 / y.h : 1.0 / y.h);
        }
    });
  }
  return p;
}

// Weighted mass for one field group: block (c, d) = int phi_k H_cd phi_l.
SpMat weighted_mass(const Basis& B, const SpatialFunction& H, Eigen::Index nfields) {
  Triplets t;
  for (int e = 0; e + 1 < B.N; ++e) {
    detail::integrate_on<detail::GaussRule3>(B.nodes(e), B.nodes(e + 1), [&](double z, double w) {
      const MatrixXd h = H(z);
      if (!h.allFinite())
        throw Error(Errc::QuadratureFailure, "non-finite coefficient at z=" + sci(z));
      const double f[2] = {B.phi(e, z), B.phi(e + 1, z)};
      for (Eigen::Index c = 0; c < nfields; ++c)
        for (Eigen::Index d = 0; d < nfields; ++d) {
          if (h(c, d) == 0.0) continue;
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              t.emplace_back(c * B.N + e + i, d * B.N + e + j, w * h(c, d) * f[i] * f[j]);
        }
    });
  }
  SpMat m(nfields * B.N, nfields * B.N);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat kron_identity(Eigen::Index k, const MatrixXd& m) {
  Triplets t;
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0.0) t.emplace_back(c * m.rows() + i, c * m.cols() + j, m(i, j));
  SpMat s(k * m.rows(), k * m.cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

}  // namespace

double Basis::phi(int i, double z) const {
  const double r = 1.0 - std::abs(z - nodes(i)) / h;
  return r > 0.0 ? r : 0.0;
}

double Basis::dphi(int i, double z) const {
  const int e = element_of(*this, z);
  if (i == e) return -1.0 / h;
  if (i == e + 1) return 1.0 / h;
  return 0.0;
}

Basis build_basis(double a, double b, int N) {
  if (N < 2) throw Error(Errc::InvalidN, "basis needs N >= 2, got " + std::to_string(N));
  if (!(a < b)) throw Error(Errc::ShapeMismatch, "interval must satisfy a < b");
  Basis B;
  B.N = N;
  B.a = a;
  B.b = b;
  B.h = (b - a) / (N - 1);
  B.nodes = VectorXd::LinSpaced(N, a, b);
  return B;
}

Eigen::Index AssembledFom::offset(int field) const {
  const int n1 = model.spec.n1;
  if (field < n1) return static_cast<Eigen::Index>(field) * basis1.N;
  return static_cast<Eigen::Index>(n1) * basis1.N +
         static_cast<Eigen::Index>(field - n1) * basis2.N;
}

FomBlocks assemble_blocks(const ValidatedModel& model, const Basis& b1, const Basis& b2) {
  const auto& s = model.spec;
  const int n = s.n(), n1 = s.n1, n2 = s.n2;
  if (b1.a != s.a || b1.b != s.b || b2.a != s.a || b2.b != s.b)
    throw Error(Errc::ShapeMismatch, "basis interval differs from the model interval");

  const Basis* basis[2] = {&b1, &b2};
  std::vector<Eigen::Index> off(n + 1, 0);
  for (int c = 0; c < n; ++c) off[c + 1] = off[c] + (c < n1 ? b1.N : b2.N);
  const Eigen::Index Nt = off[n];
  auto group = [&](int c) { return c < n1 ? 0 : 1; };

  FomBlocks blk;
  const Pairing self1 = pair_bases(b1, b1), self2 = pair_bases(b2, b2);
  blk.E1 = kron_identity(n1, self1.mass);
  blk.E2 = kron_identity(n2, self2.mass);
  blk.Q1 = weighted_mass(b1, s.H1, n1);
  blk.Q2 = weighted_mass(b2, s.H2, n2);

  Pairing pairs[2][2] = {{self1, pair_bases(b1, b2)}, {pair_bases(b2, b1), self2}};
  Triplets tp, tg;
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d) {
      const Pairing& pr = pairs[group(c)][group(d)];
      const double p = s.P(c, d), g = s.G(c, d);
      if (p == 0.0 && g == 0.0) continue;
      for (Eigen::Index k = 0; k < pr.mass.rows(); ++k)
        for (Eigen::Index l = 0; l < pr.mass.cols(); ++l) {
          if (p != 0.0 && pr.deriv(k, l) != 0.0) tp.emplace_back(off[c] + k, off[d] + l, p * pr.deriv(k, l));
          if (g != 0.0 && pr.mass(k, l) != 0.0) tg.emplace_back(off[c] + k, off[d] + l, g * pr.mass(k, l));
        }
    }
  blk.DP.resize(Nt, Nt);
  blk.DP.setFromTriplets(tp.begin(), tp.end());
  blk.DG.resize(Nt, Nt);
  blk.DG.setFromTriplets(tg.begin(), tg.end());

  blk.Omega = MatrixXd::Zero(Nt, 2 * n);
  for (int c = 0; c < n; ++c) {
    const int N = basis[group(c)]->N;
    blk.Omega(off[c] + N - 1, c) = 1.0;
    blk.Omega(off[c], n + c) = 1.0;
  }
  return blk;
}

AssembledFom assemble_fom(const ValidatedModel& model, const Basis& b1, const Basis& b2) {
  AssembledFom f;
  f.model = model;
  f.basis1 = b1;
  f.basis2 = b2;
  f.iep = model.iep;
  f.blocks = assemble_blocks(model, b1, b2);
  const auto& s = model.spec;
  const auto& blk = f.blocks;
  const Eigen::Index N1 = blk.E1.rows(), N2 = blk.E2.rows(), Nt = N1 + N2;

  auto block_diag = [&](const SpMat& x, const SpMat& y) {
    Triplets t;
    for (int k = 0; k < x.outerSize(); ++k)
      for (SpMat::InnerIterator it(x, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < y.outerSize(); ++k)
      for (SpMat::InnerIterator it(y, k); it; ++it)
        t.emplace_back(N1 + it.row(), N1 + it.col(), it.value());
    SpMat m(Nt, Nt);
    m.setFromTriplets(t.begin(), t.end());
    return m;
  };
  f.E = block_diag(blk.E1, blk.E2);
  f.Q = block_diag(blk.Q1, blk.Q2);

  const SpMat DGt = SpMat(blk.DG.transpose());
  const MatrixXd boundary = blk.Omega * (s.VC.transpose() * s.VB) * blk.Omega.transpose();
  f.J = blk.DP - 0.5 * (blk.DG - DGt) - boundary.sparseView();
  f.J.prune(0.0);
  f.R = 0.5 * (blk.DG + DGt);
  f.R.prune(0.0);
  f.B = blk.Omega * s.VC.transpose();

  const double jn = f.J.norm();
  const double skew = SpMat(f.J + SpMat(f.J.transpose())).norm();
  if (skew > 1e-12 * std::max(1.0, jn))
    throw Error(Errc::StructureViolation, "J + J^T has norm " + sci(skew));
  if (f.R.nonZeros() > 0) {
    const double rn = f.R.norm();
    SpMat shifted = f.R;
    for (Eigen::Index i = 0; i < Nt; ++i) shifted.coeffRef(i, i) += 1e-12 * std::max(1.0, rn);
    Eigen::SimplicialLDLT<SpMat> ldlt(shifted);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() < 0.0).any())
      throw Error(Errc::StructureViolation, "R is not positive semi-definite");
  }
  return f;
}

AssembledFom assemble_fom(const ValidatedModel& model, int N1, int N2) {
  const auto& s = model.spec;
  return assemble_fom(model, build_basis(s.a, s.b, N1), build_basis(s.a, s.b, N2));
}

VectorXd project_initial(const AssembledFom& fom, const SpatialFunction& x0) {
  const auto& s = fom.model.spec;
  const int n = s.n();
  if (x0.rows != n || x0.cols != 1) throw Error(Errc::ShapeMismatch, "x0 must be n x 1");
  VectorXd out(fom.size());
  for (int g = 0; g < 2; ++g) {
    const Basis& B = g == 0 ? fom.basis1 : fom.basis2;
    const int first = g == 0 ? 0 : s.n1, last = g == 0 ? s.n1 : n;
    if (first == last) continue;
    const SpMat M = pair_bases(B, B).mass.sparseView();
    Eigen::SimplicialLLT<SpMat> llt(M);
    if (llt.info() != Eigen::Success) throw Error(Errc::FactorizationFailure, "mass matrix");
    MatrixXd rhs = MatrixXd::Zero(B.N, last - first);
    for (int e = 0; e + 1 < B.N; ++e)
      detail::integrate_on<detail::GaussRule5>(B.nodes(e), B.nodes(e + 1), [&](double z, double w) {
        const VectorXd v = x0(z);
        if (!v.allFinite()) throw Error(Errc::QuadratureFailure, "non-finite x0 at z=" + sci(z));
        for (int c = first; c < last; ++c) {
          rhs(e, c - first) += w * B.phi(e, z) * v(c);
          rhs(e + 1, c - first) += w * B.phi(e + 1, z) * v(c);
        }
      });
    const MatrixXd sol = llt.solve(rhs);
    for (int c = first; c < last; ++c) out.segment(fom.offset(c), B.N) = sol.col(c - first);
  }
  return out;
}

double discrete_hamiltonian(const AssembledFom& fom, const VectorXd& x) {
  return 0.5 * x.dot(fom.Q * x);
}

}  // namespace phs

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phsmor/loewner.hpp"
#include "support.hpp"

using namespace phs;
using test::rel;

namespace {

// Stable passive toy: E = I, A = J - R, C = B^T.
RealDescriptor toy(std::mt19937& g, int k, int n) {
  const MatrixXd K = test::gaussian(g, k, k), L = test::gaussian(g, k, k);
  RealDescriptor s;
  s.E = MatrixXd::Identity(k, k);
  s.A = (K - K.transpose()) - (0.2 * L * L.transpose() + 0.1 * MatrixXd::Identity(k, k));
  s.B = test::gaussian(g, k, n);
  s.C = s.B.transpose();
  s.D = MatrixXd::Zero(n, n);
  return s;
}

std::vector<double> linspace(double a, double b, int m) {
  std::vector<double> f(m);
  for (int i = 0; i < m; ++i) f[i] = a + (b - a) * i / (m - 1);
  return f;
}

TangentialData scalar_data() {
  TangentialData d;
  d.right.push_back({cplx(1.0), VectorXc::Ones(1), VectorXc::Constant(1, 0.5), 0});
  d.left.push_back({cplx(2.0), Eigen::RowVectorXcd::Ones(1), Eigen::RowVectorXcd::Constant(1, 1.0 / 3.0), 0});
  return d;
}

}  // namespace

TEST_CASE("scalar Loewner pencil from 1/(s+1)") {
  const LoewnerPencil p = build_pencil(scalar_data());
  CHECK(std::abs(p.L(0, 0) - cplx(-1.0 / 6.0)) <= 1e-15);
  CHECK(std::abs(p.sL(0, 0) - cplx(1.0 / 6.0)) <= 1e-15);
  const ComplexDescriptor r = realize(p);
  CHECK(std::abs(r.E(0, 0) - cplx(1.0 / 6.0)) <= 1e-15);
  CHECK(std::abs(r.A(0, 0) - cplx(-1.0 / 6.0)) <= 1e-15);
  CHECK(std::abs(r.B(0, 0) - cplx(1.0 / 3.0)) <= 1e-15);
  CHECK(std::abs(r.C(0, 0) - cplx(0.5)) <= 1e-15);
  CHECK(std::abs(eval_transfer(r, 1.0)(0, 0) - 0.5) <= 1e-14);
  CHECK(std::abs(eval_transfer(r, 2.0)(0, 0) - 1.0 / 3.0) <= 1e-14);
}

TEST_CASE("data from a two-state system recovers it exactly") {
  std::mt19937 g(1);
  const RealDescriptor s = toy(g, 2, 1);
  const TangentialData d = generate_data(s, {1.0, 2.0});
  REQUIRE(d.right.size() == 2);
  REQUIRE(d.left.size() == 2);
  const LoewnerPencil p = build_pencil(d);
  const ComplexDescriptor r = realize(p);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 10; ++i) {
    const cplx z(u(g), u(g));
    CHECK(rel(eval_transfer(r, z), eval_transfer(s, z)) <= 1e-8);
  }
}

TEST_CASE("redundant data is rank deficient") {
  std::mt19937 g(2);
  const RealDescriptor s = toy(g, 2, 1);
  const LoewnerPencil p = build_pencil(generate_data(s, linspace(0.5, 5.0, 6)));
  try {
    realize(p);
    FAIL("expected RankDeficientData");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RankDeficientData);
  }
}

TEST_CASE("generated data layout") {
  std::mt19937 g(3);
  const RealDescriptor s = toy(g, 5, 2);
  const TangentialData d = generate_data(s, {4.0, 1.0, 3.0, 2.0});
  REQUIRE(d.right.size() == 4);
  CHECK(d.right[0].lambda == cplx(0.0, 1.0));
  CHECK(d.right[1].lambda == cplx(0.0, -1.0));
  CHECK(d.left[0].mu == cplx(0.0, 2.0));
  CHECK(d.right[2].lambda == cplx(0.0, 3.0));
  CHECK(d.right[0].r.isApprox(d.right[1].r.conjugate()));
  CHECK(d.right[1].w.isApprox(d.right[0].w.conjugate()));
  CHECK_THROWS_AS(generate_data(s, {1.0, 1.0}), Error);
}

TEST_CASE("Sylvester identities and tangential interpolation on random data") {
  std::mt19937 g(4);
  for (int trial = 0; trial < 5; ++trial) {
    const RealDescriptor s = toy(g, 12, 2);
    const TangentialData d = generate_data(s, linspace(0.3, 6.0, 8));
    const LoewnerPencil p = build_pencil(d);
    const SylvesterResiduals res = sylvester_residuals(p);
    CHECK(res.L <= 1e-12);
    CHECK(res.sL <= 1e-12);
    const ComplexDescriptor r = realize(p);
    for (const auto& rp : d.right)
      CHECK((eval_transfer(r, rp.lambda) * rp.r - rp.w).norm() <= 1e-8 * rp.w.norm());
    for (const auto& lp : d.left)
      CHECK((lp.l * eval_transfer(r, lp.mu) - lp.v).norm() <= 1e-8 * lp.v.norm());
  }
}

TEST_CASE("real transform keeps the transfer function") {
  std::mt19937 g(5);
  const RealDescriptor s = toy(g, 10, 2);
  const TangentialData d = generate_data(s, linspace(0.5, 4.0, 6));
  const LoewnerPencil p = build_pencil(d);
  const ComplexDescriptor c = realize(p);
  const RealRealization rr = real_transform(c, left_points(d), right_points(d));
  CHECK(rr.imag_residue <= 1e-12);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 10; ++i) {
    const cplx z(u(g), u(g));
    CHECK(rel(eval_transfer(rr.sys, z), eval_transfer(c, z)) <= 1e-10);
  }
}

TEST_CASE("pair transform blocks are unitary and check the layout") {
  const MatrixXc Jt = pair_transform({cplx(0, 1), cplx(0, -1), cplx(2, 0), cplx(1, 3), cplx(1, -3)});
  CHECK((Jt.adjoint() * Jt - MatrixXc::Identity(5, 5)).norm() <= 1e-15);
  try {
    pair_transform({cplx(0, 1), cplx(0, 2)});
    FAIL("expected NonConjugateOrdering");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonConjugateOrdering);
  }
}

TEST_CASE("SVD truncation reveals the order of the data") {
  std::mt19937 g(6);
  const RealDescriptor s = toy(g, 4, 1);
  const TangentialData d = generate_data(s, linspace(0.2, 5.0, 12));
  const LoewnerPencil p = build_pencil(d);
  const RealRealization rr = real_transform(realize(p, 0.0), left_points(d), right_points(d));
  const Truncation t = svd_truncate(rr.sys, 1e-8);
  CHECK(t.k == 4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 10; ++i) {
    const cplx z(u(g), u(g));
    CHECK(rel(eval_transfer(t.rom.sys, z), eval_transfer(s, z)) <= 1e-6);
  }
  const Truncation fixed = svd_truncate(rr.sys, 1e-8, 2);
  CHECK(fixed.k == 2);
}

TEST_CASE("projector identities against a dense model") {
  std::mt19937 g(7);
  const RealDescriptor s = toy(g, 30, 2);
  const TangentialData d = generate_data(s, linspace(0.5, 5.0, 8));
  const LoewnerPencil p = build_pencil(d);
  const RealRealization rr = real_transform(realize(p), left_points(d), right_points(d));
  const MatrixXd X = MatrixXd::Identity(rr.sys.order(), rr.sys.order());
  const Projector pr = build_projector(s, p, rr.JR, X);
  CHECK(pr.res_E <= 1e-10);
  CHECK(pr.res_A <= 1e-10);
  CHECK(pr.res_B <= 1e-10);
  CHECK(pr.res_C <= 1e-10);
  CHECK(pr.T.rows() == 30);
  CHECK(pr.T.cols() == rr.sys.order());
}

TEST_CASE("colliding left and right points are rejected") {
  TangentialData d = scalar_data();
  d.left[0].mu = d.right[0].lambda;
  CHECK_THROWS_AS(build_pencil(d), Error);
}

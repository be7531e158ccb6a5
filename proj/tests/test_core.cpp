#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phsmor/core.hpp"
#include "support.hpp"

using namespace phs;

namespace {

bool has(const std::vector<Violation>& v, Errc e) {
  for (const auto& x : v)
    if (x.kind == e) return true;
  return false;
}

}  // namespace

TEST_CASE("wave with Neumann ports is accepted and Jxi = 1/2 diag(P, -P) - VC^T VB") {
  const ValidatedModel m = validate(preset("wave_neumann"));
  MatrixXd expected(4, 4);
  expected << 0, 0.5, 0, 0, -0.5, 0, 0, 0, 0, 0, 0, -0.5, 0, 0, 0.5, 0;
  CHECK((m.Jxi - expected).norm() == doctest::Approx(0.0));
  CHECK(m.iep);
  MatrixXd P(2, 2);
  P << 0, 1, 1, 0;
  CHECK((m.spec.P - P).norm() == 0.0);
  CHECK(m.spec.H(0.3).isApprox(MatrixXd::Identity(2, 2)));
}

TEST_CASE("wave with mixed ports is accepted") {
  const ValidatedModel m = validate(preset("wave_mixed"));
  CHECK((m.Jxi + m.Jxi.transpose()).norm() <= 1e-14);
  CHECK(m.iep);
}

TEST_CASE("inputs that are not isotropic for diag(P^-1, -P^-1) are rejected") {
  BcPhsSpec s = preset("wave_neumann");
  s.VB = MatrixXd::Zero(2, 4);
  s.VB.leftCols(2).setIdentity();
  CHECK(has(check(s), Errc::BoundaryConditionViolation));
  try {
    validate(s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BoundaryConditionViolation);
  }
}

TEST_CASE("coefficient and preset errors") {
  PresetParams p;
  p.T0 = 0.0;
  CHECK_THROWS_AS(preset("wave_mixed", p), Error);
  try {
    preset("wave_mixed", p);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonPositiveCoefficient);
  }
  try {
    preset("string");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownPreset);
  }
}

TEST_CASE("asymmetric P, indefinite G, singular H and rank deficient ports are reported") {
  BcPhsSpec s = preset("wave_mixed");
  s.P(0, 1) = 2.0;
  CHECK(has(check(s), Errc::SymmetryViolation));

  s = preset("wave_mixed");
  s.G = -MatrixXd::Identity(2, 2);
  CHECK(has(check(s), Errc::DefinitenessViolation));

  s = preset("wave_mixed");
  s.H1 = SpatialFunction::constant(MatrixXd::Constant(1, 1, -1.0));
  CHECK(has(check(s), Errc::DefinitenessViolation));

  s = preset("wave_mixed");
  s.VC.row(1) = s.VC.row(0);
  CHECK(has(check(s), Errc::RankDeficient));
}

TEST_CASE("Timoshenko preset blocks") {
  const BcPhsSpec s = preset("timoshenko");
  CHECK(s.n1 == 2);
  CHECK(s.n2 == 2);
  CHECK(s.P.topRightCorner(2, 2).isIdentity());
  CHECK(s.P.bottomLeftCorner(2, 2).isIdentity());
  CHECK(s.P.topLeftCorner(2, 2).isZero());
  MatrixXd G12(2, 2);
  G12 << 0, 1, 0, 0;
  CHECK(s.G.topRightCorner(2, 2) == G12);
  CHECK(s.G.bottomLeftCorner(2, 2) == MatrixXd(-G12.transpose()));
  CHECK(validate(s).iep);

  PresetParams p;
  p.g1 = 0.3;
  p.g2 = 0.1;
  const ValidatedModel d = validate(preset("timoshenko", p));
  CHECK_FALSE(d.iep);
  CHECK(d.spec.G(2, 2) == 0.3);
  CHECK(d.spec.G(3, 3) == 0.1);
}

TEST_CASE("Hamiltonian density of simple states") {
  const ValidatedModel m = validate(preset("wave_mixed"));
  const auto zero = SpatialFunction::constant(MatrixXd::Zero(2, 1));
  CHECK(hamiltonian_density(m, zero) == 0.0);
  const auto ones = SpatialFunction::constant(MatrixXd::Ones(2, 1));
  CHECK(hamiltonian_density(m, ones) == doctest::Approx(1.0).epsilon(1e-14));

  PresetParams p;
  p.T0 = 2.0;
  p.b = 3.0;
  const ValidatedModel m2 = validate(preset("wave_mixed", p));
  MatrixXd c(2, 1);
  c << 1.5, 0.0;
  // 1/2 T0 c^2 (b - a)
  CHECK(hamiltonian_density(m2, SpatialFunction::constant(c)) == doctest::Approx(0.5 * 2.0 * 2.25 * 3.0));

  CHECK_THROWS_AS(hamiltonian_density(m, SpatialFunction::constant(MatrixXd::Zero(3, 1))), Error);
}

TEST_CASE("Chebyshev sample points lie inside the interval") {
  const auto pts = chebyshev_points(-1.0, 2.0, 32);
  REQUIRE(pts.size() == 32);
  for (double z : pts) {
    CHECK(z >= -1.0);
    CHECK(z <= 2.0);
  }
}

TEST_CASE("random boundary parametrization always validates") {
  std::mt19937 g(7);
  for (int i = 0; i < 40; ++i) {
    const BcPhsSpec s = test::random_spec(g, i % 2 == 0);
    const auto v = check(s);
    INFO(i);
    CHECK(v.empty());
    if (v.empty()) CHECK(validate(s).iep == (i % 2 == 0));
  }
}

TEST_CASE("error codes split into validation and numerical failures") {
  CHECK(is_validation_error(Errc::InvalidConfig));
  CHECK(is_validation_error(Errc::BoundaryConditionViolation));
  CHECK_FALSE(is_validation_error(Errc::SingularStepMatrix));
  CHECK_FALSE(is_validation_error(Errc::CertificateFailure));
  CHECK(errc_name(Errc::EmptyZeroSet) == "EmptyZeroSet");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "phsmor/pfem.hpp"
#include "support.hpp"

using namespace phs;

TEST_CASE("uniform hat basis") {
  const Basis b = build_basis(0.0, 1.0, 4);
  CHECK(b.h == doctest::Approx(1.0 / 3.0));
  CHECK(b.phi(1, b.nodes(1)) == 1.0);
  CHECK(b.phi(1, b.nodes(2)) == 0.0);
  CHECK(b.phi(0, b.h / 2) == doctest::Approx(0.5));
  CHECK(b.dphi(0, 0.1) == doctest::Approx(-3.0));
  CHECK(b.dphi(1, 0.1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(build_basis(0.0, 1.0, 1), Error);
}

TEST_CASE("mass matrices carry the coefficient of the energy density") {
  PresetParams p;
  p.T0 = 3.0;
  p.rho0 = 0.5;
  const AssembledFom f = assemble_fom(validate(preset("wave_neumann", p)), 6, 6);
  const MatrixXd E1 = MatrixXd(f.blocks.E1), Q1 = MatrixXd(f.blocks.Q1), Q2 = MatrixXd(f.blocks.Q2);
  CHECK((Q1 - 3.0 * E1).norm() <= 1e-14);
  CHECK((Q2 - 2.0 * MatrixXd(f.blocks.E2)).norm() <= 1e-14);
  // rows of the mass matrix sum to the integral of each hat
  const VectorXd s = E1.rowwise().sum();
  const double h = 0.2;
  CHECK(s(0) == doctest::Approx(h / 2));
  CHECK(s(2) == doctest::Approx(h));
}

TEST_CASE("Timoshenko with damping: skew J, nonzero PSD R") {
  PresetParams p;
  p.g1 = 0.3;
  p.g2 = 0.3;
  const AssembledFom f = assemble_fom(validate(preset("timoshenko", p)), 20, 20);
  CHECK(f.size() == 80);
  CHECK(f.inputs() == 4);
  const MatrixXd J(f.J), R(f.R);
  CHECK((J + J.transpose()).norm() <= 1e-12 * std::max(1.0, J.norm()));
  CHECK(R.norm() > 0.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(R);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK_FALSE(f.iep);
}

TEST_CASE("different meshes for the two field groups") {
  const AssembledFom f = assemble_fom(validate(preset("wave_mixed")), 7, 11);
  CHECK(f.size() == 18);
  const MatrixXd J(f.J);
  CHECK((J + J.transpose()).norm() <= 1e-12 * std::max(1.0, J.norm()));
  CHECK(MatrixXd(f.R).norm() == 0.0);
}

TEST_CASE("L2 projection reproduces linear profiles and their energy") {
  const AssembledFom f = assemble_fom(validate(preset("wave_mixed")), 9, 9);
  SpatialFunction x;
  x.rows = 2;
  x.cols = 1;
  x.eval = [](double z) {
    MatrixXd v(2, 1);
    v << 1.0 + 2.0 * z, 3.0;
    return v;
  };
  const VectorXd c = project_initial(f, x);
  for (int i = 0; i < 9; ++i) {
    CHECK(c(i) == doctest::Approx(1.0 + 2.0 * f.basis1.nodes(i)).epsilon(1e-12));
    CHECK(c(9 + i) == doctest::Approx(3.0).epsilon(1e-12));
  }
  // 1/2 (int (1+2z)^2 dz + 9) = 1/2 (13/3 + 9)
  CHECK(discrete_hamiltonian(f, c) == doctest::Approx(0.5 * (13.0 / 3.0 + 9.0)).epsilon(1e-12));
}

TEST_CASE("lossless models assemble with R = 0") {
  std::mt19937 g(11);
  for (int i = 0; i < 5; ++i) {
    const BcPhsSpec s = test::random_spec(g, true);
    const AssembledFom f = assemble_fom(validate(s), 8, 8);
    CHECK(MatrixXd(f.R).norm() <= 1e-13);
    CHECK(f.iep);
  }
}

TEST_CASE("energy of a sine profile converges under refinement") {
  const ValidatedModel m = validate(preset("wave_mixed"));
  SpatialFunction x;
  x.rows = 2;
  x.cols = 1;
  x.eval = [](double z) {
    MatrixXd v(2, 1);
    v << std::sin(std::numbers::pi * z), 0.0;
    return v;
  };
  double prev = 0.0;
  for (int N : {10, 20, 40}) {
    const AssembledFom f = assemble_fom(m, N, N);
    const double err = std::abs(discrete_hamiltonian(f, project_initial(f, x)) - 0.25);
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
}

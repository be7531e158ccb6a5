#pragma once

#include "phsmor/core.hpp"

namespace phs {

// Uniform P1 hat basis on [a, b].
struct Basis {
  int N = 0;
  double a = 0.0, b = 1.0, h = 1.0;
  VectorXd nodes;

  double phi(int i, double z) const;
  double dphi(int i, double z) const;  // right derivative at nodes
};

Basis build_basis(double a, double b, int N);

struct FomBlocks {
  SpMat E1, E2, Q1, Q2;  // per field group, kron(I, M) for E
  SpMat DP, DG;          // N_t x N_t, block (i, j) is D^P_ij / D^G_ij
  MatrixXd Omega;        // N_t x 2n; column c is trace at b, n + c trace at a
};

struct AssembledFom {
  SpMat E, Q, J, R;
  MatrixXd B;
  FomBlocks blocks;
  bool iep = false;
  ValidatedModel model;
  Basis basis1, basis2;

  Eigen::Index size() const { return E.rows(); }
  int inputs() const { return static_cast<int>(B.cols()); }
  // Offset of field c (0-based over all n fields) in the coordinate vector.
  Eigen::Index offset(int field) const;
  const Basis& basis_of(int field) const { return field < model.spec.n1 ? basis1 : basis2; }
};

FomBlocks assemble_blocks(const ValidatedModel& model, const Basis& b1, const Basis& b2);
AssembledFom assemble_fom(const ValidatedModel& model, const Basis& b1, const Basis& b2);
AssembledFom assemble_fom(const ValidatedModel& model, int N1, int N2);

// L2 projection of x0 (n x 1) onto the basis, field by field.
VectorXd project_initial(const AssembledFom& fom, const SpatialFunction& x0);

// Discrete Hamiltonian x^T Q x / 2.
double discrete_hamiltonian(const AssembledFom& fom, const VectorXd& x);

}  // namespace phs

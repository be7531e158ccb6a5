#pragma once

#include <optional>
#include <vector>

#include "phsmor/system.hpp"

namespace phs {

struct RightPoint {
  cplx lambda;
  VectorXc r, w;
  int dir = -1;  // canonical direction index, -1 if general
};

struct LeftPoint {
  cplx mu;
  Eigen::RowVectorXcd l, v;
  int dir = -1;
};

struct TangentialData {
  std::vector<RightPoint> right;
  std::vector<LeftPoint> left;

  Eigen::Index ports() const;
};

struct LoewnerPencil {
  MatrixXc L, sL;
  TangentialData data;
  VectorXc Lambda, M;  // right and left points
  MatrixXc R, W;       // n x Nr: directions and responses as columns
  MatrixXc Lrows, V;   // Nl x n: directions and responses as rows
};

struct SylvesterResiduals {
  double L = 0.0, sL = 0.0;
};

enum class Provenance { Standard, SpectralZero };

struct Rom {
  RealDescriptor sys;
  std::optional<MatrixXd> T;  // lifting projector x_d ~ T x_r
  Provenance provenance = Provenance::Standard;
  VectorXd sigma;             // singular values seen by the truncation
};

struct RealRealization {
  RealDescriptor sys;
  MatrixXc JL, JR;  // left/right block transforms
  double imag_residue = 0.0;
};

struct Truncation {
  Rom rom;
  MatrixXd X, Y;
  int k = 0;
};

struct Projector {
  MatrixXc Cb, Ob;
  MatrixXd T;
  double res_E = 0.0, res_A = 0.0, res_B = 0.0, res_C = 0.0;
};

// Sorted frequencies alternate right (1st, 3rd, ...) and left; each contributes the pair (+iw, -iw).
template <typename System>
TangentialData generate_data(const System& sys, std::vector<double> freqs);

SylvesterResiduals sylvester_residuals(const LoewnerPencil& p);
LoewnerPencil build_pencil(const TangentialData& data, double tol = 1e-12);

// E_l = -L, A_l = -sL, B_l = V, C_l = W. Checks the rank condition at every data point
// unless rank_tol <= 0.
ComplexDescriptor realize(const LoewnerPencil& p, double rank_tol = 1e-8);

// Same data with a known feedthrough D removed from the values.
ComplexDescriptor realize_with_feedthrough(const LoewnerPencil& p, const MatrixXd& D);

// Block transform for a point layout: (1/sqrt2)[[1,-i],[1,i]] per conjugate pair, 1 per real point.
MatrixXc pair_transform(const std::vector<cplx>& points, double tol = 1e-12);

RealRealization real_transform(const ComplexDescriptor& sys, const std::vector<cplx>& left_points,
                               const std::vector<cplx>& right_points, double tol = 1e-12);

// k = #(sigma >= rank_tol * sigma_max) unless fixed_k > 0.
Truncation svd_truncate(const RealDescriptor& sys, double rank_tol = 1e-8, int fixed_k = 0);

// T = C_b J_R X, with identity checks against the untruncated realization.
Projector build_projector(const PhOperator& fom, const LoewnerPencil& p, const MatrixXc& JR,
                          const MatrixXd& X, double tol = 1e-8);
Projector build_projector(const RealDescriptor& fom, const LoewnerPencil& p, const MatrixXc& JR,
                          const MatrixXd& X, double tol = 1e-8);

std::vector<cplx> right_points(const TangentialData& d);
std::vector<cplx> left_points(const TangentialData& d);

}  // namespace phs

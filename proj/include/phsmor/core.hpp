#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "phsmor/error.hpp"
#include "phsmor/types.hpp"

namespace phs {

// Matrix-valued function of the spatial coordinate.
struct SpatialFunction {
  std::function<MatrixXd(double)> eval;
  Eigen::Index rows = 0, cols = 0;

  MatrixXd operator()(double z) const { return eval(z); }

  static SpatialFunction constant(const MatrixXd& m);
  static SpatialFunction diagonal(std::vector<std::function<double(double)>> entries);
};

struct BcPhsSpec {
  int n1 = 0, n2 = 0;
  double a = 0.0, b = 1.0;
  MatrixXd P, G, VB, VC;
  SpatialFunction H1, H2;
  std::string name;

  int n() const { return n1 + n2; }
  MatrixXd H(double z) const;
};

struct Tolerances {
  double bc = 1e-10;
  double psd_rel = 1e-10;  // scaled by max(1, ||G||)
  double cond_P = 1e12;
  int samples = 32;        // Chebyshev points for the H check
};

struct Violation {
  Errc kind;
  std::string detail;
  double measure = 0.0;
};

struct ValidatedModel {
  BcPhsSpec spec;
  MatrixXd Jxi;
  bool iep = false;
};

// Throws the first violation's code; use check() to get all of them.
std::vector<Violation> check(const BcPhsSpec& spec, const Tolerances& tol = {});
ValidatedModel validate(const BcPhsSpec& spec, const Tolerances& tol = {});

struct PresetParams {
  double T0 = 1.0, rho0 = 1.0;
  double K = 1.0, EI = 1.0, rho = 1.0, Irho = 1.0, g1 = 0.0, g2 = 0.0;
  double a = 0.0, b = 1.0;
};

BcPhsSpec preset(std::string_view name, const PresetParams& p = {});

struct Quadrature {
  int panels = 64;
};

// 1/2 * integral of x^T H x over [a, b].
double hamiltonian_density(const ValidatedModel& model, const SpatialFunction& x,
                           const Quadrature& q = {});

std::vector<double> chebyshev_points(double a, double b, int m);

}  // namespace phs

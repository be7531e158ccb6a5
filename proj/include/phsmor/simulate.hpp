#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "phsmor/system.hpp"

namespace phs {

using InputSignal = std::function<VectorXd(double)>;

InputSignal zero_input(Eigen::Index n);

struct Feedback {
  MatrixXd K;  // u_eff = -K y + r + u
  VectorXd r;
};

struct SimOptions {
  double dt = 1e-3;
  double T = 1.0;
  int decimation = 1;  // keep every k-th state
  std::optional<Feedback> feedback;
};

struct Trajectory {
  double dt = 0.0;
  VectorXd t;         // sample instants, size steps + 1
  MatrixXd u, y;      // n x (steps + 1), effective input and output at samples
  VectorXd H;         // energy at samples (NaN when no storage is known)
  MatrixXd um, ym;    // n x steps, midpoint effective input and output
  VectorXd dissipation;  // e_m^T R e_m per step (FOM only, zero otherwise)
  MatrixXd X;         // kept states, N x kept
  std::vector<Eigen::Index> kept;  // sample indices of the columns of X
  int decimation = 1;

  Eigen::Index steps() const { return t.size() - 1; }
};

// Implicit midpoint on the sparse FOM, solved in saddle form [x+; e_m].
Trajectory simulate(const AssembledFom& fom, const InputSignal& u, const VectorXd& x0,
                    const SimOptions& opt);

// Implicit midpoint on a dense descriptor realization.
Trajectory simulate(const RealDescriptor& sys, const InputSignal& u, const VectorXd& x0,
                    const SimOptions& opt);

struct BalanceReport {
  VectorXd residual;  // per step
  double max_abs = 0.0;
  double max_H = 0.0;
};

// residual_k = H_{k+1} - H_k - dt (y_m^T u_m - e_m^T R e_m).
BalanceReport energy_balance_report(const Trajectory& traj, const AssembledFom& fom);

}  // namespace phs

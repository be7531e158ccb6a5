#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "phsmor/config.hpp"
#include "phsmor/io.hpp"

namespace phs {

// Module error tagged with the pipeline stage it came from.
class StageError : public Error {
public:
  StageError(std::string stage, const Error& e)
      : Error(e.code(), "[" + stage + "] " + detail(e)), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  static std::string detail(const Error& e) {
    const std::string w = e.what(), prefix = std::string(errc_name(e.code())) + ": ";
    return w.rfind(prefix, 0) == 0 ? w.substr(prefix.size()) : w;
  }
  std::string stage_;
};

ValidatedModel build_model(const RunConfig& cfg);
InputSignal make_input(const InputConfig& in, Eigen::Index n);
SpatialFunction make_profile(const std::vector<FieldInit>& fields, const BcPhsSpec& spec);
VectorXd initial_state(const AssembledFom& fom, const std::vector<FieldInit>& fields);
SimOptions sim_options(const SimConfig& s);

std::vector<double> interpolation_frequencies(const MorConfig& m);
VectorXd log_grid(double lo, double hi, int points);

struct Reduction {
  TangentialData data;
  LoewnerPencil pencil;
  RealRealization real;
  Truncation trunc;
  Projector proj;
  Rom rom;  // truncated preliminary model with its projector
  bool full_rank = true;  // rank condition held, untruncated realization is minimal
};
Reduction reduce(const PhOperator& op, const MorConfig& m);

PassiveOptions passive_options(const MorConfig& m);

// Least-squares reduced state in the E-norm: min |x0 - T xr|_E.
VectorXd reduced_initial(const AssembledFom& fom, const MatrixXd& T, const VectorXd& x0);

struct CompareReport {
  VectorXd t, output_error;
  VectorXd t_state, state_error;  // empty without states
  double max_output_rel = 0.0, max_state_rel = 0.0;
  double max_output = 0.0, max_state = 0.0;
};

// Aligned trajectories: output error |y_f - y_r| and lifted error |x_d - T x_r|_E.
CompareReport compare(const Trajectory& fom, const Trajectory& rom, const AssembledFom* ctx = nullptr,
                      const MatrixXd* T = nullptr);
CompareReport compare(const io::TrajectoryTable& fom, const io::TrajectoryTable& rom);
void write_compare(const std::filesystem::path& path, const CompareReport& r);

// Field values of the P1 interpolant at the nodes of the finer basis: columns z, x_1..x_n.
MatrixXd field_table(const AssembledFom& fom, const VectorXd& x);
std::vector<std::string> field_header(const AssembledFom& fom);

struct ManifestEntry {
  std::string path, sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::filesystem::path dir;
  std::vector<ManifestEntry> files;
  std::string verdict;
  int final_order = 0, preliminary_order = 0;

  void add(const std::filesystem::path& file);
  void write() const;  // manifest.json in dir
};

Manifest run(const RunConfig& cfg);

}  // namespace phs

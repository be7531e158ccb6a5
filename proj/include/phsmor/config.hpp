#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "phsmor/passive.hpp"
#include "phsmor/simulate.hpp"

namespace phs {

struct ModelConfig {
  std::string preset;                  // empty when the spec is given inline
  PresetParams params;
  std::optional<BcPhsSpec> inline_spec;  // constant H1, H2 only
};

struct InputConfig {
  std::string kind = "zero";  // zero | sin | step
  double amplitude = 1.0, omega = 1.0;
  double t_on = 0.0, t_off = std::numeric_limits<double>::infinity();
  std::vector<int> channels;  // 1-based; empty means every input
};

// Per-field initial profile: amplitude * sin(mode*pi*xi), cos(...), or a constant, xi in [0, 1].
struct FieldInit {
  std::string kind = "zero";  // zero | sin | cos | const
  double amplitude = 1.0;
  int mode = 1;
};

struct SimConfig {
  double dt = 1e-3, T = 1.0;
  InputConfig input;
  std::optional<Feedback> feedback;
  std::vector<FieldInit> x0;  // empty means x0 = 0
  int decimation = 1;
  int csv_stride = 1;
  std::vector<double> snapshots;
};

struct MorConfig {
  double band_lo = 0.9, band_hi = 8.5;
  int n_points = 16;
  std::string spacing = "linear";  // linear | log
  double rank_tol = 1e-8;
  int fixed_k = 0;
  double Dr_scale = 1e-5;
  LeftValues left_values = LeftValues::Mu;
  Realization realization = Realization::Feedthrough;
  double max_freq = 0.0;
  bool require_certificate = true;
  double grid_lo = 1e-2, grid_hi = 1e3;
  int grid_points = 400;
  double tol_popov = 1e-8, tol_stab = 1e-8;
};

struct OutputConfig {
  std::string dir = "out";
  bool fom_matrices = true;
  bool rom_matrices = true;
  int bode_points = 200;
  double bode_lo = 1e-2, bode_hi = 1e3;
};

struct RunConfig {
  ModelConfig model;
  int N1 = 100, N2 = 100;
  SimConfig sim;
  MorConfig mor;
  OutputConfig out;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& cfg);  // canonical JSON

// Range and consistency checks; throws InvalidConfig naming the offending field.
void check_config(const RunConfig& cfg);

}  // namespace phs

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "phsmor/loewner.hpp"
#include "phsmor/passive.hpp"
#include "phsmor/simulate.hpp"

namespace phs::io {

namespace fs = std::filesystem;

// 17 significant digits, '.' decimal point, independent of the global locale.
std::string fmt(double v);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

void write_table(const fs::path& path, const std::vector<std::string>& header,
                 const MatrixXd& rows);
void write_dense(const fs::path& path, const MatrixXd& m);
void write_coo(const fs::path& path, const SpMat& m);  // row,col,value

void write_trajectory(const fs::path& path, const Trajectory& traj, int stride = 1);

struct TrajectoryTable {
  VectorXd t, H;
  MatrixXd u, y;  // n x samples
};
TrajectoryTable read_trajectory(const fs::path& path);

// Frequency response magnitude and phase (degrees) per channel.
MatrixXd bode_table(const RealDescriptor& sys, const VectorXd& omega);
MatrixXd bode_table(const PhOperator& sys, const VectorXd& omega);
std::vector<std::string> bode_header(Eigen::Index outputs, Eigen::Index inputs);

void write_tangential(const fs::path& path, const TangentialData& data);
TangentialData read_tangential(const fs::path& path);

void write_zeros(const fs::path& path, const SpectralZeroSet& z);
void write_certificate(const fs::path& path, const PassivityCertificate& c);

std::string sha256_file(const fs::path& path);

}  // namespace phs::io

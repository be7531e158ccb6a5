#include "phsmor/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace phs::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

double parse(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc()) throw Error(Errc::Io, "bad number '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> read_rows(const fs::path& path, std::vector<std::string>& header) {
  std::istringstream is(read_text(path));
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::Io, path.string() + " is empty");
  header = split(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line))
    if (!line.empty()) rows.push_back(split(line));
  return rows;
}

std::string join_row(const Eigen::Ref<const Eigen::RowVectorXd>& r) {
  std::string s;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    if (j) s += ',';
    s += fmt(r(j));
  }
  return s;
}

}  // namespace

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::Io, "cannot write " + path.string());
  os << text;
  if (!os) throw Error(Errc::Io, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_table(const fs::path& path, const std::vector<std::string>& header, const MatrixXd& rows) {
  if (!header.empty() && static_cast<Eigen::Index>(header.size()) != rows.cols())
    throw Error(Errc::ShapeMismatch, "header has " + std::to_string(header.size()) + " columns, table " +
                                         std::to_string(rows.cols()));
  std::string s;
  for (std::size_t j = 0; j < header.size(); ++j) s += (j ? "," : "") + header[j];
  if (!header.empty()) s += '\n';
  for (Eigen::Index i = 0; i < rows.rows(); ++i) s += join_row(rows.row(i)) + '\n';
  write_text(path, s);
}

void write_dense(const fs::path& path, const MatrixXd& m) { write_table(path, {}, m); }

void write_coo(const fs::path& path, const SpMat& m) {
  std::string s = "row,col,value\n";
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      s += std::to_string(it.row()) + ',' + std::to_string(it.col()) + ',' + fmt(it.value()) + '\n';
  write_text(path, s);
}

void write_trajectory(const fs::path& path, const Trajectory& traj, int stride) {
  const Eigen::Index n = traj.u.rows();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("u_" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("y_" + std::to_string(i + 1));
  header.push_back("H");
  stride = std::max(stride, 1);
  const Eigen::Index samples = traj.t.size(), rows = (samples + stride - 1) / stride;
  MatrixXd tab(rows, 2 * n + 2);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index k = r * stride;
    tab(r, 0) = traj.t(k);
    tab.block(r, 1, 1, n) = traj.u.col(k).transpose();
    tab.block(r, 1 + n, 1, n) = traj.y.col(k).transpose();
    tab(r, 2 * n + 1) = traj.H(k);
  }
  write_table(path, header, tab);
}

TrajectoryTable read_trajectory(const fs::path& path) {
  std::vector<std::string> header;
  const auto rows = read_rows(path, header);
  if (header.size() < 2 || header.front() != "t" || header.back() != "H" || header.size() % 2)
    throw Error(Errc::Io, path.string() + " is not a trajectory table");
  const Eigen::Index n = static_cast<Eigen::Index>(header.size() - 2) / 2;
  TrajectoryTable tt;
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  tt.t.resize(m);
  tt.H.resize(m);
  tt.u.resize(n, m);
  tt.y.resize(n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& r = rows[k];
    if (r.size() != header.size()) throw Error(Errc::Io, "ragged row in " + path.string());
    tt.t(k) = parse(r[0]);
    for (Eigen::Index i = 0; i < n; ++i) {
      tt.u(i, k) = parse(r[1 + i]);
      tt.y(i, k) = parse(r[1 + n + i]);
    }
    tt.H(k) = parse(r.back());
  }
  return tt;
}

namespace {

template <typename System>
MatrixXd bode_impl(const System& sys, Eigen::Index p, Eigen::Index m, const VectorXd& omega) {
  MatrixXd tab(omega.size(), 1 + 2 * p * m);
  for (Eigen::Index k = 0; k < omega.size(); ++k) {
    const MatrixXc G = eval_transfer(sys, cplx(0.0, omega(k)));
    tab(k, 0) = omega(k);
    Eigen::Index c = 1;
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        tab(k, c++) = std::abs(G(i, j));
        tab(k, c++) = std::arg(G(i, j)) * 180.0 / std::numbers::pi;
      }
  }
  return tab;
}

}  // namespace

MatrixXd bode_table(const RealDescriptor& sys, const VectorXd& omega) {
  return bode_impl(sys, sys.C.rows(), sys.B.cols(), omega);
}

MatrixXd bode_table(const PhOperator& sys, const VectorXd& omega) {
  return bode_impl(sys, sys.C().rows(), sys.B().cols(), omega);
}

std::vector<std::string> bode_header(Eigen::Index outputs, Eigen::Index inputs) {
  std::vector<std::string> h{"omega"};
  for (Eigen::Index i = 1; i <= outputs; ++i)
    for (Eigen::Index j = 1; j <= inputs; ++j) {
      const std::string ij = std::to_string(i) + std::to_string(j);
      h.push_back("mag_" + ij);
      h.push_back("phase_" + ij);
    }
  return h;
}

// re_s,im_s,side,dir_index,re_w_*,im_w_*,re_d_*,im_d_*
void write_tangential(const fs::path& path, const TangentialData& data) {
  const Eigen::Index n = data.ports();
  std::string s = "re_s,im_s,side,dir_index";
  for (const char* part : {"re_w_", "im_w_", "re_d_", "im_d_"})
    for (Eigen::Index i = 1; i <= n; ++i) s += std::string(",") + part + std::to_string(i);
  s += '\n';
  auto row = [&](cplx p, const char* side, int dir, const VectorXc& w, const VectorXc& d) {
    s += fmt(p.real()) + ',' + fmt(p.imag()) + ',' + side + ',' + std::to_string(dir);
    for (Eigen::Index i = 0; i < n; ++i) s += ',' + fmt(w(i).real());
    for (Eigen::Index i = 0; i < n; ++i) s += ',' + fmt(w(i).imag());
    for (Eigen::Index i = 0; i < n; ++i) s += ',' + fmt(d(i).real());
    for (Eigen::Index i = 0; i < n; ++i) s += ',' + fmt(d(i).imag());
    s += '\n';
  };
  for (const auto& r : data.right) row(r.lambda, "right", r.dir, r.w, r.r);
  for (const auto& l : data.left) row(l.mu, "left", l.dir, l.v.transpose(), l.l.transpose());
  write_text(path, s);
}

TangentialData read_tangential(const fs::path& path) {
  std::vector<std::string> header;
  const auto rows = read_rows(path, header);
  if (header.size() < 4 || (header.size() - 4) % 4)
    throw Error(Errc::Io, path.string() + " is not a tangential data table");
  const Eigen::Index n = static_cast<Eigen::Index>(header.size() - 4) / 4;
  TangentialData d;
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw Error(Errc::Io, "ragged row in " + path.string());
    const cplx p(parse(r[0]), parse(r[1]));
    const int dir = static_cast<int>(parse(r[3]));
    VectorXc w(n), dv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w(i) = cplx(parse(r[4 + i]), parse(r[4 + n + i]));
      dv(i) = cplx(parse(r[4 + 2 * n + i]), parse(r[4 + 3 * n + i]));
    }
    if (r[2] == "right")
      d.right.push_back({p, dv, w, dir});
    else if (r[2] == "left")
      d.left.push_back({p, dv.transpose(), w.transpose(), dir});
    else
      throw Error(Errc::Io, "unknown side '" + r[2] + "'");
  }
  return d;
}

void write_zeros(const fs::path& path, const SpectralZeroSet& z) {
  const Eigen::Index n = z.Dr.rows();
  std::string s = "re_s,im_s";
  for (Eigen::Index i = 1; i <= n; ++i) s += ",re_r_" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) s += ",im_r_" + std::to_string(i);
  s += '\n';
  for (const auto& zz : z.zeros) {
    s += fmt(zz.s.real()) + ',' + fmt(zz.s.imag());
    for (Eigen::Index i = 0; i < n; ++i) s += ',' + fmt(zz.r(i).real());
    for (Eigen::Index i = 0; i < n; ++i) s += ',' + fmt(zz.r(i).imag());
    s += '\n';
  }
  write_text(path, s);
}

void write_certificate(const fs::path& path, const PassivityCertificate& c) {
  std::string s = "# verdict=" + verdict_name(c.verdict) + " min_popov=" + fmt(c.min_popov) +
                  " spectral_abscissa=" + fmt(c.spectral_abscissa) + "\nomega,min_popov_eig\n";
  for (Eigen::Index k = 0; k < c.grid.size(); ++k)
    s += fmt(c.grid(k)) + ',' + fmt(c.min_popov_eig(k)) + '\n';
  write_text(path, s);
}

std::string sha256_file(const fs::path& path) {
  const std::string data = read_text(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
    throw Error(Errc::Io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace phs::io

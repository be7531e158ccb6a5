#pragma once

#include <string>
#include <vector>

#include "phsmor/loewner.hpp"

namespace phs {

struct SpectralZero {
  cplx s;
  VectorXc r;
};

struct SpectralZeroSet {
  std::vector<SpectralZero> zeros;  // conjugate pairs stored adjacently, (+Im, -Im)
  MatrixXd Dr;
  std::vector<cplx> finite;         // every finite eigenvalue of the pencil
  int dropped_degenerate = 0;
};

struct ZeroOptions {
  double cutoff = 1e8;       // |s| above this counts as infinite
  double beta_tol = 1e-10;   // relative |beta| threshold of the QZ pairs
  double max_freq = 0.0;     // keep |Im s| <= max_freq when positive
};

SpectralZeroSet spectral_zeros(const RealDescriptor& rom, const MatrixXd& Dr,
                               const ZeroOptions& opt = {});

enum class Verdict { Passive, NotPassive, Inconclusive };
std::string verdict_name(Verdict v);

struct PassivityCertificate {
  VectorXd grid;
  VectorXd min_popov_eig;
  double min_popov = 0.0;
  double spectral_abscissa = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

struct CertificateOptions {
  double tol_popov = 1e-8;
  double tol_stab = 1e-8;
};

VectorXd default_grid();  // 400 log-spaced points on [1e-2, 1e3]

PassivityCertificate passivity_check(const RealDescriptor& sys, const VectorXd& grid,
                                     const CertificateOptions& opt = {});

enum class LeftValues { Mu, Literal };
enum class Realization { Feedthrough, Strict };

struct PassiveOptions {
  LeftValues left_values = LeftValues::Mu;
  Realization realization = Realization::Feedthrough;
  ZeroOptions zeros;
  CertificateOptions certificate;
  VectorXd grid = default_grid();
  bool require_certificate = true;
};

struct PassiveResult {
  Rom rom;
  SpectralZeroSet zeros;
  TangentialData data;
  PassivityCertificate certificate;
  double max_zero_residual = 0.0;  // Popov residual along retained directions
};

PassiveResult passive_reduce(const RealDescriptor& rom, const MatrixXd& Dr,
                             const PassiveOptions& opt = {}, const PhOperator* fom = nullptr);

// x' = (J - R) Q x + (G - P) u,  y = (G + P)^T Q x + (S + N) u.
struct PhFactors {
  MatrixXd J, R, Q, G, P, S, N;
  bool loewner_positive = false;  // true when -E (= Loewner matrix) was the definite one
  double skew_residual = 0.0;
  double min_eig_R = 0.0;
  double min_eig_W = 0.0;         // of [[R, P], [P^T, S]]
};

PhFactors extract_ph(const Rom& rom);

// Transfer function of the extracted factors (for checks).
MatrixXc ph_transfer(const PhFactors& f, cplx s);

}  // namespace phs

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phs {

enum class Errc {
  SymmetryViolation,
  DefinitenessViolation,
  RankDeficient,
  BoundaryConditionViolation,
  ShapeMismatch,
  UnknownPreset,
  NonPositiveCoefficient,
  InvalidN,
  QuadratureFailure,
  StructureViolation,
  FactorizationFailure,
  SingularStepMatrix,
  NearSingularPencil,
  CollidingPoints,
  ZeroDenominator,
  RankDeficientData,
  NonConjugateOrdering,
  DataModelMismatch,
  EigensolveFailure,
  EmptyZeroSet,
  CertificateFailure,
  NotDefinite,
  GridMismatch,
  InvalidConfig,
  Io,
};

std::string_view errc_name(Errc e);

// Validation-type errors map to exit code 2, everything else to 3.
bool is_validation_error(Errc e);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace phs

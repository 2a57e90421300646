#pragma once

#include <stdexcept>
#include <string>

namespace qerc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// linalg
struct NonUnitaryInput : Error { using Error::Error; };
struct NonHermitianInput : Error { using Error::Error; };
struct NegativeRealEigenvalue : Error { using Error::Error; };

// netweights
struct DegenerateRange : Error { using Error::Error; };
struct InsufficientSupport : Error { using Error::Error; };
struct NonConcaveFit : Error { using Error::Error; };

// dataset
struct BadMagic : Error { using Error::Error; };
struct TruncatedFile : Error { using Error::Error; };
struct CountMismatch : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// pipeline
struct WindowOutOfRange : Error { using Error::Error; };

// cli / experiments
struct ConfigError : Error { using Error::Error; };

}  // namespace qerc

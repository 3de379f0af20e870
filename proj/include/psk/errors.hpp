#pragma once

#include <stdexcept>
#include <string>

namespace psk {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidOrder : Error { using Error::Error; };
struct InvalidIndexList : Error { using Error::Error; };
struct BadOracle : Error { using Error::Error; };
struct PremiseViolation : Error { using Error::Error; };
struct DegenerateTau : Error { using Error::Error; };
struct DegenerateSite : Error { using Error::Error; };
struct MissingCell : Error { using Error::Error; };
struct InsufficientSupport : Error { using Error::Error; };
struct InsufficientOrder : Error { using Error::Error; };
struct DivergentMoment : Error { using Error::Error; };
struct BlowUp : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct AxiomViolation : Error { using Error::Error; };

}  // namespace psk

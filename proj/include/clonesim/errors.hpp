// Exception types shared by every clonesim module.
#pragma once

#include <stdexcept>
#include <string>

namespace clonesim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A creation operator or mode transform pushed an occupation past the
// configured Fock-space caps. The caller chose caps that are too small.
class TruncationOverflow : public Error {
 public:
  using Error::Error;
};

class NonUnitaryTransform : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

// Requested (Lambda, mu) pair needs a damping amplitude with |kappa| > 1.
class InfeasibleConfiguration : public Error {
 public:
  using Error::Error;
};

class InvalidDetectorModel : public Error {
 public:
  using Error::Error;
};

// Post-selection accepted no events, so fidelities are undefined.
class ZeroSuccessProbability : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace clonesim

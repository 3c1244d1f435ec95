#ifndef ETAMIX_ERRORS_H_
#define ETAMIX_ERRORS_H_

#include <stdexcept>
#include <string>

namespace etamix {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A dense table would exceed the configured entry cap.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

// Conditioning on an event of probability zero.
class ZeroProbabilityPrefix : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double previous, double last)
      : Error(what), previous_(previous), last_(last) {}

  double previous() const { return previous_; }
  double last() const { return last_; }

 private:
  double previous_;
  double last_;
};

// Raised when a vector that must sum to zero does not.
class UnbalancedInput : public Error {
 public:
  using Error::Error;
};

class ThetaNotContracting : public Error {
 public:
  using Error::Error;
};

}  // namespace etamix

#endif  // ETAMIX_ERRORS_H_

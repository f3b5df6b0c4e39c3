#ifndef ROBUSTLSQ_ERRORS_HPP_
#define ROBUSTLSQ_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace robustlsq {

// Contract violations (bad dimensions, invalid arguments) are reported as
// std::invalid_argument. The exception types below separate the failure
// classes the CLI maps to distinct exit codes.

/// Malformed or missing input data: files, schemas, checksums.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver could not produce a usable result (e.g. unresolvable singularity).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request is valid but outside what this build can compute
/// (e.g. exhaustive subset enumeration beyond the hard cap).
class capability_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robustlsq

#endif  // ROBUSTLSQ_ERRORS_HPP_

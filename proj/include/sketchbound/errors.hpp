#pragma once

#include <stdexcept>
#include <string>

namespace sketchbound {

/// A hypothesis of the requested computation does not hold (rank deficiency,
/// parameter range, non-PSD input). The CLI maps this to exit code 2.
class PreconditionError : public std::invalid_argument {
public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative kernel failed to converge.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File system or parse failure. The CLI maps this to exit code 1.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sketchbound

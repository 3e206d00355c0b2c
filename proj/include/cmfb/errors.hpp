#pragma once

/**
 * @file errors.hpp
 * @brief Exception taxonomy mirroring the process exit codes: configuration
 *        problems (exit 2), numerical failures (exit 3), I/O failures (exit 4).
 */

#include <stdexcept>
#include <string>

namespace cmfb {

/// Invalid or inconsistent configuration (unknown key, constraint violation).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: trace collapse, positivity abort, divergence.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure while reading configs or writing outputs.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cmfb

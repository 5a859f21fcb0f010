#pragma once

#include <stdexcept>
#include <string>

namespace kclind {

// Error taxonomy mirrors the CLI exit codes: ConfigError -> 2,
// ToleranceError -> 3, IoError -> 4.

// Bad user input: malformed config file, unknown key, invalid parameter.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical invariant was violated beyond its pinned tolerance
// (non-Hermitian density matrix, negative eigenvalue, failed convergence).
class ToleranceError : public std::runtime_error {
public:
  explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem trouble: unwritable output, refusing to overwrite without force.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kclind

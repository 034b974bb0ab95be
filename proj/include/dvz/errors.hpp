#pragma once

#include <stdexcept>
#include <string>

namespace dvz {

// Malformed or inconsistent arguments (dimension mismatch, bad ranges).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Arguments are well-formed but violate a mathematical precondition of the
// procedure (e.g. a norm not normalized to b_upper = 1).
class PreconditionError : public InputError {
 public:
  explicit PreconditionError(const std::string& what) : InputError(what) {}
};

// Request exceeds a hard size cutoff (e.g. exact sign enumeration).
class SizeError : public InputError {
 public:
  explicit SizeError(const std::string& what) : InputError(what) {}
};

// Argument outside the domain where a bound formula is valid.
class DomainError : public InputError {
 public:
  explicit DomainError(const std::string& what) : InputError(what) {}
};

}  // namespace dvz

#pragma once

#include <stdexcept>
#include <string>

namespace ipbt {

/// Malformed or invariant-violating input (environment, allocation, belief, file).
class InputError : public std::runtime_error {
 public:
  InputError(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Input is well formed but a documented precondition of the operation fails.
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// A computed object failed its own exact post-check.
class VerificationError : public std::runtime_error {
 public:
  VerificationError(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace ipbt

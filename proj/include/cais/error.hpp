#pragma once

#include <stdexcept>
#include <string>

namespace cais {

/// Broad failure classes. The CLI maps them onto exit codes.
enum class ErrorKind {
  kDomain,  ///< invalid model, out-of-domain value, unresolved name
  kIo,      ///< unreadable or unwritable file, malformed config
};

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::kDomain, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

}  // namespace cais

#pragma once

#include <stdexcept>
#include <string>

namespace spectel {

enum class ErrorKind {
  Domain,
  Parse,
  Resource,
  NumericalContract,
  StatisticalContract,
};

/// Base of every exception thrown by the library. The kind maps one-to-one
/// onto the status codes of the C API.
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
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class ParseError : public Error {
public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what) {}
};

class ResourceError : public Error {
public:
  explicit ResourceError(const std::string& what) : Error(ErrorKind::Resource, what) {}
};

class NumericalContractError : public Error {
public:
  explicit NumericalContractError(const std::string& what)
      : Error(ErrorKind::NumericalContract, what) {}
};

class StatisticalContractError : public Error {
public:
  explicit StatisticalContractError(const std::string& what)
      : Error(ErrorKind::StatisticalContract, what) {}
};

} // namespace spectel

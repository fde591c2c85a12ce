#ifndef PEDACCESS_ERROR_HPP
#define PEDACCESS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pedaccess {

/// Base error for every failure the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected by validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pedaccess

#endif  // PEDACCESS_ERROR_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace rdae {

// Configuration or shape problem detected before any computation runs.
class InvalidConfig : public std::invalid_argument {
 public:
  explicit InvalidConfig(const std::string& what) : std::invalid_argument(what) {}
};

// Argument outside the mathematical domain of an operation (negative
// threshold, non-finite matrix entry, zero reference, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Malformed dataset or weights file.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rdae

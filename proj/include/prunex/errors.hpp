#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prunex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (CSV, tree JSON, graph text).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Tree shape or feature indices inconsistent with the dataset.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A pruning operation was applied to a node it is not defined on.
class InvalidOperation : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration refused because the tree is too large.
class CapExceeded : public Error {
 public:
  CapExceeded(std::size_t size, std::size_t cap)
      : Error("tree has " + std::to_string(size) + " cuts, enumeration cap is " +
              std::to_string(cap)),
        size_(size),
        cap_(cap) {}

  std::size_t size() const { return size_; }
  std::size_t cap() const { return cap_; }

 private:
  std::size_t size_;
  std::size_t cap_;
};

/// A solver ran past its wall-clock budget.
class TimeBudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace prunex

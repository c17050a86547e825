#pragma once

#include <stdexcept>
#include <string>

namespace blockscene {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or semantically invalid input (documents, values, requests).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Lookup of an object id that is not in the scene.
class UnknownObjectError : public InputError {
 public:
  explicit UnknownObjectError(const std::string& id)
      : InputError("unknown object: " + id), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class DuplicateObjectError : public InputError {
 public:
  explicit DuplicateObjectError(const std::string& id)
      : InputError("duplicate object: " + id), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// A strong or weak reference supplies a number of constraints outside the
/// configured budget, or no strong reference exists.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Planner backend could not be reached. Retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace blockscene

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace epgm {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value had the wrong runtime type for the requested operation.
class TypeError : public Error {
 public:
  using Error::Error;
};

/// Referenced vertex, edge, graph or algorithm does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// A logical graph would contain an edge whose endpoint is not a member.
class ClosureError : public Error {
 public:
  ClosureError(const std::string& what, uint64_t edge_id) : Error(what), edge_id_(edge_id) {}
  uint64_t edge_id() const { return edge_id_; }

 private:
  uint64_t edge_id_;
};

/// Operator invoked with inputs that violate its contract.
class OperatorError : public Error {
 public:
  using Error::Error;
};

}  // namespace epgm

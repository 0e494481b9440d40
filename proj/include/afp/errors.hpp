#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace afp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iterate or image left the declared domain of a self-map.
class DomainEscape : public Error {
 public:
  using Error::Error;
};

/// The subdivision search reached its order cap without a witness.
class DepthExhausted : public Error {
 public:
  explicit DepthExhausted(std::size_t max_order)
      : Error("no unlabelable lattice vertex up to order " +
              std::to_string(max_order)),
        max_order_(max_order) {}
  std::size_t max_order() const { return max_order_; }

 private:
  std::size_t max_order_;
};

/// A spanning vector has seminorm zero, so the distance LP has an
/// unbounded optimal face in that direction.
class UnboundedBasis : public Error {
 public:
  using Error::Error;
};

class AnchorOutsideC : public Error {
 public:
  using Error::Error;
};

class ImproperLabeling : public Error {
 public:
  using Error::Error;
};

class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

class NotARetraction : public Error {
 public:
  using Error::Error;
};

}  // namespace afp

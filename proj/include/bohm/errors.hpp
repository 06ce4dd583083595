#pragma once

#include <stdexcept>
#include <string>

namespace bohm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters, scenario files or option sets.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// |Ψ|² vanishes (relative to the dominant branch) at the evaluation point.
class NodeError : public Error {
 public:
  using Error::Error;
};

// Operation requires single-pointer mode (common Ξ for all pointer particles).
class ModeError : public Error {
 public:
  using Error::Error;
};

// Non-finite state or step-size collapse away from a node.
class IntegrationAbort : public Error {
 public:
  using Error::Error;
};

class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace bohm

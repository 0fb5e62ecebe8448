#pragma once

#include <stdexcept>
#include <string>

namespace bot {

// Base of every error the library raises. The CLI maps each subclass to a
// distinct process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range argument, inconsistent sizes, infeasible marginals.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A flow tree that breaks the balance equations or is not a tree.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Sinkhorn scaling that cannot proceed (kernel underflow).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed input files.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace bot

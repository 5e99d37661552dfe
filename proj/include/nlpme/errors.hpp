#pragma once

#include <stdexcept>
#include <string>

namespace nlpme {

/// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
 public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// Gamma (or related) function evaluated at a pole.
class pole_error : public domain_error {
 public:
  explicit pole_error(const std::string& what) : domain_error(what) {}
};

/// Series or quadrature did not reach the requested accuracy.
class convergence_error : public std::runtime_error {
 public:
  explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// Time step larger than the transport stability limit.
class cfl_error : public std::runtime_error {
 public:
  explicit cfl_error(const std::string& what) : std::runtime_error(what) {}
};

/// Solver aborted because the solution grew without bound.
class blowup_error : public std::runtime_error {
 public:
  explicit blowup_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nlpme

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace polaron {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Invalid argument or configuration (grid sizes, tolerances, unsupported regime).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched basis or grid between operands.
class BasisMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver stagnated or did not converge.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The spectral gap of h_phi fell below the configured floor.
class GapCollapse : public std::runtime_error {
 public:
  GapCollapse(const std::string& what, double gap, double time)
      : std::runtime_error(what), gap_(gap), time_(time) {}
  double gap() const noexcept { return gap_; }
  double time() const noexcept { return time_; }

 private:
  double gap_;
  double time_;
};

/// Population leaked into the top occupation shell beyond tolerance.
class LeakageError : public std::runtime_error {
 public:
  LeakageError(const std::string& what, double leakage)
      : std::runtime_error(what), leakage_(leakage) {}
  double leakage() const noexcept { return leakage_; }

 private:
  double leakage_;
};

}  // namespace polaron

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace radlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite geometric data at a radius.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double r)
      : Error(what + " (r = " + std::to_string(r) + ")"), radius_(r) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

// q differs from q1 + q2 beyond tolerance.
class SplitMismatchError : public Error {
 public:
  SplitMismatchError(double r, double mismatch)
      : Error("potential split mismatch |q - q1 - q2| = " + std::to_string(mismatch) +
              " at r = " + std::to_string(r)),
        radius_(r),
        mismatch_(mismatch) {}
  double radius() const noexcept { return radius_; }
  double mismatch() const noexcept { return mismatch_; }

 private:
  double radius_;
  double mismatch_;
};

// A caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// The square root would have to be taken on (-inf, 0].
class BranchError : public Error {
 public:
  BranchError(const std::string& what, double r) : Error(what), radius_(r) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double rcond_estimate)
      : Error(what + " (rcond estimate " + std::to_string(rcond_estimate) + ")"),
        rcond_(rcond_estimate) {}
  double rcond_estimate() const noexcept { return rcond_; }

 private:
  double rcond_;
};

// Grid spacing does not resolve the local wavelength.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, double points_per_wavelength)
      : Error(what), ppw_(points_per_wavelength) {}
  double points_per_wavelength() const noexcept { return ppw_; }

 private:
  double ppw_;
};

// r_lambda could not be found below the sampling horizon.
class HorizonError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "\n";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace radlab

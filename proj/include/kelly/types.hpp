#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace kelly {

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Chernoff-type bound was requested outside the region where it holds.
class OutOfValidityRegion : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The aggregate exposure never changes sign on the open price interval.
class NoInteriorClearing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A probability-valued quantity in the closed unit interval. Used both for
/// market prices and for subjective beliefs.
class Probability {
 public:
  explicit Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw DomainError("probability must lie in [0, 1], got " + std::to_string(value));
    }
  }

  double value() const noexcept { return value_; }
  double complement() const noexcept { return 1.0 - value_; }
  bool interior() const noexcept { return value_ > 0.0 && value_ < 1.0; }

  friend bool operator==(Probability a, Probability b) = default;

 private:
  double value_;
};

/// x / (1 - x) for a probability strictly inside (0, 1).
class OddsRatio {
 public:
  explicit OddsRatio(double value) : value_(value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw DomainError("odds ratio must be finite and non-negative");
    }
  }

  static OddsRatio from(Probability prob) {
    if (!prob.interior()) {
      throw DomainError("odds diverge at probability 0 or 1");
    }
    return OddsRatio(prob.value() / prob.complement());
  }

  Probability to_probability() const { return Probability(value_ / (1.0 + value_)); }
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Signed fraction of capital committed to a position. Positive is long the
/// event, negative is long its complement.
class BetFraction {
 public:
  explicit BetFraction(double value) : value_(value) {
    if (!(value >= -1.0 && value <= 1.0)) {
      throw DomainError("bet fraction must lie in [-1, 1], got " + std::to_string(value));
    }
  }

  double value() const noexcept { return value_; }

  friend bool operator==(BetFraction a, BetFraction b) = default;

 private:
  double value_;
};

/// Exponent applied to the contract odds when computing the winning payout.
/// alpha = 1 is the ordinary all-or-nothing contract.
class PayoutSpec {
 public:
  explicit PayoutSpec(double alpha = 1.0) : alpha_(alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw DomainError("payout exponent alpha must be finite and >= 0");
    }
  }

  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// Throws DomainError unless p lies strictly inside (0, 1).
inline void require_interior(Probability p, const char* what) {
  if (!p.interior()) {
    throw DomainError(std::string(what) + " must lie strictly inside (0, 1)");
  }
}

}  // namespace kelly

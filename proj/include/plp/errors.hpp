#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace plp {

/// A parameter or input shape violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The system to invert is singular (zero pivot, zero AIF sample, rank-deficient basis).
class SingularInput : public std::runtime_error {
  public:
    explicit SingularInput(const std::string& what, std::vector<long> indices = {})
        : std::runtime_error(what), indices_(std::move(indices)) {}

    /// Offending 1-based indices, when the failure can be localized.
    const std::vector<long>& indices() const noexcept { return indices_; }

  private:
    std::vector<long> indices_;
};

/// A numerical routine failed to produce a finite result.
class NumericFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Data carry no usable variance (e.g. all pixel curves identical).
class DegenerateData : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace plp

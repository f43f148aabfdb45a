#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace coopnet {

/// Invalid model or control parameter. Carries the offending key so the CLI
/// can name it.
class ParameterError : public std::invalid_argument
{
  public:
    ParameterError(std::string key, const std::string& message)
        : std::invalid_argument(key + ": " + message), key_(std::move(key))
    {
    }

    const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

/// A realization that cannot be used (no BSs, empty cell, ...).
class DegenerateRealization : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// A realization discarded by a sampling budget or acceptance rule.
class RealizationRejected : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Nothing to estimate from (e.g. zero accepted trials).
class EstimationError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a closed-form expression.
class DomainError : public std::domain_error
{
    using std::domain_error::domain_error;
};

/// Quadrature or other numerical routine failed to converge.
class NumericalError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Output could not be written.
class IoError : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// A failure during one stage of a command run (simulate, fit, ...).
class StageError : public std::runtime_error
{
  public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage))
    {
    }

    const std::string& stage() const noexcept { return stage_; }

  private:
    std::string stage_;
};

} // namespace coopnet

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace inkbridge {

/// Exit-code family of a failure. The numeric values are the CLI exit codes.
enum class ErrorKind : int {
    validation = 1,
    io = 2,
    numerical = 3,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

  private:
    ErrorKind kind_;
};

/// Malformed or invariant-violating input.
class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string &what) : Error(ErrorKind::validation, what) {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string &what) : Error(ErrorKind::io, what) {}
};

/// Numerically ill-posed input, e.g. a covariance that is not PSD within tolerance.
class NumericalError : public Error {
  public:
    explicit NumericalError(const std::string &what) : Error(ErrorKind::numerical, what) {}
};

/// Collects non-fatal warnings (clamped scores, recycled ids, dropped items).
/// Operations accept an optional pointer; a null sink discards warnings.
class Diagnostics {
  public:
    void warn(std::string message) { warnings_.push_back(std::move(message)); }
    const std::vector<std::string> &warnings() const noexcept { return warnings_; }
    bool empty() const noexcept { return warnings_.empty(); }
    void clear() noexcept { warnings_.clear(); }

  private:
    std::vector<std::string> warnings_;
};

inline void warn(Diagnostics *diag, std::string message) {
    if (diag != nullptr) {
        diag->warn(std::move(message));
    }
}

} // namespace inkbridge

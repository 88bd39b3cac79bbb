#pragma once

#include <stdexcept>
#include <string>

namespace sclab {

/// Thrown when an input violates an operation's precondition or a size guard.
/// The CLI maps it to exit status 2.
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an iterative numeric routine fails to converge. Exit status 3.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Rejection sampler gave up; carries the number of attempts made.
class RetryLimitError : public std::runtime_error {
public:
    RetryLimitError(const std::string& what, long long attempts)
        : std::runtime_error(what + " (after " + std::to_string(attempts) + " attempts)"),
          attempts_(attempts) {}
    long long attempts() const noexcept { return attempts_; }

private:
    long long attempts_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw PreconditionError(msg);
}

}  // namespace sclab

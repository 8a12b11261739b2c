#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vcs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// A hypergeometric lower parameter sits on a non-positive integer.
class PoleError : public Error {
public:
    using Error::Error;
};

/// A series did not reach its tolerance within the allowed number of terms.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A normalization series diverges (or could not be certified) up to the cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double partial_sum, double last_term, std::size_t terms)
        : Error(what), partial_sum_(partial_sum), last_term_(last_term), terms_(terms) {}
    double partial_sum() const noexcept { return partial_sum_; }
    double last_term() const noexcept { return last_term_; }
    std::size_t terms() const noexcept { return terms_; }

private:
    double partial_sum_;
    double last_term_;
    std::size_t terms_;
};

/// A construction precondition failed; `index` names the offending level when relevant.
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what, long index = -1)
        : Error(what), index_(index) {}
    long index() const noexcept { return index_; }

private:
    long index_;
};

/// x_m is singular or too ill-conditioned to invert.
class AlgebraError : public Error {
public:
    AlgebraError(const std::string& what, long level) : Error(what), level_(level) {}
    long level() const noexcept { return level_; }

private:
    long level_;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

/// Quadrature or truncation could not reach the requested accuracy.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace vcs

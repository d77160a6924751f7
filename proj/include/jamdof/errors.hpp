#pragma once

#include <stdexcept>
#include <string>

namespace jamdof {

// Base class for all library errors. CLI maps each subclass to a
// distinct process exit code.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input: bad probability vector, unparsable distribution text,
// mismatched dimensions, invalid flag values.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(what) {}
};

// An operation was asked for a K it does not support (e.g. vertex
// enumeration above 2 dimensions, MAT region above K = 6).
class UnsupportedDimensionError : public Error {
public:
    explicit UnsupportedDimensionError(const std::string& what) : Error(what) {}
};

// A receiver is jammed with probability 1 (lambda_k = 0) but the requested
// operation needs it served.
class DegenerateMarginalError : public Error {
public:
    explicit DegenerateMarginalError(const std::string& what, int receiver)
        : Error(what), receiver_(receiver) {}
    int receiver() const { return receiver_; }

private:
    int receiver_;
};

// An operation's stated precondition does not hold (e.g. a symmetric
// distribution was required).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(what) {}
};

// A simulation exceeded its slot guard (50x the analytic expectation)
// without meeting its budgets. Names the starved receiver.
class NonTerminationError : public Error {
public:
    NonTerminationError(const std::string& what, int receiver)
        : Error(what), receiver_(receiver) {}
    int receiver() const { return receiver_; }

private:
    int receiver_;
};

// Numerical failure in the baseband lane (e.g. persistent ill-conditioned
// channel draws).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace jamdof

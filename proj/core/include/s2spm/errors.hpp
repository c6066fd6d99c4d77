#pragma once

#include <stdexcept>
#include <string>

namespace s2spm {

// Malformed input file; line is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, long line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class EmptyGraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested edge removals cannot keep the residual graph connected.
class InfeasibleSplitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A gate column has zero total mass, so mixture weights are undefined.
class DegenerateGateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TrainingDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Ranking task saw only one class.
class UndefinedAucError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Both assignments carry zero self information.
class UndefinedBnmiError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Training aborted (non-finite loss or gradient).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input has no variance to project.
class DegeneratePcaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace s2spm

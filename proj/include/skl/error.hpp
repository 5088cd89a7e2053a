#pragma once

#include <stdexcept>
#include <string>

namespace skl {

// Base class for all library failures. Subclasses distinguish conditions a
// caller may want to branch on (degenerate inputs vs numerical breakdown).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// Level set {a(x,.) = tau} has no points (tau at or below the symbol minimum).
class EmptyLevelSetError : public Error {
public:
    explicit EmptyLevelSetError(const std::string& msg) : Error(msg) {}
};

// Requested evaluation outside the valid range (glancing set, validity cap).
class OutOfRangeError : public Error {
public:
    explicit OutOfRangeError(const std::string& msg) : Error(msg) {}
};

// Iteration failed to converge (quadrature refinement, Newton, shooting).
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

// Characteristic fan degenerated; phase is not single-valued past this point.
class CausticError : public Error {
public:
    explicit CausticError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace skl

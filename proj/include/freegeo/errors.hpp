#pragma once

#include <stdexcept>
#include <string>

namespace freegeo {

// Bad inputs: parameters out of range, domain violations, unmet preconditions.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A requested moment does not exist (e.g. negative power against an atom at 0).
class InfiniteMomentError : public ValidationError {
public:
    explicit InfiniteMomentError(const std::string& what) : ValidationError(what) {}
};

// The computation itself broke down: bracket expansion exhausted, non-monotone
// transform tables, non-finite matrix entries.  The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace freegeo

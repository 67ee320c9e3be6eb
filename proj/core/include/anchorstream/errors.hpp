#pragma once

#include <stdexcept>
#include <string>

namespace anchorstream {

// Invalid inputs: bad cell tables, malformed files, out-of-range parameters.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Internal numeric degeneracy (non-finite variance, impossible state). Should
// never fire on validated inputs; treated as a bug by callers.
class DegeneracyError : public std::runtime_error {
public:
    explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace anchorstream

#pragma once

#include <stdexcept>
#include <string>

namespace sonicprint {

// Domain failure: bad input data, invalid specs, malformed files.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sonicprint

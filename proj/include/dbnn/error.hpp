#pragma once

#include <stdexcept>
#include <string>

namespace dbnn {

// All library failures surface as this exception type. The CLI maps it to
// exit code 2 (data/validation error).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace dbnn

#pragma once

#include <stdexcept>
#include <string>

namespace lyapnet {

// Error categories shared with the C API status codes (see include/lyapnet.h).
enum class ErrorCode : int {
    invalid_argument = 1,
    parse = 2,
    unknown_variable = 3,
    arity = 4,
    unknown_system = 5,
    non_finite = 6,
    singular_matrix = 7,
    schema = 8,
    shape_mismatch = 9,
    io = 10,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace lyapnet

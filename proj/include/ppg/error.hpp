#pragma once

#include <stdexcept>
#include <string>

namespace ppg {

enum class ErrorCode {
    invalid_input,
    out_of_range,
    insufficient_events,
    empty_result,
    invalid_order,
    undeterminable,
    rank_deficient,
    io,
    config,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace ppg

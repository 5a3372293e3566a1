#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cirsense {

enum class ErrorCode {
    config,          // malformed scene/config/grid, bad parameters
    input_format,    // trace or ground-truth file does not parse
    shape,           // dimension mismatch between operator and data
    rank_deficient,  // tap set cannot be resolved by the active subcarriers
    no_motion,       // motion-presence gate failed
    edge,            // strongest motion tap on the candidate-range boundary
    no_respiration,  // no in-band spectral peak above the detection margin
    invariant,       // an upstream invariant was violated (e.g. negative delay)
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cirsense

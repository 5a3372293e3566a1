#include "cirsense/error.hpp"

namespace cirsense {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::config: return "config";
        case ErrorCode::input_format: return "input_format";
        case ErrorCode::shape: return "shape";
        case ErrorCode::rank_deficient: return "rank_deficient";
        case ErrorCode::no_motion: return "no_motion";
        case ErrorCode::edge: return "edge";
        case ErrorCode::no_respiration: return "no_respiration";
        case ErrorCode::invariant: return "invariant";
    }
    return "unknown";
}

}  // namespace cirsense

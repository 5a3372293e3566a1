#include "cirsense/search.hpp"

#include "cirsense/error.hpp"

namespace cirsense {

void SearchSpec::validate() const {
    if (!(fine_step_taps > 0.0 && fine_step_taps < coarse_step_taps && coarse_step_taps <= span_taps))
        throw Error(ErrorCode::config, "search: need 0 < fine_step < coarse_step <= span");
    if (candidate_first > candidate_last) throw Error(ErrorCode::config, "search: empty candidate tap range");
}

}  // namespace cirsense

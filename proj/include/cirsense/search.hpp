#pragma once

#include <cmath>
#include <vector>

namespace cirsense {

/// Fractional-shift search grid shared by dominant- and dynamic-path alignment.
struct SearchSpec {
    double coarse_step_taps = 1.0 / 20.0;
    double fine_step_taps = 1.0 / 200.0;
    double span_taps = 0.5;
    int candidate_first = 0;  // dynamic-tap candidates, inclusive
    int candidate_last = 50;

    /// Throws Error(config) unless 0 < fine < coarse <= span and first <= last.
    void validate() const;

    int coarse_half_count() const { return static_cast<int>(std::floor(span_taps / coarse_step_taps + 1e-9)); }
    int fine_half_count() const { return static_cast<int>(std::floor(coarse_step_taps / fine_step_taps + 1e-9)); }
    double offset(int coarse_index, int fine_index) const {
        return coarse_index * coarse_step_taps + fine_index * fine_step_taps;
    }
};

struct GridSample {
    double offset_taps = 0.0;
    double value = 0.0;
};

struct GridSearchResult {
    double best_offset = 0.0;
    double best_value = -HUGE_VAL;
    int coarse_index = 0;
    int fine_index = 0;
    std::vector<GridSample> samples;  // evaluation order: coarse pass, then fine pass
};

/// Maximizes objective(coarse_index, fine_index) over offsets
/// coarse_index * coarse_step + fine_index * fine_step. The coarse pass covers
/// [-span, span]; the fine pass covers +-coarse_step around the coarse winner.
/// Ties go to the smaller |offset|, then the smaller offset, so the result
/// does not depend on evaluation order.
template <typename Objective>
GridSearchResult coarse_to_fine_max(Objective&& objective, const SearchSpec& spec) {
    GridSearchResult r;
    auto consider = [&](int ci, int fi) {
        const double off = spec.offset(ci, fi);
        const double v = objective(ci, fi);
        r.samples.push_back({off, v});
        const bool better = v > r.best_value ||
                            (v == r.best_value && (std::abs(off) < std::abs(r.best_offset) ||
                                                   (std::abs(off) == std::abs(r.best_offset) && off < r.best_offset)));
        if (better) {
            r.best_value = v;
            r.best_offset = off;
            r.coarse_index = ci;
            r.fine_index = fi;
        }
    };
    const int m = spec.coarse_half_count();
    for (int i = -m; i <= m; ++i) consider(i, 0);
    const int coarse_winner = r.coarse_index;
    const int q = spec.fine_half_count();
    for (int j = -q; j <= q; ++j)
        if (j != 0) consider(coarse_winner, j);
    return r;
}

}  // namespace cirsense

#pragma once

#include <cstdint>
#include <vector>

#include "cirsense/cir_recovery.hpp"
#include "cirsense/search.hpp"
#include "cirsense/types.hpp"

namespace cirsense {

struct DominoOptions {
    SearchSpec search;
    /// Aligned reference-tap power must exceed every other tap by this margin.
    double dominance_margin_db = 3.0;
    /// Frames whose reference power falls below this fraction of the frame energy are flagged.
    double min_reference_ratio = 1e-6;
    /// Refine the fine-grid optimum to the exact stationary point of |h[0 + eps']|^2.
    bool polish = true;
};

enum DominoFlag : std::uint8_t {
    kDominanceAmbiguous = 1U << 0,
    kWeakReference = 1U << 1,
};

/// Distortion-free channel: clean taps h'[n, t] = h[n + eps'_t, t] / h[0 + eps'_t, t]
/// together with the aligned, normalized spectra they were recovered from,
/// so later stages can apply further delay shifts in the frequency domain.
struct DominoResult {
    CirSeries clean;
    CsiSeries clean_csi;
    /// eps'_est per frame in taps. The applied delay shift is -per_frame_shift[t],
    /// so per_frame_shift[t] ~= -(tau_0 + eps_t) / T_s.
    std::vector<double> per_frame_shift;
    std::vector<double> reference_tap_power;
    std::vector<std::uint8_t> flags;

    std::size_t flagged(std::uint8_t mask) const;
};

/// Per-frame dominant-path alignment and ratio normalization. Requires tap 0
/// in the operator's tap set. Frames are taken by value and reused as the
/// clean spectra.
DominoResult align_dominant(CsiSeries frames, const PartialDftOperator& op, const DominoOptions& options = {});
DominoResult align_dominant(CsiSeries frames, const PartialDftOperator& op, const SearchSpec& search);

/// No compensation: raw recovered taps with zero shifts. Used when the
/// dominant-path stage is switched off.
DominoResult passthrough_channel(CsiSeries frames, const PartialDftOperator& op);

}  // namespace cirsense

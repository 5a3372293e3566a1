#pragma once

#include <vector>

#include "cirsense/types.hpp"

namespace cirsense {

/// Largest condition number of F^H F accepted by the operator.
inline constexpr double kMaxConditionNumber = 1e8;
/// Delay shifts are cyclic in the N-periodic delay domain; keep them inside
/// the leakage guard of the tap set.
inline constexpr double kMaxShiftTaps = 20.5;

/// Partial unitary DFT F_{K,L}, entry (k, n) = e^{-j 2 pi k n / N} / sqrt(N),
/// with its least-squares pseudo-inverse (F^H F)^{-1} F^H cached at build time.
/// Immutable after construction; safe to share across threads.
class PartialDftOperator {
public:
    explicit PartialDftOperator(const SystemConfig& cfg);

    const std::vector<int>& subcarriers() const { return subcarriers_; }
    int dft_size() const { return dft_size_; }
    int tap_offset() const { return tap_offset_; }
    int tap_count() const { return static_cast<int>(matrix_.cols()); }
    int tap_last() const { return tap_offset_ + tap_count() - 1; }
    int row_of(int tap) const { return tap - tap_offset_; }

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    const Eigen::MatrixXcd& pinv() const { return pinv_; }
    /// Condition number of F^H F.
    double condition_number() const { return condition_; }

    Eigen::VectorXcd recover(const Eigen::Ref<const Eigen::VectorXcd>& csi) const;

    /// Weights w with w . frame == tap `tap` of recover(delay_shift(frame, shift_taps)).
    Eigen::RowVectorXcd shifted_tap_weights(int tap, double shift_taps) const;

    /// Recovered taps of a unit-gain path at `position_taps` (delay / T_s) with
    /// no carrier phase: the sampled pulse as seen through the LS recovery.
    Eigen::VectorXcd pulse(double position_taps) const;

private:
    std::vector<int> subcarriers_;
    int dft_size_ = 0;
    int tap_offset_ = 0;
    Eigen::MatrixXcd matrix_;
    Eigen::MatrixXcd pinv_;
    double condition_ = 0.0;
};

/// Throws Error(rank_deficient) when |L| > |K| or cond(F^H F) > kMaxConditionNumber.
PartialDftOperator build_operator(const SystemConfig& cfg);

/// Column-wise pinv * H. Throws Error(shape) on a subcarrier-set mismatch.
CirSeries recover_cir(const PartialDftOperator& op, const CsiSeries& frames);

/// e^{+j 2 pi k s / N} for each subcarrier k.
Eigen::VectorXcd shift_phasors(const std::vector<int>& subcarriers, int dft_size, double shift_taps);

/// Multiplies each subcarrier by e^{+j 2 pi k s / N}; tap n of the recovered
/// result equals tap n + s of the input. Throws std::invalid_argument when
/// |shift_taps| exceeds kMaxShiftTaps.
CsiSeries delay_shift(CsiSeries frames, double shift_taps);

/// Plain inverse DFT with the missing subcarriers treated as zeros (F^H H),
/// evaluated on the operator's tap set. Reference point for the LS recovery.
CirSeries zero_filled_idft(const PartialDftOperator& op, const CsiSeries& frames);

}  // namespace cirsense

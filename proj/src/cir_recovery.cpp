#include "cirsense/cir_recovery.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "cirsense/error.hpp"

namespace cirsense {

namespace {

// e^{-j 2 pi k n / N} with the exponent reduced exactly in integers.
cplx dft_twiddle(long long k, long long n, long long dft_size) {
    long long r = (k * n) % dft_size;
    if (r < 0) r += dft_size;
    return std::polar(1.0, -2.0 * kPi * static_cast<double>(r) / static_cast<double>(dft_size));
}

void check_shape(const PartialDftOperator& op, const CsiSeries& frames) {
    if (frames.subcarriers != op.subcarriers() || frames.dft_size != op.dft_size())
        throw Error(ErrorCode::shape, "CSI subcarrier set does not match the recovery operator");
    if (static_cast<std::size_t>(frames.values.cols()) != frames.frame_count())
        throw Error(ErrorCode::shape, "CSI value matrix and timestamps disagree on the frame count");
}

}  // namespace

PartialDftOperator::PartialDftOperator(const SystemConfig& cfg)
    : subcarriers_(cfg.active_subcarriers), dft_size_(cfg.dft_size) {
    cfg.validate();
    tap_offset_ = cfg.tap_min();
    const auto rows = static_cast<Eigen::Index>(subcarriers_.size());
    const auto cols = static_cast<Eigen::Index>(cfg.tap_set.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(dft_size_));

    matrix_.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            matrix_(r, c) = scale * dft_twiddle(subcarriers_[static_cast<std::size_t>(r)], tap_offset_ + c, dft_size_);

    const Eigen::MatrixXcd gram = matrix_.adjoint() * matrix_;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition_ <= kMaxConditionNumber))
        throw Error(ErrorCode::rank_deficient,
                    "active subcarriers cannot resolve the tap set (cond(F^H F) = " + std::to_string(condition_) + ")");

    pinv_ = gram.ldlt().solve(matrix_.adjoint());
}

Eigen::VectorXcd PartialDftOperator::recover(const Eigen::Ref<const Eigen::VectorXcd>& csi) const {
    if (csi.size() != matrix_.rows()) throw Error(ErrorCode::shape, "CSI frame length does not match the operator");
    return pinv_ * csi;
}

Eigen::RowVectorXcd PartialDftOperator::shifted_tap_weights(int tap, double shift_taps) const {
    const Eigen::VectorXcd phasors = shift_phasors(subcarriers_, dft_size_, shift_taps);
    return pinv_.row(row_of(tap)).cwiseProduct(phasors.transpose());
}

Eigen::VectorXcd PartialDftOperator::pulse(double position_taps) const {
    Eigen::VectorXcd h(matrix_.rows());
    const double scale = 1.0 / std::sqrt(static_cast<double>(dft_size_));
    for (Eigen::Index r = 0; r < h.size(); ++r)
        h(r) = scale * std::polar(1.0, -2.0 * kPi * subcarriers_[static_cast<std::size_t>(r)] * position_taps /
                                           static_cast<double>(dft_size_));
    return pinv_ * h;
}

PartialDftOperator build_operator(const SystemConfig& cfg) { return PartialDftOperator(cfg); }

CirSeries recover_cir(const PartialDftOperator& op, const CsiSeries& frames) {
    check_shape(op, frames);
    CirSeries out;
    out.tap_offset = op.tap_offset();
    out.sample_rate_hz = frames.sample_rate_hz;
    out.timestamps = frames.timestamps;
    out.taps.noalias() = op.pinv() * frames.values;
    return out;
}

Eigen::VectorXcd shift_phasors(const std::vector<int>& subcarriers, int dft_size, double shift_taps) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(subcarriers.size()));
    for (std::size_t i = 0; i < subcarriers.size(); ++i)
        out(static_cast<Eigen::Index>(i)) =
            std::polar(1.0, 2.0 * kPi * subcarriers[i] * shift_taps / static_cast<double>(dft_size));
    return out;
}

CsiSeries delay_shift(CsiSeries frames, double shift_taps) {
    if (!(std::abs(shift_taps) <= kMaxShiftTaps))
        throw std::invalid_argument("delay_shift: |shift| exceeds the tap guard");
    if (shift_taps == 0.0) return frames;
    const Eigen::VectorXcd phasors = shift_phasors(frames.subcarriers, frames.dft_size, shift_taps);
    frames.values = phasors.asDiagonal() * frames.values;
    return frames;
}

CirSeries zero_filled_idft(const PartialDftOperator& op, const CsiSeries& frames) {
    check_shape(op, frames);
    CirSeries out;
    out.tap_offset = op.tap_offset();
    out.sample_rate_hz = frames.sample_rate_hz;
    out.timestamps = frames.timestamps;
    out.taps.noalias() = op.matrix().adjoint() * frames.values;
    return out;
}

}  // namespace cirsense

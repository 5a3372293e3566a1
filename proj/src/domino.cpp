#include "cirsense/domino.hpp"

#include <algorithm>
#include <cmath>

#include "cirsense/error.hpp"
#include "cirsense/parallel.hpp"

namespace cirsense {

namespace {

struct FrameAlignment {
    double shift = 0.0;  // applied delay shift in taps
    cplx reference{};
    std::uint8_t flags = 0;
};

// Precomputed phasors for the integer recentring and both grid passes.
struct PhasorTables {
    std::vector<Eigen::VectorXcd> integer;  // indexed by tap - tap_offset
    std::vector<Eigen::VectorXcd> coarse;   // indexed by i + m
    std::vector<Eigen::VectorXcd> fine;     // indexed by j + q
    int m = 0;
    int q = 0;

    PhasorTables(const PartialDftOperator& op, const SearchSpec& spec) : m(spec.coarse_half_count()), q(spec.fine_half_count()) {
        for (int n = op.tap_offset(); n <= op.tap_last(); ++n)
            integer.push_back(shift_phasors(op.subcarriers(), op.dft_size(), n));
        for (int i = -m; i <= m; ++i)
            coarse.push_back(shift_phasors(op.subcarriers(), op.dft_size(), spec.offset(i, 0)));
        for (int j = -q; j <= q; ++j)
            fine.push_back(shift_phasors(op.subcarriers(), op.dft_size(), spec.offset(0, j)));
    }
};

// Newton iteration on d/ds |sum_k a_k e^{j w_k s}|^2 = 0, started at the grid optimum
// and confined to +-fine_step around it.
double polish_shift(const Eigen::VectorXcd& a, const Eigen::VectorXd& omega, double start, double limit) {
    auto objective = [&](double s, cplx* d1, cplx* d2) {
        cplx t{}, t1{}, t2{};
        for (Eigen::Index k = 0; k < a.size(); ++k) {
            const cplx term = a(k) * std::polar(1.0, omega(k) * s);
            t += term;
            t1 += cplx(0.0, omega(k)) * term;
            t2 -= omega(k) * omega(k) * term;
        }
        if (d1 != nullptr) *d1 = t1;
        if (d2 != nullptr) *d2 = t2;
        return t;
    };
    const double start_value = std::norm(objective(start, nullptr, nullptr));
    double s = start;
    for (int iter = 0; iter < 12; ++iter) {
        cplx t1, t2;
        const cplx t = objective(s, &t1, &t2);
        const double g = 2.0 * std::real(std::conj(t) * t1);
        const double h = 2.0 * (std::norm(t1) + std::real(std::conj(t) * t2));
        if (!(h < 0.0)) break;
        const double step = -g / h;
        const double next = s + step;
        if (std::abs(next - start) > limit) break;
        s = next;
        if (std::abs(step) < 1e-13) break;
    }
    if (s != start && std::norm(objective(s, nullptr, nullptr)) < start_value) return start;
    return s;
}

FrameAlignment align_frame(const Eigen::Ref<const Eigen::VectorXcd>& frame, const PartialDftOperator& op,
                           const PhasorTables& tables, const Eigen::VectorXd& omega, const DominoOptions& options) {
    const int ref_row = op.row_of(0);
    const Eigen::VectorXcd raw = op.pinv() * frame;
    Eigen::Index strongest = 0;
    raw.cwiseAbs2().maxCoeff(&strongest);
    const int n0 = op.tap_offset() + static_cast<int>(strongest);

    // tap 0 after shifting by n0 + offset: sum_k u_k e^{j w_k offset}
    const Eigen::VectorXcd u = op.pinv().row(ref_row).transpose().cwiseProduct(frame).cwiseProduct(
        tables.integer[static_cast<std::size_t>(strongest)]);
    Eigen::VectorXcd coarse_winner;
    const auto result = coarse_to_fine_max(
        [&](int ci, int fi) {
            const auto& pc = tables.coarse[static_cast<std::size_t>(ci + tables.m)];
            if (fi == 0) return std::norm(u.cwiseProduct(pc).sum());
            if (coarse_winner.size() == 0) coarse_winner = u.cwiseProduct(pc);
            return std::norm(coarse_winner.cwiseProduct(tables.fine[static_cast<std::size_t>(fi + tables.q)]).sum());
        },
        options.search);

    FrameAlignment out;
    out.shift = n0 + result.best_offset;
    if (options.polish) {
        const Eigen::VectorXcd a = op.pinv().row(ref_row).transpose().cwiseProduct(frame);
        out.shift = polish_shift(a, omega, out.shift, options.search.fine_step_taps);
    }
    return out;
}

}  // namespace

std::size_t DominoResult::flagged(std::uint8_t mask) const {
    return static_cast<std::size_t>(std::count_if(flags.begin(), flags.end(), [mask](std::uint8_t f) { return (f & mask) != 0; }));
}

DominoResult align_dominant(CsiSeries frames, const PartialDftOperator& op, const SearchSpec& search) {
    DominoOptions options;
    options.search = search;
    return align_dominant(std::move(frames), op, options);
}

DominoResult align_dominant(CsiSeries frames, const PartialDftOperator& op, const DominoOptions& options) {
    options.search.validate();
    if (frames.subcarriers != op.subcarriers() || frames.dft_size != op.dft_size())
        throw Error(ErrorCode::shape, "CSI subcarrier set does not match the recovery operator");
    if (op.tap_offset() > 0 || op.tap_last() < 0)
        throw Error(ErrorCode::config, "dominant-path alignment needs tap 0 in the tap set");

    const std::size_t count = frames.frame_count();
    const int ref_row = op.row_of(0);
    const PhasorTables tables(op, options.search);
    Eigen::VectorXd omega(static_cast<Eigen::Index>(op.subcarriers().size()));
    for (std::size_t k = 0; k < op.subcarriers().size(); ++k)
        omega(static_cast<Eigen::Index>(k)) = 2.0 * kPi * op.subcarriers()[k] / static_cast<double>(op.dft_size());

    DominoResult out;
    out.per_frame_shift.resize(count);
    out.reference_tap_power.resize(count);
    out.flags.assign(count, 0);

    parallel_for(count, [&](std::size_t t) {
        auto col = frames.values.col(static_cast<Eigen::Index>(t));
        const double energy = col.squaredNorm();
        const FrameAlignment a = align_frame(col, op, tables, omega, options);
        col = shift_phasors(op.subcarriers(), op.dft_size(), a.shift).cwiseProduct(col);
        const cplx reference = op.pinv().row(ref_row).transpose().cwiseProduct(col).sum();
        out.per_frame_shift[t] = -a.shift;
        out.reference_tap_power[t] = std::norm(reference);
        std::uint8_t flags = 0;
        if (!(std::norm(reference) > options.min_reference_ratio * energy)) flags |= kWeakReference;
        if (reference == cplx{}) {
            col.setZero();
        } else {
            col /= reference;
        }
        out.flags[t] = flags;
    });

    out.clean.tap_offset = op.tap_offset();
    out.clean.sample_rate_hz = frames.sample_rate_hz;
    out.clean.timestamps = frames.timestamps;
    out.clean.taps.noalias() = op.pinv() * frames.values;
    out.clean.taps.row(ref_row).setOnes();

    const double margin = std::pow(10.0, -options.dominance_margin_db / 10.0);
    for (std::size_t t = 0; t < count; ++t) {
        if ((out.flags[t] & kWeakReference) != 0 && out.reference_tap_power[t] == 0.0) {
            out.clean.taps.col(static_cast<Eigen::Index>(t)).setZero();
            continue;
        }
        double runner_up = 0.0;
        for (Eigen::Index r = 0; r < out.clean.taps.rows(); ++r)
            if (r != ref_row) runner_up = std::max(runner_up, std::norm(out.clean.taps(r, static_cast<Eigen::Index>(t))));
        if (runner_up > margin) out.flags[t] |= kDominanceAmbiguous;
    }
    out.clean_csi = std::move(frames);
    return out;
}

DominoResult passthrough_channel(CsiSeries frames, const PartialDftOperator& op) {
    DominoResult out;
    out.clean = recover_cir(op, frames);
    const std::size_t count = frames.frame_count();
    out.per_frame_shift.assign(count, 0.0);
    out.reference_tap_power.resize(count);
    out.flags.assign(count, 0);
    if (out.clean.has_tap(0))
        for (std::size_t t = 0; t < count; ++t)
            out.reference_tap_power[t] = std::norm(out.clean.tap(0)(static_cast<Eigen::Index>(t)));
    out.clean_csi = std::move(frames);
    return out;
}

}  // namespace cirsense

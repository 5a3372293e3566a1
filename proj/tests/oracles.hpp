#pragma once

// Reference computations for the tests. Each one takes a different route from
// the library: direct exponentials instead of recurrences, QR instead of the
// normal equations, dense scans instead of coarse-to-fine search.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cirsense/channel_model.hpp"
#include "cirsense/types.hpp"

namespace oracle {

using cirsense::cplx;
using cirsense::kPi;

/// CSI of a path set, one std::exp per (subcarrier, path).
inline Eigen::VectorXcd csi_direct(const cirsense::SystemConfig& cfg, const std::vector<cirsense::PathSpec>& paths,
                                   const cirsense::DistortionState& d = {}) {
    const auto& ks = cfg.active_subcarriers;
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ks.size()));
    const long double df = static_cast<long double>(cfg.bandwidth_hz) / cfg.dft_size;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        std::complex<long double> acc{};
        for (const auto& p : paths) {
            const long double f = static_cast<long double>(cfg.carrier_freq_hz) + ks[i] * df;
            const long double tau = static_cast<long double>(p.delay_s) + d.delay_shift_s;
            acc += std::complex<long double>(p.gain.real(), p.gain.imag()) *
                   std::exp(std::complex<long double>(0.0L, -2.0L * 3.14159265358979323846264338327950288L * f * tau));
        }
        h(static_cast<Eigen::Index>(i)) = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    return h * (d.mag_gain * std::polar(1.0, -d.phase_offset_rad) / std::sqrt(static_cast<double>(cfg.dft_size)));
}

/// Partial DFT matrix built from std::exp of the raw exponent.
inline Eigen::MatrixXcd partial_dft(const cirsense::SystemConfig& cfg) {
    const auto& ks = cfg.active_subcarriers;
    Eigen::MatrixXcd f(static_cast<Eigen::Index>(ks.size()), static_cast<Eigen::Index>(cfg.tap_set.size()));
    for (std::size_t r = 0; r < ks.size(); ++r)
        for (std::size_t c = 0; c < cfg.tap_set.size(); ++c)
            f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::exp(cplx(0.0, -2.0 * kPi * ks[r] * cfg.tap_set[c] / cfg.dft_size)) /
                std::sqrt(static_cast<double>(cfg.dft_size));
    return f;
}

/// Least squares through a column-pivoting QR of F.
inline Eigen::VectorXcd ls_qr(const cirsense::SystemConfig& cfg, const Eigen::VectorXcd& csi) {
    return partial_dft(cfg).colPivHouseholderQr().solve(csi);
}

inline double nmse_db(const Eigen::VectorXcd& estimate, const Eigen::VectorXcd& truth) {
    return 10.0 * std::log10((estimate - truth).squaredNorm() / truth.squaredNorm());
}

/// E|x - mean|^2 by two explicit passes.
inline double variance(const std::vector<cplx>& x) {
    cplx m{};
    for (const auto& v : x) m += v;
    m /= static_cast<double>(x.size());
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v - m);
    return acc / static_cast<double>(x.size());
}

/// Tap `tap` after a delay shift of s taps, by explicit per-frame spectrum
/// rotation and QR re-recovery.
inline std::vector<cplx> shifted_tap_qr(const cirsense::SystemConfig& cfg, const Eigen::MatrixXcd& csi, int tap,
                                        double s) {
    const Eigen::MatrixXcd f = partial_dft(cfg);
    const auto qr = f.colPivHouseholderQr();
    Eigen::MatrixXcd rotated = csi;
    for (std::size_t k = 0; k < cfg.active_subcarriers.size(); ++k)
        rotated.row(static_cast<Eigen::Index>(k)) *=
            std::exp(cplx(0.0, 2.0 * kPi * cfg.active_subcarriers[k] * s / cfg.dft_size));
    const Eigen::MatrixXcd taps = qr.solve(rotated);
    const Eigen::Index row = tap - cfg.tap_min();
    return {taps.row(row).begin(), taps.row(row).end()};
}

/// Row `tap` of the QR pseudo-inverse, for repeated shifted-tap evaluation.
inline Eigen::RowVectorXcd qr_pinv_row(const cirsense::SystemConfig& cfg, int tap) {
    const Eigen::MatrixXcd f = partial_dft(cfg);
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(f.rows(), f.rows());
    return f.colPivHouseholderQr().solve(eye).row(tap - cfg.tap_min());
}

inline std::vector<cplx> shifted_tap_from_row(const cirsense::SystemConfig& cfg, const Eigen::RowVectorXcd& row,
                                              const Eigen::MatrixXcd& csi, double s) {
    Eigen::RowVectorXcd w = row;
    for (std::size_t k = 0; k < cfg.active_subcarriers.size(); ++k)
        w(static_cast<Eigen::Index>(k)) *= std::exp(cplx(0.0, 2.0 * kPi * cfg.active_subcarriers[k] * s / cfg.dft_size));
    const Eigen::RowVectorXcd series = w * csi;
    return {series.begin(), series.end()};
}

/// Argmax of f over a dense uniform grid on [lo, hi].
template <typename F>
double dense_argmax(F&& f, double lo, double hi, int points) {
    double best_x = lo;
    double best = -HUGE_VAL;
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        const double v = f(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    return best_x;
}

/// |E e^{-j phi}|^2 for phi = a sin(u), u uniform: J0(a)^2.
inline double sinusoid_coherence(double phase_amplitude) {
    const double j0 = std::cyl_bessel_j(0.0, phase_amplitude);
    return j0 * j0;
}

/// Monte-Carlo estimate of the same quantity.
inline double sinusoid_coherence_mc(double phase_amplitude, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    cplx acc{};
    for (int i = 0; i < samples; ++i) acc += std::polar(1.0, -phase_amplitude * std::sin(u(rng)));
    return std::norm(acc / static_cast<double>(samples));
}

/// Periodogram peak of a complex tone by brute-force scan.
inline double tone_peak_hz(const std::vector<cplx>& x, double fs, double lo, double hi, int points) {
    return dense_argmax(
        [&](double f) {
            cplx a{}, b{};
            for (std::size_t t = 0; t < x.size(); ++t) {
                a += x[t] * std::exp(cplx(0.0, -2.0 * kPi * f * t / fs));
                b += x[t] * std::exp(cplx(0.0, 2.0 * kPi * f * t / fs));
            }
            return std::norm(a) + std::norm(b);
        },
        lo, hi, points);
}

}  // namespace oracle

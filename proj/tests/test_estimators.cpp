#include <doctest.h>

#include <random>

#include "cirsense/cir_recovery.hpp"
#include "cirsense/domino.hpp"
#include "cirsense/dylign.hpp"
#include "cirsense/error.hpp"
#include "cirsense/estimators.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cirsense;

namespace {

std::vector<cplx> tone(double f, double fs, double seconds, cplx scale = 1.0) {
    std::vector<cplx> x;
    for (int t = 0; t < static_cast<int>(fs * seconds); ++t) x.push_back(scale * std::polar(1.0, 2.0 * kPi * f * t / fs));
    return x;
}

}  // namespace

TEST_CASE("pure tone rate") {
    CHECK(respiration_rate(tone(0.25, 100.0, 40.0), 100.0) == doctest::Approx(15.0).epsilon(0.05 / 15.0));
    CHECK(respiration_rate(tone(-0.4, 50.0, 30.0), 50.0) == doctest::Approx(24.0).epsilon(0.05 / 24.0));
}

TEST_CASE("rate is invariant to a complex gain") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::vector<cplx> x = tone(0.31, 100.0, 30.0);
    for (auto& v : x) v += 0.3 * cplx(g(rng), g(rng));
    const double base = respiration_rate(x, 100.0);
    std::vector<cplx> scaled = x;
    for (auto& v : scaled) v *= std::polar(37.0, 2.2);
    CHECK(respiration_rate(scaled, 100.0) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("rate matches a brute-force periodogram scan") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    std::vector<cplx> x = tone(0.277, 20.0 * 5, 30.0, std::polar(0.2, 1.0));
    for (auto& v : x) v += 0.2 * cplx(g(rng), g(rng)) + cplx(3.0, -1.0);
    RespirationOptions opt;
    opt.smoothing_s = 0.01;  // single-sample average: same signal as the scan
    const RespirationSpectrum s = analyze_respiration(x, 100.0, opt);
    REQUIRE(s.detected);
    std::vector<cplx> centred = x;
    cplx mean{};
    for (const auto& v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (std::size_t t = 0; t < x.size(); ++t)
        centred[t] = (x[t] - mean) * (0.5 - 0.5 * std::cos(2.0 * kPi * t / (x.size() - 1)));
    const double ref = oracle::tone_peak_hz(centred, 100.0, 0.1, 0.7, 6001);
    CHECK(std::abs(s.peak_hz - ref) < 2e-4);
}

TEST_CASE("no respiration in a constant or noise-only signal") {
    const std::vector<cplx> flat(3000, cplx(1.0, 2.0));
    try {
        respiration_rate(flat, 100.0);
        FAIL("expected no_respiration");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_respiration);
    }
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::vector<cplx> noise;
    for (int t = 0; t < 3000; ++t) noise.emplace_back(g(rng), g(rng));
    CHECK_FALSE(analyze_respiration(noise, 100.0).detected);
}

TEST_CASE("short windows raise the lower band edge") {
    const RespirationSpectrum s = analyze_respiration(tone(0.3, 100.0, 15.0), 100.0);
    CHECK(s.band_low_hz == doctest::Approx(2.0 / 15.0));
    CHECK(s.detected);
    CHECK(s.bpm == doctest::Approx(18.0).epsilon(0.1 / 18.0));
}

TEST_CASE("large excursions resolve to the fundamental") {
    // phase swing where the second harmonic is as strong as the first
    std::vector<cplx> x;
    for (int t = 0; t < 3000; ++t) x.push_back(std::polar(1.0, 2.6 * std::sin(2.0 * kPi * 0.2 * t / 100.0)));
    CHECK(respiration_rate(x, 100.0) == doctest::Approx(12.0).epsilon(0.05 / 12.0));
}

TEST_CASE("distance conversion") {
    SystemConfig cfg = SystemConfig::wifi_160mhz();
    cfg.light_speed_mps = 3e8;
    const double ts = cfg.sample_interval_s();
    CHECK(target_distance(2.46 * ts, cfg, 0.6) == doctest::Approx(5.2125));
    CHECK(target_distance(2.485 * ts, cfg, 0.6) - target_distance(2.46 * ts, cfg, 0.6) ==
          doctest::Approx(0.046875));
    CHECK(target_distance(0.0, cfg, 0.6) == doctest::Approx(0.6));
    CHECK_THROWS_AS(target_distance(-1e-12, cfg, 0.6), Error);
    CHECK_THROWS_AS(target_distance(1e-9, cfg, 0.0), Error);

    const BistaticGeometry g{0.6};
    CHECK(bisector_range(g.path_length(4.0), 0.6) == doctest::Approx(4.0));
    CHECK(excess_half_path(5.6, 0.6) == doctest::Approx(2.5));
}

TEST_CASE("on-grid SSNR follows the target-to-noise ratio") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    SceneSpec scene = fixture::breathing_scene(cfg, 5.0, 0.25, 0.004, 0.05, 100.0, 40.0);
    const double sigma = noise_std_for_ssnr(0.05, 25.0);
    scene.noise_std = sigma;
    const SyntheticTrace trace = synth_scene(cfg, scene);
    const DominoResult clean = align_dominant(trace.csi, op);
    const AlignmentResult a = align_dynamic(clean, op);

    const double weight = op.pinv().row(op.row_of(a.tap_index)).squaredNorm();
    NoiseFloor supplied;
    supplied.tap_noise = 2.0 * sigma * sigma * weight;
    supplied.subcarrier_noise = 2.0 * sigma * sigma;
    const double mu2 = trace.truth.coherence(0, cfg.carrier_freq_hz);
    const SsnrReport r = ssnr_report(clean, a, supplied, mu2);
    CHECK(r.coherence_corrected);
    CHECK(r.noise_source == "supplied");
    CHECK(r.ratio_db == doctest::Approx(power_db(0.05 * 0.05 / *supplied.tap_noise)).epsilon(0.5 / 25.0));

    const SsnrReport est = ssnr_report(clean, a, {}, mu2);
    CHECK(est.noise_source == "estimated");
    CHECK(est.ratio_db == doctest::Approx(r.ratio_db).epsilon(1.0 / 25.0));
    CHECK(est.per_subcarrier_ratio_db == doctest::Approx(r.per_subcarrier_ratio_db).epsilon(0.1));
}

TEST_CASE("tap-to-subcarrier gap follows the DFT size and the LS noise gain") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    SceneSpec scene = fixture::breathing_scene(cfg, 5.0, 0.25, 0.004, 0.05, 100.0, 40.0);
    const double sigma = noise_std_for_ssnr(0.05, 40.0);
    scene.noise_std = sigma;
    const SyntheticTrace trace = synth_scene(cfg, scene);
    const DominoResult clean = align_dominant(trace.csi, op);
    const AlignmentResult a = align_dynamic(clean, op);
    const double weight = oracle::qr_pinv_row(cfg, a.tap_index).squaredNorm();
    NoiseFloor supplied;
    supplied.tap_noise = 2.0 * sigma * sigma * weight;
    supplied.subcarrier_noise = 2.0 * sigma * sigma;
    const SsnrReport r = ssnr_report(clean, a, supplied, trace.truth.coherence(0, cfg.carrier_freq_hz));
    const double expected = power_db(cfg.dft_size) - power_db(weight);
    CHECK(r.ratio_db - r.per_subcarrier_ratio_db == doctest::Approx(expected).epsilon(0.5 / expected));
}

TEST_CASE("alignment raises the SSNR of an off-grid target") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    SceneSpec scene = fixture::breathing_scene(cfg, 5.5, 0.25, 0.004, 0.05, 100.0, 30.0);
    scene.noise_std = noise_std_for_ssnr(0.05, 20.0);
    const SyntheticTrace trace = synth_scene(cfg, scene);
    const DominoResult clean = align_dominant(trace.csi, op);
    const SsnrReport r = ssnr_report(clean, align_dynamic(clean, op));
    CHECK(r.ratio_db > r.unaligned_ratio_db + 2.0);
    CHECK(r.ratio_db > r.per_subcarrier_ratio_db);
}

TEST_CASE("mode names") {
    for (SensingMode m : {SensingMode::respiration, SensingMode::distance, SensingMode::dual, SensingMode::multi})
        CHECK(parse_sensing_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_sensing_mode("walking"), Error);
}

#include <doctest.h>

#include "cirsense/error.hpp"
#include "cirsense/search.hpp"
#include "oracles.hpp"

using namespace cirsense;

TEST_CASE("coarse-to-fine search lands within a fine step of the dense optimum") {
    const SearchSpec spec;
    for (double peak : {-0.43, -0.2, 0.0, 0.237, 0.4999}) {
        auto f = [peak](double x) { return -std::pow(x - peak, 2) + 0.01 * std::cos(3.0 * x); };
        const auto r = coarse_to_fine_max([&](int ci, int fi) { return f(spec.offset(ci, fi)); }, spec);
        const double dense = oracle::dense_argmax(f, -0.55, 0.55, 110001);
        CHECK(std::abs(r.best_offset - dense) <= spec.fine_step_taps / 2 + 1e-9);
    }
}

TEST_CASE("grid layout and tie-break") {
    const SearchSpec spec;
    CHECK(spec.coarse_half_count() == 10);
    CHECK(spec.fine_half_count() == 10);
    const auto flat = coarse_to_fine_max([](int, int) { return 1.0; }, spec);
    CHECK(flat.best_offset == 0.0);
    CHECK(flat.samples.size() == 21 + 20);

    // symmetric objective: the negative side wins a tie at equal |offset|
    const auto sym = coarse_to_fine_max(
        [&](int ci, int fi) { return -std::abs(std::abs(spec.offset(ci, fi)) - 0.3); }, spec);
    CHECK(sym.best_offset == doctest::Approx(-0.3));
}

TEST_CASE("search spec validation") {
    SearchSpec spec;
    spec.fine_step_taps = spec.coarse_step_taps;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.candidate_first = 10;
    spec.candidate_last = 5;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.coarse_step_taps = 0.6;
    CHECK_THROWS_AS(spec.validate(), Error);
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tra/asymptotics.hpp"
#include "tra/errors.hpp"

using namespace tra;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("wrap_phase lands in (-pi, pi]") {
    CHECK(wrap_phase(kPi) == Approx(kPi));
    CHECK(wrap_phase(-kPi) == Approx(kPi));
    CHECK(wrap_phase(7.0) == Approx(7.0 - 2 * kPi));
    CHECK(wrap_phase(-0.25) == -0.25);
}

TEST_CASE("closed-form phase is smooth in z") {
    const FamilyParams p = MeixnerPollaczek{1.3, 0.9};
    const double h = 1e-6;
    const ScatteringResult a = closed_form_scattering(p, 0.8), b = closed_form_scattering(p, 0.8 + h);
    CHECK(std::abs(wrap_phase(b.phase - a.phase)) <= 1e-4);
    CHECK(a.amplitude > 0.0);
    CHECK(std::isfinite(a.amplitude));
}

TEST_CASE("fit reproduces the closed form") {
    for (const FamilyParams p : {FamilyParams(MeixnerPollaczek{1.0, 1.0}),
                                 FamilyParams(ContinuousDualHahn{1.2, cplx(0.75), cplx(0.75)}),
                                 FamilyParams(Wilson{cplx(1.1), cplx(0.8), cplx(0.5), cplx(0.5)})}) {
        const ScatteringResult c = closed_form_scattering(p, 1.1);
        const ScatteringResult f = fit_scattering(p, 1.1);
        CHECK(f.method == ScatteringMethod::Fitted);
        CHECK(std::abs(wrap_phase(f.phase - c.phase)) <= 1e-5);
        CHECK(std::abs(f.amplitude / c.amplitude - 1.0) <= 1e-5);
        CHECK(f.residual <= 1e-5);
    }
}

TEST_CASE("envelope decays like n^(-1/2)") {
    CHECK(envelope_slope(MeixnerPollaczek{1.0, 1.0}, 0.7) == Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("inverse gamma envelope vanishes at a spectrum point") {
    const FamilyParams p = MeixnerPollaczek{1.0, 1.0};
    CHECK(inverse_gamma_envelope(p, cplx(0.0, 1.0)) == 0.0);
    CHECK(inverse_gamma_envelope(p, cplx(0.5, 0.0)) > 0.0);
}

TEST_CASE("scan is thread-count independent") {
    const FamilyParams p = ContinuousDualHahn{1.2, cplx(0.75), cplx(0.75)};
    const std::vector<double> zs = {0.4, 0.9, 1.6};
    NRange r;
    r.samples = 500;
    const auto a = scan_scattering(p, zs, r, true), b = scan_scattering(p, zs, r, false);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        CHECK(a[i].phase == b[i].phase);
        CHECK(a[i].amplitude == b[i].amplitude);
    }
}

TEST_CASE("large-n samples cover the range") {
    NRange r{100, 200, 11};
    const auto v = evaluate_large_n(MeixnerPollaczek{1.0, 1.0}, 0.5, r);
    REQUIRE(v.size() == 11);
    CHECK(v.front().first == 100);
    CHECK(v.back().first == 200);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(fit_scattering(ContinuousDualHahn{1.2, cplx(0.75), cplx(0.75)}, -1.0), ValidationError);
    CHECK_THROWS_AS(closed_form_scattering(Wilson{cplx(1.1), cplx(0.8), cplx(0.5), cplx(0.5)}, 0.0), ValidationError);
}

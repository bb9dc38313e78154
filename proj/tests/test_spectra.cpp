#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tra/spectra.hpp"

using namespace tra;
using doctest::Approx;

TEST_CASE("spectrum points of the mixed regime") {
    const SpectrumResult s = spectrum_points(ContinuousDualHahn{-1.3, cplx(1.5), cplx(1.5)});
    CHECK(s.finite);
    CHECK(s.N == 1);
    REQUIRE(s.energies.size() == 2);
    CHECK(s.energies[0].value == Approx(-1.69));
    CHECK(s.energies[1].value == Approx(-0.09));

    const SpectrumResult w = spectrum_points(Wilson{cplx(-2.0), cplx(2.5), cplx(2.5), cplx(2.5)});
    CHECK(w.boundary);
    CHECK(w.energies.back().value == Approx(0.0));

    const SpectrumResult m = spectrum_points(MeixnerPollaczek{1.0, 1.0}, 7);
    CHECK_FALSE(m.finite);
    CHECK(m.energies.size() == 7);
}

TEST_CASE("jacobi matrix is symmetric tridiagonal") {
    const Eigen::MatrixXd J = jacobi_matrix(Wilson{cplx(1.1), cplx(0.8), cplx(0.5), cplx(0.5)}, 12);
    CHECK((J - J.transpose()).norm() == 0.0);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            if (std::abs(i - j) > 1) CHECK(J(i, j) == 0.0);
}

TEST_CASE("gauss rule from the recursion") {
    const FamilyParams p = MeixnerPollaczek{1.2, 1.0};
    const QuadratureRule r = gauss_rule(p, 30);
    double mass = 0.0;
    for (double w : r.weights) mass += w;
    CHECK(mass == Approx(1.0).epsilon(1e-13));
    CHECK(std::is_sorted(r.nodes.begin(), r.nodes.end()));
    for (int n = 0; n <= 8; ++n)
        for (int m = 0; m <= 8; ++m) CHECK(std::abs(gauss_pairing(p, 30, n, m) - (n == m)) <= 1e-12);
}

TEST_CASE("finite families: the full-size rule is the weight itself") {
    const FamilyParams p = Krawtchouk{6, 0.3};
    const QuadratureRule r = gauss_rule(p, 7);
    for (int k = 0; k <= 6; ++k) CHECK(r.nodes[k] == Approx(double(k)).epsilon(1e-12));
}

TEST_CASE("natural argument round trip") {
    const FamilyParams p = ContinuousDualHahn{1.2, cplx(0.75), cplx(0.75)};
    const RecurrenceCoefficients rc(p);
    CHECK(double(natural_argument(p, rc.lhs(2.25L))) == Approx(2.25));
}

TEST_CASE("measure cross-check for continuous families") {
    for (const FamilyParams p : {FamilyParams(MeixnerPollaczek{1.0, std::numbers::pi / 2}),
                                 FamilyParams(ContinuousDualHahn{1.2, cplx(0.75), cplx(0.75)})})
        for (int n = 0; n <= 4; ++n) CHECK(measure_crosscheck(p, 40, n, 4 - n) <= 1e-10);
}

TEST_CASE("mixed-regime Jacobi nodes approach the closed-form points") {
    const MixedNodeReport r = mixed_regime_nodes(ContinuousDualHahn{-1.3, cplx(1.5), cplx(1.5)}, 60);
    REQUIRE(r.closedFormPoints.size() == 2);
    REQUIRE(!r.nodes.empty());
    CHECK(r.nodes.size() == 60);
}

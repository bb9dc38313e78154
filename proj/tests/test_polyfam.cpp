#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tra/errors.hpp"
#include "tra/polyfam.hpp"

using namespace tra;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

double gram_defect(const std::vector<std::vector<double>>& G) {
    double d = 0.0;
    for (std::size_t i = 0; i < G.size(); ++i)
        for (std::size_t j = 0; j < G.size(); ++j) d = std::max(d, std::abs(G[i][j] - (i == j ? 1.0 : 0.0)));
    return d;
}

const std::vector<FamilyParams>& symmetric_families() {
    static const std::vector<FamilyParams> v = {
        MeixnerPollaczek{1.3, 0.9},
        Meixner{0.8, 0.35},
        Krawtchouk{12, 0.3},
        ContinuousDualHahn{0.9, cplx(0.6), cplx(1.4)},
        DualHahn{10, 0.5, 2.0},
        Wilson{cplx(0.9), cplx(0.7), cplx(0.5), cplx(1.1)},
        Racah{10, 2.09015, 1.86569, -19.5374},
    };
    return v;
}
}  // namespace

TEST_CASE("low-degree values") {
    CHECK(poly_eval_recursion(MeixnerPollaczek{1.0, kPi / 2}, 1, 1.0) == Approx(std::sqrt(2.0)).epsilon(1e-15));
    for (const auto& p : symmetric_families()) CHECK(poly_eval_recursion(p, 0, 0.3) == 1.0);
}

TEST_CASE("krawtchouk at gamma = 1/2 has constant diagonal N/2") {
    const RecurrenceCoefficients rc(Krawtchouk{5, 0.5});
    for (int n = 0; n <= 5; ++n) CHECK(rc.diag(n) == Approx(2.5));
}

TEST_CASE("recursions are symmetric") {
    for (const auto& p : symmetric_families()) {
        const RecurrenceCoefficients rc(p);
        CHECK(rc.symmetric());
        const int top = finite_size(p).value_or(15) - 1;
        for (int n = 0; n + 1 <= top; ++n) CHECK(rc.lower(n + 1) == rc.upper(n));
    }
}

TEST_CASE("recursion agrees with the hypergeometric closed form") {
    for (const auto& p : symmetric_families()) {
        const int top = std::min(20, finite_size(p).value_or(21) - 1);
        const double arg = is_discrete(p) ? 3.0 : 1.7;
        for (int n = 0; n <= top; ++n) {
            const double c = poly_eval_closed(p, n, arg);
            CHECK(std::abs(poly_eval_recursion(p, n, arg) - c) <= 1e-10 * std::max(1.0, std::abs(c)));
        }
    }
}

TEST_CASE("log evaluation matches direct evaluation") {
    const FamilyParams p = Meixner{0.8, 0.35};
    const auto [s, l] = poly_eval_log(p, 12, 4.0);
    CHECK(s * std::exp(l) == Approx(poly_eval_recursion(p, 12, 4.0)).epsilon(1e-12));
}

TEST_CASE("range checks") {
    CHECK_THROWS_AS(validate(MeixnerPollaczek{-1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(validate(MeixnerPollaczek{1.0, 4.0}), ValidationError);
    CHECK_THROWS_AS(validate(Krawtchouk{4, 1.2}), ValidationError);
    CHECK_THROWS_AS(validate(ContinuousDualHahn{-1.3, cplx(0.75), cplx(0.75)}), ValidationError);
    CHECK_NOTHROW(validate(FamilyParams(MeixnerPollaczek{-1.0, 1.0}, true)));
    CHECK_THROWS_AS(poly_eval_recursion(Krawtchouk{4, 0.5}, 5, 1.0), ValidationError);
}

TEST_CASE("orthonormality of the finite families and truncated meixner") {
    CHECK(gram_defect(orthogonality_gram(Krawtchouk{12, 0.3}, 10)) <= 1e-12);
    CHECK(gram_defect(orthogonality_gram(DualHahn{10, 0.5, 2.0}, 10)) <= 1e-12);
    CHECK(gram_defect(orthogonality_gram(Racah{10, 2.09015, 1.86569, -19.5374}, 10)) <= 1e-12);
    CHECK(gram_defect(orthogonality_gram(Meixner{0.8, 0.35}, 10)) <= 1e-10);
    CHECK(meixner_kmax(Meixner{0.8, 0.35}, 10) > 10);
}

TEST_CASE("dual orthogonality of the finite families") {
    for (const FamilyParams p : {FamilyParams(Krawtchouk{8, 0.4}), FamilyParams(DualHahn{8, 0.5, 2.0})})
        for (int n = 0; n <= 8; ++n)
            for (int m = 0; m <= 8; ++m) CHECK(dual_orthogonality_defect(p, n, m) <= 1e-12);
}

TEST_CASE("continuous orthonormality") {
    QuadOptions q;
    CHECK(gram_defect(orthogonality_gram(MeixnerPollaczek{1.3, 0.9}, 6, q)) <= 1e-7);
    CHECK(gram_defect(orthogonality_gram(ContinuousDualHahn{0.9, cplx(0.6), cplx(1.4)}, 6, q)) <= 1e-7);
    // the serial path gives the same Gram matrix
    QuadOptions s;
    s.parallel = false;
    CHECK(orthogonality_gram(MeixnerPollaczek{1.3, 0.9}, 4, s) == orthogonality_gram(MeixnerPollaczek{1.3, 0.9}, 4, q));
}

TEST_CASE("negative mu adds discrete masses at z^2 = -(k+mu)^2") {
    const FamilyParams p = ContinuousDualHahn{-1.3, cplx(1.5), cplx(1.5)};
    const auto masses = mixed_masses(p);
    REQUIRE(masses.size() == 2);
    CHECK(masses[0].first == Approx(-1.69));
    CHECK(masses[1].first == Approx(-0.09));
    CHECK(gram_defect(generalized_orthogonality_gram(p, 5)) <= 1e-6);
}

TEST_CASE("h-poly at z = 0 is the Jacobi polynomial in cos theta") {
    const HPoly h{0.4, 1.7, 0.8, 1.1};
    for (int n = 0; n <= 12; ++n)
        CHECK(h_poly_eval(h, n, 0.0) == Approx(jacobi_eval(n, h.mu, h.nu, std::cos(h.theta))).epsilon(1e-12));
}

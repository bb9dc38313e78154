#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tra/errors.hpp"
#include "tra/quadrature.hpp"
#include "tra/specfun.hpp"

using namespace tra;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

// Equal up to a multiple of 2 pi i in the imaginary part.
bool same_log(cplx a, cplx b, double tol) {
    const double k = std::round((a.imag() - b.imag()) / (2 * kPi));
    return std::abs(a.real() - b.real()) <= tol && std::abs(a.imag() - b.imag() - 2 * kPi * k) <= tol;
}
}  // namespace

TEST_CASE("log gamma at known points") {
    CHECK(log_gamma_complex(5.0).real() == Approx(std::log(24.0)).epsilon(1e-13));
    CHECK(log_gamma_complex(0.5).real() == Approx(0.5 * std::log(kPi)).epsilon(1e-13));
    for (double x = 0.1; x < 50.0; x *= 1.37)
        CHECK(log_gamma_complex(x).real() == Approx(std::lgamma(x)).epsilon(1e-13));
    CHECK(arg_gamma(cplx(1.0, 1.0)) == Approx(-0.3016403204675331).epsilon(1e-13));
    // |Gamma(iy)|^2 = pi / (y sinh(pi y))
    const double y = 1.7;
    CHECK(2 * log_gamma_complex(cplx(0, y)).real() == Approx(std::log(kPi / (y * std::sinh(kPi * y)))).epsilon(1e-13));
}

TEST_CASE("log gamma recurrence, reflection and conjugation") {
    for (cplx z : {cplx(0.3, 0.2), cplx(2.5, -4.0), cplx(-3.7, 1.1), cplx(12.0, 30.0), cplx(-0.5, -0.01)}) {
        CHECK(same_log(log_gamma_complex(z + 1.0), log_gamma_complex(z) + std::log(z), 1e-12));
        CHECK(same_log(log_gamma_complex(z) + log_gamma_complex(1.0 - z), std::log(kPi / std::sin(kPi * z)), 1e-11));
        const cplx a = log_gamma_complex(std::conj(z)), b = std::conj(log_gamma_complex(z));
        CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(b)));
        CHECK(std::abs(arg_gamma(std::conj(z)) + arg_gamma(z)) <= 1e-14 * std::max(1.0, std::abs(arg_gamma(z))));
    }
}

TEST_CASE("log gamma rejects poles and non-finite input") {
    for (double p : {0.0, -1.0, -7.0}) CHECK_THROWS_AS(log_gamma_complex(p), ValidationError);
    CHECK_THROWS_AS(log_gamma_complex(cplx(NAN, 0)), ValidationError);
}

TEST_CASE("pochhammer") {
    CHECK(pochhammer(3.0, 4).real() == 360.0);
    CHECK(pochhammer(cplx(0.7, 2.0), 0) == cplx(1.0));
    CHECK(pochhammer(-2.0, 5).real() == 0.0);
    const cplx a(1.25, -0.6);
    for (int n = 0; n < 15; ++n)
        CHECK(std::abs(pochhammer(a, n + 1) - pochhammer(a, n) * (a + double(n))) <= 1e-13 * std::abs(pochhammer(a, n + 1)));
    CHECK(log_abs_pochhammer(3.0, 4) == Approx(std::log(360.0)).epsilon(1e-15));
    CHECK(log_abs_pochhammer(100.5, 300) == Approx(std::lgamma(400.5) - std::lgamma(100.5)).epsilon(1e-13));
}

TEST_CASE("terminating hypergeometric sums") {
    HypSeriesSpec s{{-1.0, 2.0}, {4.0}, 0.5, 1};
    CHECK(hyp_terminating(s).real() == Approx(0.75).epsilon(1e-15));
    // Chu-Vandermonde: 2F1(-n, b; c; 1) = (c-b)_n / (c)_n
    HypSeriesSpec v{{-6.0, 1.3}, {2.9}, 1.0, 6};
    CHECK(hyp_terminating(v).real() == Approx((pochhammer(1.6, 6) / pochhammer(2.9, 6)).real()).epsilon(1e-13));
    HypSeriesSpec bad{{-3.0}, {}, 1.0, 3};
    CHECK_THROWS(hyp_terminating(bad, 2));
}

TEST_CASE("classical polynomials") {
    CHECK(laguerre_eval(2, 1.0, 0.0) == Approx(3.0));
    CHECK(laguerre_eval(1, 2.5, 0.7) == Approx(1.0 + 2.5 - 0.7).epsilon(1e-15));
    CHECK(jacobi_eval(2, 1.0, 1.0, 1.0) == Approx(3.0));
    // P_n^(a,b)(-y) = (-1)^n P_n^(b,a)(y)
    CHECK(jacobi_eval(7, 0.3, 1.9, -0.42) == Approx(-jacobi_eval(7, 1.9, 0.3, 0.42)).epsilon(1e-13));
    CHECK(double(laguerre_eval_ld(9, 0.5L, 3.25L)) == Approx(laguerre_eval(9, 0.5, 3.25)).epsilon(1e-14));
}

TEST_CASE("gauss rules integrate polynomials exactly") {
    const auto gl = gauss_laguerre(20, 0.5L);
    long double s = 0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * gl.nodes[i] * gl.nodes[i];
    CHECK(double(s) == Approx(std::tgamma(3.5)).epsilon(1e-15));

    const double a = 0.4, b = -0.3;
    const auto gj = gauss_jacobi(16, a, b);
    long double m = 0;
    for (auto w : gj.weights) m += w;
    const double mass = std::pow(2.0, a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 2);
    CHECK(double(m) == Approx(mass).epsilon(1e-15));
}

TEST_CASE("double-exponential quadrature") {
    auto gauss = [](double x, double* out) { out[0] = std::exp(-x * x); out[1] = x * x * std::exp(-x * x); };
    DEOptions serial;
    serial.parallel = false;
    const DEResult r = de_integrate(gauss, 2, DEDomain::RealLine, 0, 0, serial);
    CHECK(r.converged);
    CHECK(r.value[0] == Approx(std::sqrt(kPi)).epsilon(1e-13));
    CHECK(r.value[1] == Approx(std::sqrt(kPi) / 2).epsilon(1e-13));

    DEOptions par;
    par.parallel = true;
    const DEResult q = de_integrate(gauss, 2, DEDomain::RealLine, 0, 0, par);
    CHECK(q.value == r.value);   // bitwise, the sum order is fixed

    auto half = [](double x, double* out) { out[0] = std::exp(-x) * std::sqrt(x); };
    CHECK(de_integrate(half, 1, DEDomain::HalfLine).value[0] == Approx(std::tgamma(1.5)).epsilon(1e-12));
    auto disc = [](double x, double* out) { out[0] = std::sqrt(1.0 - x * x); };
    CHECK(de_integrate(disc, 1, DEDomain::Interval, -1, 1).value[0] == Approx(kPi / 2).epsilon(1e-12));
}

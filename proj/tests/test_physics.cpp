#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tra/errors.hpp"
#include "tra/physics.hpp"

using namespace tra;
using doctest::Approx;

namespace {

std::vector<double> values(const SpectrumResult& s) {
    std::vector<double> v;
    for (const auto& p : s.energies) v.push_back(p.value);
    return v;
}

RouteOptions levels(int k) {
    RouteOptions o;
    o.kmax = k;
    return o;
}

}  // namespace

TEST_CASE("closed-form spectra") {
    const auto c = values(bound_spectrum(Coulomb{-1.0, 0, 1.0}, Route::MP, levels(3)));
    REQUIRE(c.size() == 3);
    CHECK(c[0] == -0.5);
    CHECK(c[1] == -0.125);
    CHECK(c[2] == Approx(-1.0 / 18).epsilon(1e-15));

    CHECK(values(bound_spectrum(Oscillator{1.0, 1, 1.0}, Route::MP, levels(3)))[2] == 6.5);
    CHECK(values(bound_spectrum(Morse{0.125, -1.0, 1.0}, Route::MP))[0] == Approx(-1.125).epsilon(1e-15));

    const SpectrumResult rm = bound_spectrum(RosenMorse{2.5, 60.0, 1.0}, Route::Wilson);
    REQUIRE(rm.eps.size() == 3);
    CHECK(rm.eps[0] == -6.25);
    CHECK(rm.eps[2] == -0.25);

    // Eckart levels checked against a finite-difference solve of the radial equation
    const auto e = values(bound_spectrum(Eckart{-30.0, 1.0, 1.0}, Route::Wilson, levels(5)));
    REQUIRE(e.size() >= 5);
    const double want[] = {-98.0, -36.125, -15.125, -6.125, -2.0};
    for (int k = 0; k < 5; ++k) CHECK(e[k] == Approx(want[k]).epsilon(1e-12));
}

TEST_CASE("log spectrum size rule") {
    const SpectrumResult s = bound_spectrum(LogSpectrum{-3.0, 1.0}, Route::MP);
    CHECK(s.N == 1);
    REQUIRE(s.energies.size() == 2);
    CHECK(s.energies[0].value == Approx(0.5 * std::exp(6.0)).epsilon(1e-13));
    CHECK(s.energies[1].value == Approx(0.5 * std::exp(4.0)).epsilon(1e-13));
    CHECK(log_spectrum_threshold(2) == Approx(-3.14619322062).epsilon(1e-11));
    CHECK(log_spectrum_size(-3.2) == 2);
    CHECK_THROWS_AS(bound_spectrum(LogSpectrum{0.5, 1.0}, Route::MP), ValidationError);
}

TEST_CASE("route consistency: MP and CDH give the same spectra") {
    for (int ell : {0, 1, 3}) {
        const auto a = values(bound_spectrum(Coulomb{-1.3, ell, 1.0}, Route::MP, levels(6)));
        const auto b = values(bound_spectrum(Coulomb{-1.3, ell, 1.0}, Route::CDH, levels(6)));
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == Approx(b[k]).epsilon(1e-12));
        const auto c = values(bound_spectrum(Oscillator{0.7, ell, 1.0}, Route::MP, levels(6)));
        const auto d = values(bound_spectrum(Oscillator{0.7, ell, 1.0}, Route::CDH, levels(6)));
        REQUIRE(c.size() == d.size());
        for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == Approx(d[k]).epsilon(1e-12));
    }
}

TEST_CASE("morse consistency at V0 = alpha^2/8") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> A(0.5, 2.0), V(-6.0, -0.5);
    for (int s = 0; s < 10; ++s) {
        const double alpha = A(rng);
        const Morse m{alpha * alpha / 8, V(rng), alpha};
        const auto a = values(bound_spectrum(m, Route::MP));
        const auto b = values(bound_spectrum(m, Route::CDH));
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == Approx(b[k]).epsilon(1e-12));
    }
}

TEST_CASE("bound states sit on the gamma poles") {
    const std::vector<std::pair<PotentialModel, Route>> cases = {
        {Coulomb{-1.0, 1, 1.0}, Route::MP},       {Oscillator{1.0, 0, 1.0}, Route::MP},
        {Morse{0.3, -2.0, 1.0}, Route::MP},       {Coulomb{-1.0, 1, 1.0}, Route::CDH},
        {PoschlTeller{-12.0, 1.0, 1.0}, Route::Wilson}, {Eckart{-30.0, 1.0, 1.0}, Route::Wilson},
    };
    for (const auto& [m, r] : cases)
        for (int k = 0; k < 2; ++k) CHECK(pole_condition_residual(m, r, k) <= 1e-12);
}

TEST_CASE("coulomb phase shift") {
    CHECK(phase_shift(Coulomb{-1.0, 0, 1.0}, Route::MP, 0.5).phase == Approx(-0.3016403204675331).epsilon(1e-12));
    CHECK(phase_shift(Coulomb{1.0, 0, 1.0}, Route::MP, 0.5).phase == Approx(0.3016403204675331).epsilon(1e-12));
    CHECK(std::abs(phase_shift(Coulomb{-1e-12, 0, 1.0}, Route::MP, 0.5).phase) <= 1e-11);
    CHECK_THROWS_AS(phase_shift(Coulomb{-1.0, 0, 1.0}, Route::MP, -0.5), ValidationError);
}

TEST_CASE("route and parameter checks") {
    CHECK_THROWS_AS(check_route(Eckart{}, Route::MP), ValidationError);
    CHECK_THROWS_AS(check_route(Coulomb{}, Route::Wilson), ValidationError);
    CHECK_THROWS_AS(bound_spectrum(Morse{0.1, -1.0, 1.0}, Route::MP), ValidationError);
    CHECK_NOTHROW(bound_spectrum(Morse{0.1, -1.0, 1.0}, Route::CDH));
    CHECK(default_route(Coulomb{}) == Route::MP);
    CHECK(default_route(RosenMorse{}) == Route::Wilson);
    CHECK(parse_route("cdh") == Route::CDH);
}

TEST_CASE("basis values") {
    // n = 0, l = 0 Coulomb basis: (lambda r) e^{-lambda r / 2} / sqrt(Gamma(2))
    for (double r : {0.2, 1.3, 4.0}) CHECK(basis_eval(Coulomb{-1.0, 0, 1.0}, Route::MP, 0, r) == Approx(r * std::exp(-r / 2)));
    CHECK(basis_eval(Coulomb{-1.0, 0, 1.0}, Route::MP, 3, 0.0) == 0.0);
    CHECK(std::abs(basis_eval(PoschlTeller{-12.0, 1.0, 1.0}, Route::Wilson, 2, 0.0)) == 0.0);
}

TEST_CASE("matrix assembly") {
    const MatrixPair one = hamiltonian_matrix(Coulomb{-1.0, 0, 1.0}, Route::MP, 1);
    CHECK(one.H.rows() == 1);
    CHECK(one.S(0, 0) == Approx(1.0));

    AssemblyOptions serial;
    serial.parallel = false;
    const MatrixPair a = hamiltonian_matrix(Oscillator{1.0, 0, 1.3}, Route::MP, 12, {}, serial);
    const MatrixPair b = hamiltonian_matrix(Oscillator{1.0, 0, 1.3}, Route::MP, 12);
    CHECK((a.H - b.H).norm() == 0.0);
    CHECK((a.H - a.H.transpose()).norm() == 0.0);
    // The oscillator overlap is tridiagonal.
    for (int i = 0; i < 12; ++i)
        for (int j = i + 2; j < 12; ++j) CHECK(std::abs(a.S(i, j)) <= 1e-10);
}

TEST_CASE("tridiagonality audit") {
    CHECK(tridiagonality_defect(Coulomb{-1.0, 0, 1.0}, Route::MP, 30).defect <= 1e-8);
    Table1Entry row5;
    row5.row = 5;
    CHECK(tridiagonality_defect(row5, Route::Wilson, 20).defect <= 1e-7);
    const BasisSpec bad = perturbed_basis(basis_spec(Coulomb{-1.0, 0, 1.0}, Route::MP));
    CHECK(tridiagonality_defect(bad, 20).defect >= 1e-2);
    CHECK(audit_catalog().size() >= 14);
}

TEST_CASE("eigen-oracle: oscillator basis is exact") {
    const OracleResult r = eigen_oracle_spectrum(Oscillator{1.0, 0, 1.3}, Route::MP, 100, 5, levels(5));
    const auto exact = values(bound_spectrum(Oscillator{1.0, 0, 1.3}, Route::MP, levels(5)));
    REQUIRE(r.levels.size() == 5);
    for (int k = 0; k < 5; ++k) CHECK(r.levels[k].value == Approx(exact[k]).epsilon(1e-8));
}

TEST_CASE("poschl-teller: the level count matches the negative Ritz values") {
    for (const PoschlTeller pt : {PoschlTeller{-12.0, 1.0, 1.0}, PoschlTeller{-30.0, 2.0, 1.0},
                                  PoschlTeller{-45.0, 1.0, 1.0}}) {
        const int N = bound_spectrum(pt, Route::Wilson).N;
        const MatrixPair mp = hamiltonian_matrix(pt, Route::Wilson, 80);
        const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(mp.H, mp.S);
        CHECK((es.eigenvalues().array() < 0.0).count() == N + 1);
    }
}

TEST_CASE("wavefunctions") {
    const Coulomb h{-1.0, 0, 1.0};
    std::vector<double> x;
    for (int i = 1; i <= 40; ++i) x.push_back(0.25 * i);

    const WavefunctionSample g = reconstruct_wavefunction(h, Route::MP, "k=0", x, 80);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double want = 2.0 * x[i] * std::exp(-x[i]);
        diff += std::pow(g.values[i] - want, 2);
        norm += want * want;
    }
    CHECK(std::sqrt(diff / norm) <= 1e-4);

    // 2s: r (1 - r/2) e^{-r/2} / sqrt(2)
    const WavefunctionSample s2 = reconstruct_wavefunction(h, Route::MP, "k=1", x, 80);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(s2.values[i] == Approx(x[i] * (1 - x[i] / 2) * std::exp(-x[i] / 2) / std::sqrt(2.0)).epsilon(1e-8));

    const WavefunctionSample o0 = reconstruct_wavefunction(Oscillator{1.0, 0, 1.3}, Route::MP, "k=0", x, 80);
    // 2 pi^{-1/4} r e^{-r^2/2} for omega = 1, l = 0
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(o0.values[i] == Approx(2.0 * std::pow(std::numbers::pi, -0.25) * x[i] * std::exp(-x[i] * x[i] / 2))
                                  .epsilon(1e-8));

    const WavefunctionSample e40 = reconstruct_wavefunction(h, Route::MP, "E=0.5", x, 40);
    const WavefunctionSample e80 = reconstruct_wavefunction(h, Route::MP, "E=0.5", x, 80);
    CHECK(e80.tailEstimate < e40.tailEstimate);

    CHECK_THROWS_AS(reconstruct_wavefunction(h, Route::MP, "k=x", x, 10), ValidationError);
}

#include "tra/specfun.hpp"

#include <cmath>
#include <numbers>

#include "tra/errors.hpp"

namespace tra {

namespace {

// B_{2k} / (2k(2k-1)) for k = 1..12
constexpr double kStirling[] = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
};

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx stirling(cplx w) {
    const cplx inv = 1.0 / w;
    const cplx inv2 = inv * inv;
    cplx series = 0.0;
    cplx p = inv;
    for (double c : kStirling) {
        series += c * p;
        p *= inv2;
    }
    return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

struct qc {
    __float128 re, im;
};
qc operator+(qc a, qc b) { return {a.re + b.re, a.im + b.im}; }
qc operator*(qc a, qc b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
qc operator/(qc a, qc b) {
    const __float128 d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

template <class T>
T jacobi_impl(int n, T s, T t, T y) {
    if (n == 0) return T(1);
    T pm1 = T(1);
    T p = ((s + t + 2) * y + (s - t)) / 2;
    for (int k = 1; k < n; ++k) {
        const T c = 2 * k + s + t;
        const T a1 = 2 * (k + 1) * (k + s + t + 1) * c;
        const T a2 = (c + 1) * (s * s - t * t);
        const T a3 = c * (c + 1) * (c + 2);
        const T a4 = 2 * (k + s) * (k + t) * (c + 2);
        const T next = ((a2 + a3 * y) * p - a4 * pm1) / a1;
        pm1 = p;
        p = next;
    }
    return p;
}

template <class T>
T laguerre_impl(int n, T nu, T x) {
    if (n == 0) return T(1);
    T pm1 = T(1);
    T p = 1 + nu - x;
    for (int k = 1; k < n; ++k) {
        const T next = ((2 * k + 1 + nu - x) * p - (k + nu) * pm1) / (k + 1);
        pm1 = p;
        p = next;
    }
    return p;
}

}  // namespace

cplx log_gamma_complex(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ValidationError("domain", "log_gamma_complex: non-finite argument");
    if (is_nonpositive_integer(z))
        throw ValidationError("pole", "log_gamma_complex: pole at non-positive integer");
    if (z.imag() == 0.0) z = cplx(z.real(), 0.0);  // drop a signed zero

    // Shift up with lnG(z) = lnG(z+m) - sum log(z+k); the principal logs keep
    // the branch cut on the negative real axis, so no reflection is needed.
    cplx shift = 0.0;
    cplx w = z;
    while (w.real() < 0.0 || std::abs(w) < 12.0) {
        shift += std::log(w);
        w += 1.0;
    }
    return stirling(w) - shift;
}

double arg_gamma(cplx z) { return log_gamma_complex(z).imag(); }

cplx pochhammer(cplx a, int n) {
    if (n < 0) throw ValidationError("domain", "pochhammer: negative n");
    if (n == 0) return 1.0;
    const bool negint = is_nonpositive_integer(a);
    if (negint && n > -a.real()) return 0.0;
    if (n <= 64 || negint) {
        std::complex<long double> p = 1.0L;
        for (int k = 0; k < n; ++k)
            p *= std::complex<long double>(a.real() + k, a.imag());
        return cplx(double(p.real()), double(p.imag()));
    }
    if (is_nonpositive_integer(a + double(n)))
        throw ValidationError("pole", "pochhammer: a+n at a pole");
    return std::exp(log_gamma_complex(a + double(n)) - log_gamma_complex(a));
}

double log_abs_pochhammer(double a, int n) {
    double s = 0.0;
    if (n <= 64) {
        for (int k = 0; k < n; ++k) s += std::log(std::abs(a + k));
        return s;
    }
    return std::real(log_gamma_complex(a + n)) - std::real(log_gamma_complex(a));
}

cplx hyp_terminating(const HypSeriesSpec& spec, int degreeCap) {
    const int n = spec.terminationIndex;
    if (n < 0) throw ValidationError("domain", "hyp_terminating: negative termination index");
    if (n > degreeCap) throw ValidationError("degree_cap", "hyp_terminating: degree above cap");
    bool found = false;
    for (const cplx& u : spec.upper)
        if (std::abs(u + double(n)) <= 1e-12 * (1.0 + n)) found = true;
    if (!found)
        throw ValidationError("domain", "hyp_terminating: no upper parameter equals -n");

    // Quad precision: terms of the 2F1/4F3 sums can exceed the result by
    // many orders of magnitude.
    const qc x{spec.argument.real(), spec.argument.imag()};
    qc term{1, 0};
    qc sum{1, 0};
    for (int j = 0; j < n; ++j) {
        qc num{1, 0}, den{1, 0};
        for (const cplx& u : spec.upper) num = num * qc{__float128(u.real()) + j, u.imag()};
        for (const cplx& l : spec.lower) {
            const qc d{__float128(l.real()) + j, l.imag()};
            if (d.re == 0 && d.im == 0)
                throw ValidationError("zero_denominator", "hyp_terminating: lower Pochhammer vanishes");
            den = den * d;
        }
        term = term * (num / den) * x;
        term.re /= (j + 1);
        term.im /= (j + 1);
        sum = sum + term;
    }
    return cplx(double(sum.re), double(sum.im));
}

double laguerre_eval(int n, double nu, double x) { return laguerre_impl<double>(n, nu, x); }
long double laguerre_eval_ld(int n, long double nu, long double x) {
    return laguerre_impl<long double>(n, nu, x);
}

double jacobi_eval(int n, double sigma, double tau, double y) {
    return jacobi_impl<double>(n, sigma, tau, y);
}
long double jacobi_eval_ld(int n, long double sigma, long double tau, long double y) {
    return jacobi_impl<long double>(n, sigma, tau, y);
}

}  // namespace tra

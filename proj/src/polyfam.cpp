#include "tra/polyfam.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "tra/errors.hpp"
#include "tra/quadrature.hpp"

namespace tra {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

[[noreturn]] void range_error(const std::string& what) {
    throw ValidationError("parameter_range", what);
}

bool conj_pair_or_real(cplx a, cplx b) {
    const double tol = 1e-12 * (1.0 + std::abs(a) + std::abs(b));
    if (std::abs(a.imag()) <= tol && std::abs(b.imag()) <= tol) return true;
    return std::abs(a - std::conj(b)) <= tol;
}

// Parameters of a Wilson tuple must be real or appear in conjugate pairs.
bool closed_under_conj(const std::vector<cplx>& v) {
    const double tol = 1e-12;
    std::vector<bool> used(v.size(), false);
    for (size_t i = 0; i < v.size(); ++i) {
        if (used[i]) continue;
        if (std::abs(v[i].imag()) <= tol * (1.0 + std::abs(v[i]))) {
            used[i] = true;
            continue;
        }
        bool found = false;
        for (size_t j = i + 1; j < v.size(); ++j)
            if (!used[j] && std::abs(v[j] - std::conj(v[i])) <= tol * (1.0 + std::abs(v[i]))) {
                used[i] = used[j] = true;
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

// prod_{j<n} prod(num+j) / prod(den+j), in complex long double.
std::complex<long double> poch_ratio(std::initializer_list<cplx> num, std::initializer_list<cplx> den,
                                     int n) {
    using lc = std::complex<long double>;
    lc r = 1.0L;
    for (int j = 0; j < n; ++j) {
        lc a = 1.0L, b = 1.0L;
        for (const cplx& u : num) a *= lc(u.real() + j, u.imag());
        for (const cplx& l : den) b *= lc(l.real() + j, l.imag());
        r *= a / b;
    }
    return r;
}

double checked_sqrt(std::complex<long double> v, const char* who) {
    const long double re = v.real();
    if (re < 0.0L) {
        if (re > -1e-13L * (1.0L + std::abs(v))) return 0.0;
        throw ValidationError("domain", std::string(who) + ": negative normalization");
    }
    return double(std::sqrt(re));
}

double lgam(double x) { return std::real(log_gamma_complex(x)); }

// Real part of sum of log Gamma; the sign is lost, callers ensure positivity.
double sum_lgam(std::initializer_list<cplx> args) {
    cplx s = 0.0;
    for (const cplx& a : args) s += log_gamma_complex(a);
    return s.real();
}

cplx sqrt_arg(double z2) { return std::sqrt(cplx(z2, 0.0)); }  // z from z^2; z = i s when z^2 < 0

}  // namespace

std::string family_name(const FamilyParams& p) {
    return std::visit(overloaded{
                          [](const MeixnerPollaczek&) { return std::string("meixner-pollaczek"); },
                          [](const Meixner&) { return std::string("meixner"); },
                          [](const Krawtchouk&) { return std::string("krawtchouk"); },
                          [](const ContinuousDualHahn&) { return std::string("continuous-dual-hahn"); },
                          [](const DualHahn&) { return std::string("dual-hahn"); },
                          [](const Wilson&) { return std::string("wilson"); },
                          [](const Racah&) { return std::string("racah"); },
                          [](const HPoly&) { return std::string("h-poly"); },
                      },
                      p.v);
}

bool is_continuous(const FamilyParams& p) {
    return std::holds_alternative<MeixnerPollaczek>(p.v) ||
           std::holds_alternative<ContinuousDualHahn>(p.v) || std::holds_alternative<Wilson>(p.v);
}

bool is_discrete(const FamilyParams& p) {
    return std::holds_alternative<Meixner>(p.v) || std::holds_alternative<Krawtchouk>(p.v) ||
           std::holds_alternative<DualHahn>(p.v) || std::holds_alternative<Racah>(p.v);
}

std::optional<int> finite_size(const FamilyParams& p) {
    if (auto* k = std::get_if<Krawtchouk>(&p.v)) return k->N + 1;
    if (auto* d = std::get_if<DualHahn>(&p.v)) return d->N + 1;
    if (auto* r = std::get_if<Racah>(&p.v)) return r->N + 1;
    return std::nullopt;
}

namespace {

template <class T = long double>
T racah_A(const Racah& r, int n) {
    const T a = r.alpha, b = r.beta, g = r.gamma, d = -T(r.N) - b - 1;
    return (n + a + 1) * (n + a + b + 1) * (n + b + d + 1) * (n + g + 1) /
           ((2 * n + a + b + 1) * (2 * n + a + b + 2));
}

template <class T = long double>
T racah_C(const Racah& r, int n) {
    if (n == 0) return T(0);
    const T a = r.alpha, b = r.beta, g = r.gamma, d = -T(r.N) - b - 1;
    return n * (n + a + b - g) * (n + a - d) * (n + b) / ((2 * n + a + b) * (2 * n + a + b + 1));
}

// Forward recursion for the finite families in quad precision. At the edges of
// the support P_n(k) can be a minimal solution, and the long double recursion
// then loses up to 8 digits against the closed form by n = 20.
using Q = __float128;

Q qsqrt(Q v) {
    if (!(v > 0)) return 0;
    const Q r = std::sqrt((long double)v);
    return (r + v / r) / 2;   // one Newton step from a 64-bit start
}

std::optional<std::vector<long double>> finite_recursion_q(const FamilyParams& p, int nmax, long double arg) {
    struct Step {
        Q diag, up;
    };
    Q x;
    std::function<Step(int)> step;
    if (auto* f = std::get_if<Krawtchouk>(&p.v)) {
        const Q g = f->gamma, N = f->N;
        x = arg;
        step = [=](int n) { return Step{N * g + n * (1 - 2 * g), -qsqrt((n + 1) * (N - n) * g * (1 - g))}; };
    } else if (auto* f = std::get_if<DualHahn>(&p.v)) {
        const Q al = f->alpha, be = f->beta, N = f->N, s = al + be + 1, t = Q(arg) + s / 2;
        x = t * t;
        step = [=](int n) {
            return Step{(n + al + 1) * (N - n) + n * (N + be + 1 - n) + s * s / 4,
                        -qsqrt((n + 1) * (n + al + 1) * (N - n) * (N - n + be))};
        };
    } else if (auto* f = std::get_if<Racah>(&p.v)) {
        const Racah r = *f;
        const Q c = Q(r.gamma) - r.N - Q(r.beta), t = Q(arg) + c / 2;
        x = t * t;
        step = [=](int n) {
            const Q a = racah_A<Q>(r, n), v = qsqrt(a * racah_C<Q>(r, n + 1));
            return Step{-(a + racah_C<Q>(r, n)) + c * c / 4, a < 0 ? -v : v};
        };
    } else {
        return std::nullopt;
    }
    std::vector<long double> out(nmax + 1);
    out[0] = 1.0L;
    Q pm = 0, pc = 1, prevUp = 0;
    for (int n = 0; n < nmax; ++n) {
        const Step s = step(n);
        const Q next = ((x - s.diag) * pc - prevUp * pm) / s.up;
        prevUp = s.up;
        pm = pc;
        pc = next;
        out[n + 1] = (long double)pc;
    }
    return out;
}

// Normalized Racah weight as a real product.
long double racah_weight(const Racah& r, int k) {
    const long double N = r.N, a = r.alpha, b = r.beta, g = r.gamma;
    auto poch = [](long double x, int n) {
        long double p = 1.0L;
        for (int j = 0; j < n; ++j) p *= x + j;
        return p;
    };
    const long double c0 = poch(-b - N, r.N) * poch(g - a - b - N, r.N) /
                           (poch(-a - b - N - 1, r.N) * poch(g - b - N + 1, r.N));
    long double fact = 1.0L;
    for (int j = 1; j <= k; ++j) fact *= j;
    return c0 * (2 * k + g - b - N) / (k + g - b - N) * poch(-N, k) * poch(a + 1, k) * poch(g + 1, k) *
           poch(g - b - N + 1, k) / (poch(-b - N, k) * poch(g - b + 1, k) * poch(g - a - b - N, k) * fact);
}

}  // namespace

void validate(const FamilyParams& p) {
    if (p.unchecked) return;
    std::visit(overloaded{
                   [](const MeixnerPollaczek& f) {
                       if (!(f.mu > 0.0)) range_error("meixner-pollaczek: mu must be > 0");
                       if (!(f.theta > 0.0 && f.theta < kPi)) range_error("meixner-pollaczek: theta must lie in (0, pi)");
                   },
                   [](const Meixner& f) {
                       if (!(f.mu > 0.0)) range_error("meixner: mu must be > 0");
                       if (!(f.beta > 0.0 && f.beta < 1.0)) range_error("meixner: beta must lie in (0, 1)");
                   },
                   [](const Krawtchouk& f) {
                       if (f.N < 0) range_error("krawtchouk: N must be >= 0");
                       if (!(f.gamma > 0.0 && f.gamma < 1.0)) range_error("krawtchouk: gamma must lie in (0, 1)");
                   },
                   [](const ContinuousDualHahn& f) {
                       if (!conj_pair_or_real(f.a, f.b)) range_error("continuous-dual-hahn: a, b must be real or a conjugate pair");
                       if (!((f.mu + f.a).real() > 0.0 && (f.mu + f.b).real() > 0.0 && (f.a + f.b).real() > 0.0))
                           range_error("continuous-dual-hahn: Re(mu+a), Re(mu+b), Re(a+b) must be > 0");
                       if (f.mu < 0.0 && !(f.a.real() > 0.0 && f.b.real() > 0.0))
                           range_error("continuous-dual-hahn: mixed regime needs Re(a), Re(b) > 0");
                   },
                   [](const DualHahn& f) {
                       if (f.N < 0) range_error("dual-hahn: N must be >= 0");
                       const bool above = f.alpha > -1.0 && f.beta > -1.0;
                       const bool below = f.alpha < -f.N && f.beta < -f.N;
                       if (!above && !below) range_error("dual-hahn: need alpha, beta > -1 or alpha, beta < -N");
                   },
                   [](const Wilson& f) {
                       if (!closed_under_conj({f.mu, f.nu, f.a, f.b}))
                           range_error("wilson: parameters must be real or in conjugate pairs");
                       for (cplx s : {f.nu, f.a, f.b})
                           if (!((f.mu + s).real() > 0.0)) range_error("wilson: Re(mu+nu), Re(mu+a), Re(mu+b) must be > 0");
                       for (cplx s : {f.nu, f.a, f.b})
                           if (!(s.real() > 0.0)) range_error("wilson: Re(nu), Re(a), Re(b) must be > 0");
                       if (f.mu.real() < 0.0 && std::abs(f.mu.imag()) > 0.0)
                           range_error("wilson: negative mu must be real");
                   },
                   [](const Racah& f) {
                       if (f.N < 0) range_error("racah: N must be >= 0");
                       for (int k = 0; k <= f.N; ++k) {
                           const long double w = racah_weight(f, k);
                           if (!(w > 0.0L) || !std::isfinite(double(w))) range_error("racah: weights must be positive");
                       }
                       for (int n = 0; n < f.N; ++n)
                           if (!(racah_A(f, n) * racah_C(f, n + 1) > 0.0)) range_error("racah: recursion radicand must be positive");
                   },
                   [](const HPoly& f) {
                       if (!(f.mu > -1.0 && f.nu > -1.0)) range_error("h-poly: mu, nu must be > -1");
                       if (!(f.theta >= 0.0 && f.theta <= kPi)) range_error("h-poly: theta must lie in [0, pi]");
                   },
               },
               p.v);
}

RecurrenceCoefficients::RecurrenceCoefficients(FamilyParams p) : p_(std::move(p)) {
    validate(p_);
    map_ = std::visit(overloaded{
                          [](const MeixnerPollaczek&) { return std::string("z*sin(theta)"); },
                          [](const Meixner&) { return std::string("(beta-1)*k"); },
                          [](const Krawtchouk&) { return std::string("k"); },
                          [](const ContinuousDualHahn&) { return std::string("z^2"); },
                          [](const DualHahn&) { return std::string("(k+(alpha+beta+1)/2)^2"); },
                          [](const Wilson&) { return std::string("z^2"); },
                          [](const Racah&) { return std::string("(k+(gamma-beta-N)/2)^2"); },
                          [](const HPoly&) { return std::string("z"); },
                      },
                      p_.v);
}

bool RecurrenceCoefficients::symmetric() const { return !std::holds_alternative<HPoly>(p_.v); }

namespace {

using L = long double;
using LC = std::complex<long double>;

LC lc(cplx z) { return LC(z.real(), z.imag()); }

// H_n pieces of the recursion: cos(theta) H_n = (z c_n + e_n) H_n + s_n H_{n-1} + u_n H_{n+1}.
struct HParts {
    L c, e, s, u;
};

HParts h_parts(const HPoly& f, int n) {
    const L m = f.mu, v = f.nu, q = n + 0.5L * (m + v + 1.0L);
    HParts h;
    h.c = std::sin(L(f.theta)) * (q * q + f.alpha);
    if (n == 0) {
        h.e = (v - m) / (m + v + 2.0L);
        h.s = 0.0L;
        h.u = 2.0L / (m + v + 2.0L);
    } else {
        const L t = 2.0L * n + m + v;
        h.e = (v * v - m * m) / (t * (t + 2.0L));
        h.s = 2.0L * (n + m) * (n + v) / (t * (t + 1.0L));
        h.u = 2.0L * (n + 1.0L) * (n + m + v + 1.0L) / ((t + 1.0L) * (t + 2.0L));
    }
    return h;
}

L h_c_checked(const HPoly& f, int n) {
    const L c = h_parts(f, n).c;
    if (c == 0.0L) throw ValidationError("domain", "h-poly: z-coefficient vanishes; use h_poly_eval");
    return c;
}

L neg_sqrt(L v) { return -std::sqrt(std::max(L(0), v)); }

}  // namespace

long double RecurrenceCoefficients::diag_ld(int n) const {
    const L dn = n;
    return std::visit(
        overloaded{
            [dn](const MeixnerPollaczek& f) { return -(dn + f.mu) * std::cos(L(f.theta)); },
            [dn](const Meixner& f) { return -(dn * (1.0L + f.beta) + 2.0L * f.mu * f.beta); },
            [dn](const Krawtchouk& f) { return f.N * L(f.gamma) + dn * (1.0L - 2.0L * f.gamma); },
            [dn](const ContinuousDualHahn& f) {
                const LC m = f.mu, a = lc(f.a), b = lc(f.b);
                return ((dn + m + a) * (dn + m + b) + dn * (dn + a + b - 1.0L) - m * m).real();
            },
            [dn](const DualHahn& f) {
                const L al = f.alpha, be = f.beta, s = al + be + 1.0L;
                return (dn + al + 1.0L) * (f.N - dn) + dn * (f.N + be + 1.0L - dn) + 0.25L * s * s;
            },
            [dn](const Wilson& f) {
                const LC m = lc(f.mu), v = lc(f.nu), a = lc(f.a), b = lc(f.b), s = m + v + a + b;
                LC r = (dn + m + v) * (dn + m + a) * (dn + m + b) * (dn + s - 1.0L) /
                       ((2.0L * dn + s) * (2.0L * dn + s - 1.0L));
                if (dn > 0)
                    r += dn * (dn + v + a - 1.0L) * (dn + v + b - 1.0L) * (dn + a + b - 1.0L) /
                         ((2.0L * dn + s - 1.0L) * (2.0L * dn + s - 2.0L));
                return (r - m * m).real();
            },
            [n](const Racah& f) {
                const L c = f.gamma - f.N - L(f.beta);
                return -(racah_A(f, n) + racah_C(f, n)) + 0.25L * c * c;
            },
            [n](const HPoly& f) {
                const HParts h = h_parts(f, n);
                return (std::cos(L(f.theta)) - h.e) / h_c_checked(f, n);
            },
        },
        p_.v);
}

long double RecurrenceCoefficients::upper_ld(int n) const {
    const L dn = n;
    return std::visit(
        overloaded{
            [dn](const MeixnerPollaczek& f) { return 0.5L * std::sqrt((dn + 1.0L) * (dn + 2.0L * f.mu)); },
            [dn](const Meixner& f) { return std::sqrt((dn + 1.0L) * (dn + 2.0L * f.mu) * f.beta); },
            [dn](const Krawtchouk& f) {
                return neg_sqrt((dn + 1.0L) * (f.N - dn) * f.gamma * (1.0L - f.gamma));
            },
            [dn](const ContinuousDualHahn& f) {
                const LC m = f.mu, a = lc(f.a), b = lc(f.b);
                return neg_sqrt(((dn + 1.0L) * (dn + a + b) * (dn + m + a) * (dn + m + b)).real());
            },
            [dn](const DualHahn& f) {
                return neg_sqrt((dn + 1.0L) * (dn + f.alpha + 1.0L) * (f.N - dn) * (f.N - dn + f.beta));
            },
            [dn](const Wilson& f) {
                const LC m = lc(f.mu), v = lc(f.nu), a = lc(f.a), b = lc(f.b), s = m + v + a + b;
                const LC num = (dn + 1.0L) * (dn + m + v) * (dn + a + b) * (dn + m + a) * (dn + m + b) *
                               (dn + v + a) * (dn + v + b) * (dn + s - 1.0L);
                const LC den = (2.0L * dn + s - 1.0L) * (2.0L * dn + s + 1.0L);
                return neg_sqrt((num / den).real()) / (2.0L * dn + s).real();
            },
            [n](const Racah& f) {
                const L a = racah_A(f, n);
                const L v = std::sqrt(std::max(L(0), a * racah_C(f, n + 1)));
                return a < 0.0L ? -v : v;
            },
            [n](const HPoly& f) { return -h_parts(f, n).u / h_c_checked(f, n); },
        },
        p_.v);
}

long double RecurrenceCoefficients::lower_ld(int n) const {
    if (n == 0) return 0.0L;
    if (auto* h = std::get_if<HPoly>(&p_.v)) return -h_parts(*h, n).s / h_c_checked(*h, n);
    return upper_ld(n - 1);
}

long double RecurrenceCoefficients::lhs(long double arg) const {
    return std::visit(overloaded{
                          [arg](const MeixnerPollaczek& f) { return arg * std::sin(L(f.theta)); },
                          [arg](const Meixner& f) { return (f.beta - 1.0L) * arg; },
                          [arg](const Krawtchouk&) { return arg; },
                          [arg](const ContinuousDualHahn&) { return arg; },
                          [arg](const DualHahn& f) {
                              const L t = arg + 0.5L * (f.alpha + L(f.beta) + 1.0L);
                              return t * t;
                          },
                          [arg](const Wilson&) { return arg; },
                          [arg](const Racah& f) {
                              const L t = arg + 0.5L * (f.gamma - L(f.beta) - f.N);
                              return t * t;
                          },
                          [arg](const HPoly&) { return arg; },
                      },
                      p_.v);
}

RecurrenceCoefficients recurrence_coeffs(const FamilyParams& p) { return RecurrenceCoefficients(p); }

std::vector<long double> poly_eval_all_ld(const FamilyParams& p, int nmax, long double arg) {
    if (nmax < 0) throw ValidationError("domain", "negative degree");
    if (auto sz = finite_size(p); sz && nmax > *sz - 1)
        throw ValidationError("degree_out_of_range", family_name(p) + ": degree exceeds N");
    if (auto* h = std::get_if<HPoly>(&p.v)) {
        validate(p);
        std::vector<long double> out(nmax + 1);
        for (int n = 0; n <= nmax; ++n) out[n] = h_poly_eval(*h, n, double(arg));
        return out;
    }
    if (auto q = finite_recursion_q(p, nmax, arg)) return *q;
    const RecurrenceCoefficients rc(p);
    const long double x = rc.lhs(arg);
    std::vector<long double> out(nmax + 1);
    out[0] = 1.0L;
    long double pm = 0.0L, pc = 1.0L;
    for (int n = 0; n < nmax; ++n) {
        const long double next = ((x - rc.diag_ld(n)) * pc - rc.lower_ld(n) * pm) / rc.upper_ld(n);
        pm = pc;
        pc = next;
        out[n + 1] = pc;
    }
    return out;
}

std::vector<double> poly_eval_all(const FamilyParams& p, int nmax, double arg) {
    const auto v = poly_eval_all_ld(p, nmax, arg);
    return std::vector<double>(v.begin(), v.end());
}

double poly_eval_recursion(const FamilyParams& p, int n, double arg) {
    return double(poly_eval_all_ld(p, n, arg).back());
}

std::pair<int, double> poly_eval_log(const FamilyParams& p, int n, double arg) {
    if (auto sz = finite_size(p); sz && n > *sz - 1)
        throw ValidationError("degree_out_of_range", family_name(p) + ": degree exceeds N");
    const RecurrenceCoefficients rc(p);
    if (!rc.symmetric()) {
        const double v = h_poly_eval(std::get<HPoly>(p.v), n, arg);
        return {v < 0 ? -1 : 1, std::log(std::abs(v))};
    }
    const long double x = rc.lhs(arg);
    long double pm = 0.0L, pc = 1.0L, logscale = 0.0L;
    for (int k = 0; k < n; ++k) {
        long double next = ((x - rc.diag_ld(k)) * pc - rc.lower_ld(k) * pm) / rc.upper_ld(k);
        pm = pc;
        pc = next;
        const long double a = std::abs(pc);
        if (a > 1e300L || (a < 1e-300L && a > 0.0L)) {
            const long double l = std::log(a);
            pc /= a;
            pm /= a;
            logscale += l;
        }
    }
    const int s = pc < 0 ? -1 : 1;
    return {s, double(logscale + std::log(std::abs(pc)))};
}

double h_poly_eval(const HPoly& f, int n, double z) {
    validate(FamilyParams(f));
    if (n < 0) throw ValidationError("domain", "negative degree");
    const double ct = std::cos(f.theta);
    long double hm = 0.0L, hc = 1.0L;
    for (int k = 0; k < n; ++k) {
        const HParts h = h_parts(f, k);
        const long double d = z * h.c + h.e;
        const long double next = ((ct - d) * hc - h.s * hm) / h.u;
        hm = hc;
        hc = next;
    }
    return double(hc);
}

double poly_eval_closed(const FamilyParams& p, int n, double arg) {
    validate(p);
    if (n < 0) throw ValidationError("domain", "negative degree");
    if (auto sz = finite_size(p); sz && n > *sz - 1)
        throw ValidationError("degree_out_of_range", family_name(p) + ": degree exceeds N");
    const cplx I(0.0, 1.0);
    return std::visit(
        overloaded{
            [&](const MeixnerPollaczek& f) {
                const double pref = std::exp(0.5 * (log_abs_pochhammer(2.0 * f.mu, n) - lgam(n + 1.0)));
                HypSeriesSpec s{{-double(n), f.mu + I * arg}, {2.0 * f.mu}, 1.0 - std::exp(-2.0 * I * f.theta), n};
                return pref * (std::exp(I * (n * f.theta)) * hyp_terminating(s)).real();
            },
            [&](const Meixner& f) {
                const double lp = 0.5 * (log_abs_pochhammer(2.0 * f.mu, n) - lgam(n + 1.0)) +
                                  0.5 * n * std::log(f.beta);
                HypSeriesSpec s{{-double(n), -arg}, {2.0 * f.mu}, 1.0 - 1.0 / f.beta, n};
                return std::exp(lp) * hyp_terminating(s).real();
            },
            [&](const Krawtchouk& f) {
                const double lp = 0.5 * (lgam(f.N + 1.0) - lgam(n + 1.0) - lgam(f.N - n + 1.0)) +
                                  0.5 * n * std::log(f.gamma / (1.0 - f.gamma));
                HypSeriesSpec s{{-double(n), -arg}, {-double(f.N)}, 1.0 / f.gamma, n};
                return std::exp(lp) * hyp_terminating(s).real();
            },
            [&](const ContinuousDualHahn& f) {
                const double pref = checked_sqrt(
                    poch_ratio({f.mu + f.a, f.mu + f.b}, {1.0, f.a + f.b}, n), "continuous-dual-hahn");
                const cplx z = sqrt_arg(arg);
                HypSeriesSpec s{{-double(n), f.mu + I * z, f.mu - I * z}, {f.mu + f.a, f.mu + f.b}, 1.0, n};
                return pref * hyp_terminating(s).real();
            },
            [&](const DualHahn& f) {
                const double pref = checked_sqrt(
                    poch_ratio({f.alpha + 1.0}, {1.0}, n) *
                        poch_ratio({double(f.N - n + 1)}, {f.N + f.beta - n + 1.0}, n),
                    "dual-hahn");
                HypSeriesSpec s{{-double(n), -arg, arg + f.alpha + f.beta + 1.0}, {f.alpha + 1.0, -double(f.N)}, 1.0, n};
                return pref * hyp_terminating(s).real();
            },
            [&](const Wilson& f) {
                const cplx sp = f.mu + f.nu + f.a + f.b;
                std::complex<long double> r =
                    poch_ratio({f.mu + f.a, f.mu + f.b, f.mu + f.nu, sp}, {f.nu + f.a, f.nu + f.b, f.a + f.b, 1.0}, n);
                if (n > 0) {
                    const cplx q = (2.0 * n + sp - 1.0) / (double(n) + sp - 1.0);
                    r *= std::complex<long double>(q.real(), q.imag());
                }
                const double pref = checked_sqrt(r, "wilson");
                const cplx z = sqrt_arg(arg);
                HypSeriesSpec s{{-double(n), double(n) + sp - 1.0, f.mu + I * z, f.mu - I * z},
                                {f.mu + f.nu, f.mu + f.a, f.mu + f.b},
                                1.0,
                                n};
                return pref * hyp_terminating(s).real();
            },
            [&](const Racah& f) {
                const double a = f.alpha, b = f.beta, g = f.gamma;
                const double N = f.N;
                std::complex<long double> r =
                    poch_ratio({-N, a + 1.0, g + 1.0, a + b + 2.0}, {b + 1.0, a + b - g + 1.0, a + b + N + 2.0, 1.0}, n);
                if (n > 0) r *= (2.0L * n + a + b + 1.0L) / (n + a + b + 1.0L);
                const double pref = checked_sqrt(r, "racah");
                HypSeriesSpec s{{-double(n), -arg, n + a + b + 1.0, arg - b + g - N}, {a + 1.0, g + 1.0, -N}, 1.0, n};
                return pref * hyp_terminating(s).real();
            },
            [&](const HPoly&) -> double {
                throw ValidationError("unsupported_family", "h-poly has no closed form; use h_poly_eval");
            },
        },
        p.v);
}

double racah_renormalized_eval(const Racah& f, int n, double k) {
    validate(FamilyParams(f));
    if (n < 0 || n > f.N) throw ValidationError("degree_out_of_range", "racah: degree exceeds N");
    const double a = f.alpha, b = f.beta, g = f.gamma, N = f.N;
    const auto r = poch_ratio({a + 1.0, g + 1.0}, {a + b + N + 2.0, 1.0}, n);
    HypSeriesSpec s{{-double(n), -k, n + a + b + 1.0, k - b + g - N}, {a + 1.0, g + 1.0, -N}, 1.0, n};
    return double(r.real()) * hyp_terminating(s).real();
}

// ---------------------------------------------------------------------------
// weights

namespace {

double mp_log_density(const MeixnerPollaczek& f, double z) {
    return -std::log(2.0 * kPi) - lgam(2.0 * f.mu) + 2.0 * f.mu * std::log(2.0 * std::sin(f.theta)) +
           (2.0 * f.theta - kPi) * z + 2.0 * log_gamma_complex(cplx(f.mu, z)).real();
}

double cdh_log_density(const ContinuousDualHahn& f, double z) {
    const cplx iz(0.0, z);
    const cplx top = log_gamma_complex(f.mu + iz) + log_gamma_complex(f.a + iz) + log_gamma_complex(f.b + iz) -
                     log_gamma_complex(2.0 * iz);
    return -std::log(2.0 * kPi) + 2.0 * top.real() - sum_lgam({f.mu + f.a, f.mu + f.b, f.a + f.b});
}

double wilson_log_density(const Wilson& f, double z) {
    const cplx iz(0.0, z);
    const cplx top = log_gamma_complex(f.mu + iz) + log_gamma_complex(f.nu + iz) + log_gamma_complex(f.a + iz) +
                     log_gamma_complex(f.b + iz) - log_gamma_complex(2.0 * iz);
    const cplx s = f.mu + f.nu + f.a + f.b;
    return -std::log(2.0 * kPi) + log_gamma_complex(s).real() + 2.0 * top.real() -
           sum_lgam({f.mu + f.nu, f.a + f.b, f.mu + f.a, f.mu + f.b, f.nu + f.a, f.nu + f.b});
}

double meixner_log_weight(const Meixner& f, int k) {
    return 2.0 * f.mu * std::log1p(-f.beta) + lgam(k + 2.0 * f.mu) + k * std::log(f.beta) - lgam(2.0 * f.mu) -
           lgam(k + 1.0);
}

double krawtchouk_weight(const Krawtchouk& f, int k) {
    return std::exp(lgam(f.N + 1.0) - lgam(f.N - k + 1.0) - lgam(k + 1.0) + k * std::log(f.gamma) +
                    (f.N - k) * std::log1p(-f.gamma));
}

long double dual_hahn_weight(const DualHahn& f, int k) {
    const long double a = f.alpha, b = f.beta;
    auto poch = [](long double x, int n) {
        long double p = 1.0L;
        for (int j = 0; j < n; ++j) p *= x + j;
        return p;
    };
    long double fact = 1.0L;
    for (int j = 1; j <= k; ++j) fact *= j;
    return poch(b + 1.0L, f.N) * (2.0L * k + a + b + 1.0L) * poch(a + 1.0L, k) * poch(f.N - k + 1.0L, k) /
           (poch(k + a + b + 1.0L, f.N + 1) * poch(b + 1.0L, k) * fact);
}

double continuous_log_density(const FamilyParams& p, double z) {
    if (auto* f = std::get_if<MeixnerPollaczek>(&p.v)) return mp_log_density(*f, z);
    if (auto* f = std::get_if<ContinuousDualHahn>(&p.v)) return cdh_log_density(*f, z);
    if (auto* f = std::get_if<Wilson>(&p.v)) return wilson_log_density(*f, z);
    throw ValidationError("regime", family_name(p) + " has no continuous density");
}

bool mixed_regime(const FamilyParams& p) {
    if (auto* f = std::get_if<ContinuousDualHahn>(&p.v)) return f->mu < 0.0;
    if (auto* f = std::get_if<Wilson>(&p.v)) return f->mu.real() < 0.0;
    return false;
}

double mu_of(const FamilyParams& p) {
    if (auto* f = std::get_if<ContinuousDualHahn>(&p.v)) return f->mu;
    if (auto* f = std::get_if<Wilson>(&p.v)) return f->mu.real();
    return 0.0;
}

}  // namespace

double WeightSpec::log_density(double z) const { return continuous_log_density(params, z); }
double WeightSpec::density(double z) const { return std::exp(log_density(z)); }

WeightSpec weight(const FamilyParams& p) {
    validate(p);
    WeightSpec w;
    w.params = p;
    if (mixed_regime(p))
        throw ValidationError("regime", family_name(p) + ": mu < 0 gives a mixed measure; use the generalized relation");
    std::visit(overloaded{
                   [&](const MeixnerPollaczek&) {
                       w.kind = WeightSpec::Kind::Continuous;
                       w.lo = -std::numeric_limits<double>::infinity();
                       w.hi = std::numeric_limits<double>::infinity();
                   },
                   [&](const ContinuousDualHahn&) {
                       w.kind = WeightSpec::Kind::Continuous;
                       w.lo = 0.0;
                       w.hi = std::numeric_limits<double>::infinity();
                   },
                   [&](const Wilson&) {
                       w.kind = WeightSpec::Kind::Continuous;
                       w.lo = 0.0;
                       w.hi = std::numeric_limits<double>::infinity();
                   },
                   [&](const Meixner& f) {
                       w.kind = WeightSpec::Kind::Discrete;
                       const int kmax = meixner_kmax(f, 0);
                       for (int k = 0; k < kmax; ++k) w.masses.emplace_back(k, std::exp(meixner_log_weight(f, k)));
                   },
                   [&](const Krawtchouk& f) {
                       w.kind = WeightSpec::Kind::Discrete;
                       for (int k = 0; k <= f.N; ++k) w.masses.emplace_back(k, krawtchouk_weight(f, k));
                   },
                   [&](const DualHahn& f) {
                       w.kind = WeightSpec::Kind::Discrete;
                       for (int k = 0; k <= f.N; ++k) w.masses.emplace_back(k, double(dual_hahn_weight(f, k)));
                   },
                   [&](const Racah& f) {
                       w.kind = WeightSpec::Kind::Discrete;
                       for (int k = 0; k <= f.N; ++k) w.masses.emplace_back(k, double(racah_weight(f, k)));
                   },
                   [&](const HPoly&) {
                       throw ValidationError("unsupported_family", "h-poly: weight function unknown");
                   },
               },
               p.v);
    return w;
}

std::vector<std::pair<double, double>> mixed_masses(const FamilyParams& p) {
    validate(p);
    if (!mixed_regime(p)) throw ValidationError("regime", "generalized relation needs mu < 0");
    const double mu = mu_of(p);
    const int N = static_cast<int>(std::floor(-mu));
    std::vector<std::pair<double, double>> out;
    if (auto* f = std::get_if<ContinuousDualHahn>(&p.v)) {
        const cplx c = std::exp(log_gamma_complex(f->a - mu) + log_gamma_complex(f->b - mu) -
                                log_gamma_complex(f->a + f->b) - log_gamma_complex(1.0 - 2.0 * mu));
        for (int k = 0; k <= N; ++k) {
            const auto r = poch_ratio({mu + f->a, mu + f->b, 2.0 * mu}, {mu - f->a + 1.0, mu - f->b + 1.0, 1.0}, k);
            const cplx term = cplx(double(r.real()), double(r.imag())) * (k + mu) * ((k % 2) ? -1.0 : 1.0);
            const double x = -(k + mu) * (k + mu);
            out.emplace_back(x, (-2.0 * c * term).real());
        }
    } else {
        const auto& w = std::get<Wilson>(p.v);
        const cplx s = w.mu + w.nu + w.a + w.b;
        const cplx c = std::exp(log_gamma_complex(s) + log_gamma_complex(w.nu - mu) + log_gamma_complex(w.a - mu) +
                                log_gamma_complex(w.b - mu) - log_gamma_complex(1.0 - 2.0 * mu) -
                                log_gamma_complex(w.a + w.b) - log_gamma_complex(w.a + w.nu) -
                                log_gamma_complex(w.b + w.nu));
        for (int k = 0; k <= N; ++k) {
            const auto r = poch_ratio({2.0 * mu, mu + w.nu, mu + w.a, mu + w.b},
                                      {mu - w.nu + 1.0, mu - w.a + 1.0, mu - w.b + 1.0, 1.0}, k);
            const cplx term = cplx(double(r.real()), double(r.imag())) * (k + mu);
            const double x = -(k + mu) * (k + mu);
            out.emplace_back(x, (-2.0 * c * term).real());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// orthogonality

int meixner_kmax(const Meixner& f, int nmax, int cap) {
    const FamilyParams p(f);
    double sum = 0.0, prev = 0.0;
    for (int k = 0; k < cap; ++k) {
        const auto P = poly_eval_all_ld(p, nmax, k);
        long double big = 0.0L;
        for (long double v : P) big = std::max(big, v * v);
        const double g = double(std::exp((long double)meixner_log_weight(f, k)) * big);
        sum += g;
        if (k > 2 * nmax + 8 && prev > 0.0 && g < prev) {
            const double r = g / prev;
            if (g * r / (1.0 - r) < 1e-14 * std::max(1.0, sum)) return k + 1;
        }
        prev = g;
    }
    return cap;
}

namespace {

using Gram = std::vector<std::vector<double>>;

Gram zero_gram(int nmax) { return Gram(nmax + 1, std::vector<double>(nmax + 1, 0.0)); }

// Integral part of the Gram matrix for a continuous density over its support.
Gram continuous_gram(const FamilyParams& p, int nmax, const QuadOptions& q) {
    const bool zsquared = !std::holds_alternative<MeixnerPollaczek>(p.v);
    const int dim = (nmax + 1) * (nmax + 2) / 2;
    auto f = [&](double z, double* out) {
        const long double arg = zsquared ? (long double)z * z : (long double)z;
        const auto P = poly_eval_all_ld(p, nmax, arg);
        const long double w = std::exp((long double)continuous_log_density(p, z));
        int idx = 0;
        for (int i = 0; i <= nmax; ++i)
            for (int j = i; j <= nmax; ++j) out[idx++] = double(w * P[i] * P[j]);
    };
    DEOptions opt;
    opt.tol = q.tol;
    opt.maxLevel = q.maxLevel;
    opt.parallel = q.parallel;
    const DEResult r = de_integrate(f, dim, zsquared ? DEDomain::HalfLine : DEDomain::RealLine, 0.0, 0.0, opt);
    if (!r.converged)
        throw NumericalError("quadrature_nonconvergence",
                             family_name(p) + ": quadrature levels disagree by " + std::to_string(r.change));
    Gram g = zero_gram(nmax);
    int idx = 0;
    for (int i = 0; i <= nmax; ++i)
        for (int j = i; j <= nmax; ++j) g[i][j] = g[j][i] = r.value[idx++];
    return g;
}

void add_masses(Gram& g, const FamilyParams& p, const std::vector<std::pair<double, double>>& masses) {
    const int nmax = static_cast<int>(g.size()) - 1;
    for (const auto& [x, m] : masses) {
        const auto P = poly_eval_all_ld(p, nmax, x);
        for (int i = 0; i <= nmax; ++i)
            for (int j = 0; j <= nmax; ++j) g[i][j] += double(m * P[i] * P[j]);
    }
}

}  // namespace

std::vector<std::vector<double>> orthogonality_gram(const FamilyParams& p, int nmax, const QuadOptions& q) {
    validate(p);
    if (auto* f = std::get_if<Meixner>(&p.v)) {
        Gram g = zero_gram(nmax);
        const int kmax = meixner_kmax(*f, nmax, q.kmaxCap);
        std::vector<std::pair<double, double>> masses;
        for (int k = 0; k < kmax; ++k) masses.emplace_back(k, std::exp(meixner_log_weight(*f, k)));
        add_masses(g, p, masses);
        return g;
    }
    const WeightSpec w = weight(p);
    if (w.kind == WeightSpec::Kind::Discrete) {
        Gram g = zero_gram(nmax);
        add_masses(g, p, w.masses);
        return g;
    }
    return continuous_gram(p, nmax, q);
}

double orthogonality_defect(const FamilyParams& p, int n, int m, const QuadOptions& q) {
    const auto g = orthogonality_gram(p, std::max(n, m), q);
    return std::abs(g[n][m] - (n == m ? 1.0 : 0.0));
}

std::vector<std::vector<double>> generalized_orthogonality_gram(const FamilyParams& p, int nmax,
                                                                const QuadOptions& q) {
    const auto masses = mixed_masses(p);
    Gram g = continuous_gram(p, nmax, q);
    add_masses(g, p, masses);
    return g;
}

double generalized_orthogonality_defect(const FamilyParams& p, int n, int m, const QuadOptions& q) {
    const auto g = generalized_orthogonality_gram(p, std::max(n, m), q);
    return std::abs(g[n][m] - (n == m ? 1.0 : 0.0));
}

double dual_orthogonality_defect(const FamilyParams& p, int n, int m) {
    validate(p);
    if (auto* f = std::get_if<Krawtchouk>(&p.v)) {
        if (n > f->N || m > f->N) throw ValidationError("degree_out_of_range", "krawtchouk: index exceeds N");
        long double s = 0.0L;
        for (int k = 0; k <= f->N; ++k) s += poly_eval_all_ld(p, k, n)[k] * poly_eval_all_ld(p, k, m)[k];
        return double(std::abs(std::sqrt((long double)krawtchouk_weight(*f, n) * krawtchouk_weight(*f, m)) * s -
                               (n == m ? 1.0L : 0.0L)));
    }
    if (auto* f = std::get_if<DualHahn>(&p.v)) {
        if (n > f->N || m > f->N) throw ValidationError("degree_out_of_range", "dual-hahn: index exceeds N");
        const auto Pn = poly_eval_all_ld(p, f->N, n);
        const auto Pm = poly_eval_all_ld(p, f->N, m);
        long double s = 0.0L;
        for (int k = 0; k <= f->N; ++k) s += Pn[k] * Pm[k];
        const long double wn = dual_hahn_weight(*f, n), wm = dual_hahn_weight(*f, m);
        return double(std::abs(std::sqrt(wn * wm) * s - (n == m ? 1.0L : 0.0L)));
    }
    if (auto* f = std::get_if<Meixner>(&p.v)) {
        // M_k at the node n for large degree k is a decaying solution of the
        // recursion, so it is taken from the closed form (a sum of min(n,k)+1 terms).
        long double s = 0.0L, prev = 0.0L;
        const int a = std::min(n, m), b = std::max(n, m);
        for (int k = 0; k < 200000; ++k) {
            const double lp = 0.5 * (log_abs_pochhammer(2.0 * f->mu, k) - lgam(k + 1.0)) + 0.5 * k * std::log(f->beta);
            auto F = [&](int x) {
                HypSeriesSpec hs{{-double(x), -double(k)}, {2.0 * f->mu}, 1.0 - 1.0 / f->beta, std::min(x, k)};
                if (x > k) hs.upper = {-double(k), -double(x)};
                return hyp_terminating(hs, 1 << 30).real();
            };
            const long double t = std::exp(2.0L * lp) * F(a) * F(b);
            s += t;
            const long double at = std::abs(t);
            if (k > 2 * b + 8 && prev > 0.0L && at < prev) {
                const long double r = at / prev;
                if (at * r / (1.0L - r) < 1e-15L * std::max(1.0L, std::abs(s))) break;
            }
            prev = at;
        }
        const long double wn = std::exp((long double)meixner_log_weight(*f, n));
        const long double wm = std::exp((long double)meixner_log_weight(*f, m));
        return double(std::abs(std::sqrt(wn * wm) * s - (n == m ? 1.0L : 0.0L)));
    }
    throw ValidationError("unsupported_family", "dual orthogonality is defined for Meixner, Krawtchouk, dual Hahn");
}

}  // namespace tra

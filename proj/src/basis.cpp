#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "tra/errors.hpp"
#include "tra/physics.hpp"
#include "tra/quadrature.hpp"
#include "tra/specfun.hpp"

namespace tra {

namespace {

using ld = long double;

std::function<double(int)> laguerre_norm(double nu) {
    return [nu](int n) { return std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + nu + 1.0))); };
}

// Jacobi orthonormalization up to a constant; lgamma keeps |Gamma| for negative tau.
std::function<double(int)> jacobi_norm(double s, double t, double c = 1.0) {
    return [s, t, c](int n) {
        const double a = std::abs(2.0 * n + s + t + 1.0);
        return c * std::sqrt(a) *
               std::exp(0.5 * (std::lgamma(n + 1.0) + std::lgamma(n + s + t + 1.0) - std::lgamma(n + s + 1.0) -
                               std::lgamma(n + t + 1.0)));
    };
}

BasisSpec laguerre_basis(std::string label, std::string map, double p, double nu, double h, double kappa, int k,
                         int degR, std::function<ld(ld)> R, std::function<double(double)> coord) {
    if (!(nu > -1.0)) throw ValidationError("domain", label + ": Laguerre index must exceed -1");
    BasisSpec b;
    b.kind = BasisKind::Laguerre;
    b.label = std::move(label);
    b.coordinateMap = std::move(map);
    b.p = p;
    b.nu = nu;
    b.h = h;
    b.kappa = kappa;
    b.k1 = k;
    b.degR = degR;
    b.R = std::move(R);
    b.coordinate = std::move(coord);
    b.norm = laguerre_norm(nu);
    return b;
}

// d1, d2 fix the exponents through 2 alpha - h1 = sigma + d1 and 2 beta - h2 = tau + d2.
BasisSpec jacobi_basis(std::string label, std::string map, bool cosh, double sigma, double tau, int d1, int d2,
                       double h1, double h2, double kappa, int k1, int k2, int degR, std::function<ld(ld)> R,
                       std::function<double(double)> coord) {
    if (!std::isfinite(sigma) || !std::isfinite(tau))
        throw ValidationError("domain", label + ": basis exponents are not real for these parameters");
    BasisSpec b;
    b.kind = BasisKind::Jacobi;
    b.label = std::move(label);
    b.coordinateMap = std::move(map);
    b.coshDomain = cosh;
    b.sigma = sigma;
    b.tau = tau;
    b.h1 = h1;
    b.h2 = h2;
    b.alpha = 0.5 * (sigma + d1 + h1);
    b.beta = 0.5 * (tau + d2 + h2);
    b.kappa = kappa;
    b.k1 = k1;
    b.k2 = k2;
    b.degR = degR;
    b.R = std::move(R);
    b.coordinate = std::move(coord);
    b.norm = jacobi_norm(sigma, tau);
    if (cosh) {
        // Matrix elements converge at infinity only while E1 + E2 + degree < -1 for S, T and V.
        const double E[3] = {2 * b.alpha - h1 + 2 * b.beta - h2, 2 * b.alpha + 2 * b.beta - 4 + h1 + h2,
                             2 * b.alpha - h1 - k1 + 2 * b.beta - h2 - k2};
        const double off[3] = {-2.0, 0.0, -2.0 + degR};
        double cap = 1 << 20;
        for (int k = 0; k < 3; ++k) cap = std::min(cap, std::ceil((-1.0 - E[k] - off[k]) / 2.0) - 1.0);
        b.maxSize = static_cast<int>(std::max(cap, 0.0));
    }
    return b;
}

double root_or_throw(double v, const char* what) {
    if (!(v >= 0.0)) throw ValidationError("domain", std::string(what) + ": negative radicand in basis exponent");
    return std::sqrt(v);
}

BasisSpec table_basis(const Table1Entry& t, std::optional<double> energy) {
    const double l = t.lambda, l2 = l * l;
    const ld V0 = t.V0, V1 = t.V1, Vp = t.Vplus, Vm = t.Vminus;
    const double E = energy.value_or(t.E);
    const std::string lab = "table1-row" + std::to_string(t.row);
    BasisSpec b;
    switch (t.row) {
        case 1:
            b = jacobi_basis(lab, "y = sin(pi x / L)", false, root_or_throw(0.25 + 2.0 * (t.Vplus - t.Vminus) / l2, "row 1"),
                             root_or_throw(0.25 + 2.0 * (t.Vplus + t.Vminus) / l2, "row 1"), 0, 0, 0.5, 0.5, l, 1, 1, 3,
                             [=](ld y) { return (V0 + V1 * y) * (1 - y * y) + Vp - Vm * y; },
                             [l](double x) { return std::sin(l * x); });
            break;
        case 2:
            b = jacobi_basis(lab, "y = 2 (x/L)^2 - 1", false, root_or_throw(1.0 + 2.0 * t.Vminus / l2, "row 2"),
                             root_or_throw(0.25 + 2.0 * t.Vplus / l2, "row 2"), 1, 0, 0.0, 0.5,
                             2.0 * std::numbers::sqrt2 * l, 2, 1, 3,
                             [=](ld y) {
                                 return 2 * ((V0 + V1 * y) * (1 - y) * (1 + y) + 2 * Vp * (1 - y) + 2 * Vm * (1 + y));
                             },
                             [l](double x) { return 2.0 * l * l * x * x - 1.0; });
            break;
        case 3:
            b = jacobi_basis(lab, "y = 1 - 2 exp(-lambda x)", false, root_or_throw(8.0 * (t.Vminus - E) / l2, "row 3"),
                             root_or_throw(1.0 + 8.0 * t.Vplus / l2, "row 3"), -1, 1, 1.0, 0.0, l, 0, 2, 3,
                             [=](ld y) {
                                 return (1 - y) * (1 + y) * (V0 + V1 * y) + 2 * Vm * (1 + y) + 2 * Vp * (1 - y);
                             },
                             [l](double x) { return 1.0 - 2.0 * std::exp(-l * x); });
            b.energy = E;
            break;
        case 4:
            b = jacobi_basis(lab, "y = 2 tanh^2(lambda x) - 1", false, root_or_throw(2.0 * (t.Vminus - E) / l2, "row 4"),
                             root_or_throw(0.25 + 2.0 * t.Vplus / l2, "row 4"), -1, 0, 1.0, 0.5,
                             std::numbers::sqrt2 * l, 0, 1, 3,
                             [=](ld y) {
                                 return Vm * (1 + y) + Vp * (1 - y) + (1 - y) * (1 + y) * (V0 + V1 * y) / 2;
                             },
                             [l](double x) {
                                 const double th = std::tanh(l * x);
                                 return 2.0 * th * th - 1.0;
                             });
            b.energy = E;
            break;
        case 5:
            b = jacobi_basis(lab, "y = tanh(lambda x)", false, root_or_throw(2.0 * (t.Vplus - t.Vminus - E) / l2, "row 5"),
                             root_or_throw(2.0 * (t.Vplus + t.Vminus - E) / l2, "row 5"), -1, -1, 1.0, 1.0, l, 0, 0, 3,
                             [=](ld y) { return Vp - Vm * y + (1 - y * y) * (V0 + V1 * y); },
                             [l](double x) { return std::tanh(l * x); });
            b.energy = E;
            break;
        case 6:
            b = jacobi_basis(lab, "y = 2 sin^2(pi x / L) - 1", false, root_or_throw(0.25 + 8.0 * t.Vminus / l2, "row 6"),
                             root_or_throw(0.25 + 8.0 * t.Vplus / l2, "row 6"), 0, 0, 0.5, 0.5, l, 1, 1, 3,
                             [=](ld y) { return (V0 + V1 * y) * (1 - y * y) + 2 * Vp * (1 - y) + 2 * Vm * (1 + y); },
                             [l](double x) {
                                 const double s = std::sin(0.5 * l * x);
                                 return 2.0 * s * s - 1.0;
                             });
            break;
        case 7:
            b = jacobi_basis(lab, "y = cosh(lambda x)", true, root_or_throw(0.25 + 2.0 * (t.Vplus - t.Vminus) / l2, "row 7"),
                             -root_or_throw(0.25 + 2.0 * (t.Vplus + t.Vminus) / l2, "row 7"), 0, 0, 0.5, 0.5, l, 1, 1, 3,
                             [=](ld y) { return (V0 + V1 * y) * (y * y - 1) + Vp - Vm * y; },
                             [l](double x) { return std::cosh(l * x); });
            break;
        default:
            throw ValidationError("domain", "table row must be 1..7");
    }
    return b;
}

}  // namespace

BasisSpec basis_spec(const PotentialModel& m, Route r, const RouteOptions& o, std::optional<double> energy) {
    validate_model(m);
    check_route(m, r);
    const double a = o.a;
    const double nu = route_nu(m, o);
    if (std::holds_alternative<PoschlTeller>(m) || std::holds_alternative<TrigScarf>(m) ||
        std::holds_alternative<Eckart>(m) || std::holds_alternative<RosenMorse>(m))
        if (!(a > 0.0)) throw ValidationError("domain", "basis parameter a must be > 0");

    if (auto* c = std::get_if<Coulomb>(&m)) {
        const int l = c->ell;
        const double L2 = 0.5 * l * (l + 1.0);
        if (r == Route::MP) {
            const double lam = c->lambda;
            const ld Z = c->Z;
            return laguerre_basis("coulomb-laguerre", "s = lambda r", l + 1.0, 2.0 * l + 1.0, 0.0, lam, 2, 1,
                                  [=](ld s) { return L2 * lam * lam + Z * lam * s; },
                                  [lam](double x) { return lam * x; });
        }
        const double E = energy.value_or(-c->lambda * c->lambda / 8.0);
        if (!(E < 0.0)) throw ValidationError("domain", "coulomb CDH basis needs E < 0");
        const double lam = std::sqrt(-8.0 * E);
        const ld Z = c->Z;
        BasisSpec b = laguerre_basis("coulomb-cdh-laguerre", "s = lambda r, lambda^2 = -8E", 1.0 + nu / 2.0, nu,
                                     0.0, lam, 2, 1, [=](ld s) { return L2 * lam * lam + Z * lam * s; },
                                     [lam](double x) { return lam * x; });
        b.energy = E;
        return b;
    }
    if (auto* c = std::get_if<Oscillator>(&m)) {
        const int l = c->ell;
        const double L2 = 0.5 * l * (l + 1.0);
        if (r == Route::MP) {
            const double lam = c->lambda, w = c->omega;
            return laguerre_basis("oscillator-laguerre", "s = (lambda r)^2", 0.5 * (l + 1.0), l + 0.5, 0.5, 2.0 * lam, 1,
                                  2, [=](ld s) { return L2 * lam * lam + w * w * s * s / (2 * lam * lam); },
                                  [lam](double x) { return lam * lam * x * x; });
        }
        const double al = std::sqrt(c->omega);
        return laguerre_basis("oscillator-cdh-laguerre", "s = (alpha r)^2, alpha^2 = omega", 0.5 * (nu + 1.5), nu,
                              0.5, 2.0 * al, 1, 2, [=](ld s) { return L2 * al * al + al * al * s * s / 2; },
                              [al](double x) { return al * al * x * x; });
    }
    if (auto* c = std::get_if<Morse>(&m)) {
        const double al = c->alpha;
        if (r == Route::MP) {
            const double E = energy.value_or(-al * al / 8.0);
            if (!(E < 0.0)) throw ValidationError("domain", "morse MP basis needs E < 0");
            const double nuE = 2.0 / al * std::sqrt(-2.0 * E);
            const ld V0 = c->V0, V1 = c->V1;
            BasisSpec b = laguerre_basis("morse-laguerre", "s = exp(alpha x)", nuE / 2.0, nuE, 1.0, al, 0, 2,
                                         [=](ld s) { return V0 * s * s + V1 * s; },
                                         [al](double x) { return std::exp(al * x); });
            b.energy = E;
            return b;
        }
        // Shift x so the e^{2 alpha x} coefficient becomes alpha^2 / 8.
        const double xi = std::sqrt(8.0 * c->V0) / al;
        const ld V = c->V1 * al / std::sqrt(8.0 * c->V0);
        const ld A8 = al * al / 8.0L;
        return laguerre_basis("morse-cdh-laguerre", "s = sqrt(8 V0)/alpha exp(alpha x)", 0.5 * (nu + 1.0), nu, 1.0,
                              al, 0, 2, [=](ld s) { return A8 * s * s + V * s; },
                              [al, xi](double x) { return xi * std::exp(al * x); });
    }
    if (auto* c = std::get_if<PoschlTeller>(&m)) {
        const double l = c->lambda, l2 = l * l;
        const double tau = root_or_throw(0.25 + 2.0 * c->V1 / l2, "poschl-teller");
        const ld V0 = c->V0, V1 = c->V1;
        BasisSpec b = jacobi_basis("poschl-teller-jacobi", "y = 2 tanh^2(lambda x) - 1", false, 2.0 * a - 1.0, tau, 0,
                                   0, 1.0, 0.5, std::numbers::sqrt2 * l, 0, 1, 2,
                                   [=](ld y) { return (1 + y) * V0 * (1 - y) / 2 + V1 * (1 - y); },
                                   [l](double x) {
                                       const double th = std::tanh(l * x);
                                       return 2.0 * th * th - 1.0;
                                   });
        // Printed A_n: the constant denominator is taken in absolute value.
        const double g = 0.25 - 2.0 * c->V0 / l2;
        const double mu = 0.5 * (1.0 + tau - (g >= 0.0 ? std::sqrt(g) : 0.0));
        const double den = std::abs(mu + (1.0 + tau) + 2.0 * a - 1.0);
        b.norm = jacobi_norm(b.sigma, tau, den > 0.0 ? 1.0 / std::sqrt(den) : 1.0);
        return b;
    }
    if (auto* c = std::get_if<TrigScarf>(&m)) {
        const double l = c->lambda, l2 = l * l;
        const ld V0 = c->V0, Vp = c->Vplus, Vm = c->Vminus;
        return jacobi_basis("scarf-jacobi", "y = sin(lambda x)", false, 2.0 * a - 1.0,
                            root_or_throw(0.25 + 2.0 * (c->Vplus + c->Vminus) / l2, "scarf"), 1, 0, 0.5, 0.5, l, 1, 1,
                            2, [=](ld y) { return V0 * (1 - y * y) + Vp - Vm * y; },
                            [l](double x) { return std::sin(l * x); });
    }
    if (auto* c = std::get_if<Eckart>(&m)) {
        const double l = c->lambda, l2 = l * l;
        const ld V0 = c->V0, V1 = c->V1;
        return jacobi_basis("eckart-jacobi", "y = 1 - 2 exp(-lambda x)", false, 2.0 * a - 1.0,
                            root_or_throw(1.0 + 8.0 * c->V1 / l2, "eckart"), 0, 1, 1.0, 0.0, l, 0, 2, 2,
                            [=](ld y) { return (1 - y) * (V0 * (1 + y) + 2 * V1); },
                            [l](double x) { return 1.0 - 2.0 * std::exp(-l * x); });
    }
    if (auto* c = std::get_if<RosenMorse>(&m)) {
        const double l = c->lambda;
        const ld A = c->A, B = c->B, h = 0.5L * l * l;
        return jacobi_basis("rosen-morse-jacobi", "y = cosh(lambda x)", true, 2.0 * a - 1.0, -(c->A + c->B + 0.5), 1, 0,
                            0.5, 0.5, l, 1, 1, 1, [=](ld y) { return h * ((B * B + A * A + A) - B * (2 * A + 1) * y); },
                            [l](double x) { return std::cosh(l * x); });
    }
    if (auto* t = std::get_if<Table1Entry>(&m)) return table_basis(*t, energy);
    throw ValidationError("invalid_route", model_name(m) + ": no tridiagonal basis is given for this model");
}

double basis_eval(const BasisSpec& b, int n, double x) {
    if (n < 0) throw ValidationError("domain", "basis index must be >= 0");
    const long double c = b.coordinate(x);
    const double A = b.norm ? b.norm(n) : 1.0;
    if (b.kind == BasisKind::Laguerre) {
        if (!(c >= 0.0L)) throw ValidationError("domain", "x outside the basis domain");
        if (c == 0.0L) return b.p > 0.0 ? 0.0 : A * double(laguerre_eval_ld(n, b.nu, 0.0L));
        const long double lv = b.p * std::log(c) - c / 2.0L;
        return A * double(std::exp(lv) * laguerre_eval_ld(n, b.nu, c));
    }
    const long double u = b.coshDomain ? c - 1.0L : 1.0L - c;
    const long double v = 1.0L + c;
    if (!(u >= 0.0L) || !(v >= 0.0L)) throw ValidationError("domain", "x outside the basis domain");
    if (u == 0.0L || v == 0.0L) {
        if ((u == 0.0L && b.alpha > 0.0) || (v == 0.0L && b.beta > 0.0)) return 0.0;
    }
    const long double pre = std::pow(u, (long double)b.alpha) * std::pow(v, (long double)b.beta);
    return A * double(pre * jacobi_eval_ld(n, b.sigma, b.tau, c));
}

double basis_eval(const PotentialModel& m, Route r, int n, double x, const RouteOptions& o) {
    return basis_eval(basis_spec(m, r, o), n, x);
}

namespace {

void laguerre_all(int M, ld nu, ld s, ld* out) {
    out[0] = 1.0L;
    if (M > 1) out[1] = 1.0L + nu - s;
    for (int n = 1; n + 1 < M; ++n) out[n + 1] = ((2 * n + 1 + nu - s) * out[n] - (n + nu) * out[n - 1]) / (n + 1);
}

void jacobi_all(int M, ld s, ld t, ld y, ld* out) {
    if (M <= 0) return;
    out[0] = 1.0L;
    if (M > 1) out[1] = (s + 1) + (s + t + 2) * (y - 1) / 2;
    for (int n = 1; n + 1 < M; ++n) {
        const ld a = 2 * n + s + t;
        const ld c1 = 2 * (n + 1) * (n + s + t + 1) * a;
        if (c1 == 0.0L) throw NumericalError("degenerate_basis", "Jacobi recurrence degenerates for these exponents");
        const ld c2 = (a + 1) * ((a + 2) * a * y + s * s - t * t);
        const ld c3 = 2 * (n + s) * (n + t) * (a + 2);
        out[n + 1] = (c2 * out[n] - c3 * out[n - 1]) / c1;
    }
}

using MatLD = Eigen::Matrix<ld, Eigen::Dynamic, Eigen::Dynamic>;

struct Raw {
    MatLD H, S;
};

// Per node: basis factor values P, kinetic factors Q, and weights for S, T and V terms.
struct NodeData {
    std::vector<ld> fS, fT, fV;
    MatLD P, Q;   // node x degree
};

void check_exponent(ld e, const std::string& label) {
    if (!(e > -1.0L))
        throw ValidationError("basis_size", label + ": matrix elements diverge (weight exponent <= -1)");
}

NodeData laguerre_nodes(const BasisSpec& b, int M, int Nq) {
    const ld p = b.p, h = b.h, nu = b.nu, kap = b.kappa;
    const ld ES = 2 * p - h, ET = 2 * p - 2 + h, EV = 2 * p - h - b.k1;
    const ld e = std::min({ES, ET, EV});
    check_exponent(e, b.label);
    const QuadratureRuleLD g = gauss_laguerre(Nq, e);
    NodeData d;
    d.fS.resize(Nq);
    d.fT.resize(Nq);
    d.fV.resize(Nq);
    d.P.resize(Nq, M);
    d.Q.resize(Nq, M);
    std::vector<ld> L(M);
    for (int i = 0; i < Nq; ++i) {
        const ld s = g.nodes[i], w = g.weights[i];
        d.fS[i] = w * std::pow(s, ES - e) / kap;
        d.fT[i] = w * std::pow(s, ET - e) * kap / 2;
        d.fV[i] = w * std::pow(s, EV - e) * b.R(s) / kap;
        laguerre_all(M, nu, s, L.data());
        for (int n = 0; n < M; ++n) {
            d.P(i, n) = L[n];
            const ld sdL = n == 0 ? 0.0L : n * L[n] - (n + nu) * L[n - 1];
            d.Q(i, n) = (p - s / 2) * L[n] + sdL;
        }
    }
    return d;
}

NodeData jacobi_nodes(const BasisSpec& b, int M, int Nq) {
    const ld al = b.alpha, be = b.beta, s = b.sigma, t = b.tau, kap = b.kappa;
    const ld h1 = b.h1, h2 = b.h2;
    const ld E1[3] = {2 * al - h1, 2 * al - 2 + h1, 2 * al - h1 - b.k1};
    const ld E2[3] = {2 * be - h2, 2 * be - 2 + h2, 2 * be - h2 - b.k2};
    const ld coef[3] = {1 / kap, kap / 2, 1 / kap};
    const ld e1 = std::min({E1[0], E1[1], E1[2]});
    check_exponent(e1, b.label);
    NodeData d;
    d.fS.resize(Nq);
    d.fT.resize(Nq);
    d.fV.resize(Nq);
    d.P.resize(Nq, M);
    d.Q.resize(Nq, M);
    std::vector<ld> P(M), D(std::max(M - 1, 1));
    std::vector<ld> ys(Nq), f[3];
    for (auto& v : f) v.resize(Nq);

    if (!b.coshDomain) {
        const ld e2 = std::min({E2[0], E2[1], E2[2]});
        check_exponent(e2, b.label);
        const QuadratureRuleLD g = gauss_jacobi(Nq, e1, e2);
        for (int i = 0; i < Nq; ++i) {
            const ld y = g.nodes[i];
            ys[i] = y;
            for (int k = 0; k < 3; ++k)
                f[k][i] = g.weights[i] * coef[k] * std::pow(1 - y, E1[k] - e1) * std::pow(1 + y, E2[k] - e2);
        }
    } else {
        // y = 2/t - 1 maps [1, inf) onto (0, 1]; the integrand is (1-t)^e1 t^c times a polynomial in t.
        const ld deg[3] = {2.0L * (M - 1), 2.0L * M, 2.0L * (M - 1) + b.degR};
        ld top = -1e300L;
        for (int k = 0; k < 3; ++k) top = std::max(top, E1[k] + E2[k] + deg[k]);
        const ld c = -2 - top;
        if (!(c > -1.0L))
            throw ValidationError("basis_size", b.label + ": only " +
                                                    std::to_string(std::max(0, int(std::floor(M - 1 - (c + 1) / 2)))) +
                                                    " basis functions have finite matrix elements at these parameters");
        const QuadratureRuleLD g = gauss_jacobi(Nq, e1, c);
        const ld jac = std::pow(2.0L, -e1 - c - 1);
        for (int i = 0; i < Nq; ++i) {
            const ld tt = (1 + g.nodes[i]) / 2;
            ys[i] = 2 / tt - 1;
            for (int k = 0; k < 3; ++k)
                f[k][i] = g.weights[i] * jac * coef[k] * std::pow(2.0L, E1[k] + E2[k] + 1) *
                          std::pow(1 - tt, E1[k] - e1) * std::pow(tt, -E1[k] - E2[k] - 2 - c);
        }
    }
    for (int i = 0; i < Nq; ++i) {
        const ld y = ys[i];
        d.fS[i] = f[0][i];
        d.fT[i] = f[1][i];
        d.fV[i] = f[2][i] * b.R(y);
        jacobi_all(M, s, t, y, P.data());
        if (M > 1) jacobi_all(M - 1, s + 1, t + 1, y, D.data());
        for (int n = 0; n < M; ++n) {
            const ld dP = n == 0 ? 0.0L : (n + s + t + 1) / 2 * D[n - 1];
            d.P(i, n) = P[n];
            d.Q(i, n) = b.coshDomain ? (y * y - 1) * dP + (al * (y + 1) + be * (y - 1)) * P[n]
                                     : (1 - y * y) * dP + (be * (1 - y) - al * (1 + y)) * P[n];
        }
    }
    return d;
}

Raw assemble_raw(const BasisSpec& b, int M, int Nq, bool parallel) {
    if (M < 1) throw ValidationError("domain", "basis size must be >= 1");
    if (M > b.maxSize) throw ValidationError("basis_size", b.label + ": basis size exceeds the square-integrable set");
    const NodeData d = b.kind == BasisKind::Laguerre ? laguerre_nodes(b, M, Nq) : jacobi_nodes(b, M, Nq);
    Raw r;
    r.H = MatLD::Zero(M, M);
    r.S = MatLD::Zero(M, M);
    // Each entry is summed by one thread in node order, so the result does not depend on the schedule.
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int n = 0; n < M; ++n) {
        for (int m = n; m < M; ++m) {
            ld h = 0.0L, s = 0.0L;
            for (int i = 0; i < Nq; ++i) {
                const ld pp = d.P(i, n) * d.P(i, m);
                s += d.fS[i] * pp;
                h += d.fT[i] * d.Q(i, n) * d.Q(i, m) + d.fV[i] * pp;
            }
            r.H(n, m) = r.H(m, n) = h;
            r.S(n, m) = r.S(m, n) = s;
        }
    }
    return r;
}

}  // namespace

MatrixPair hamiltonian_matrix(const BasisSpec& b, int M, const AssemblyOptions& opt) {
    const int Nq = opt.order > 0 ? std::max(opt.order, 2 * M + 16) : 2 * M + 16;
    const Raw r = assemble_raw(b, M, Nq, opt.parallel);
    MatrixPair mp;
    mp.scale.resize(M);
    for (int n = 0; n < M; ++n) {
        if (!(r.S(n, n) > 0.0L) || !std::isfinite(double(r.S(n, n))))
            throw NumericalError("assembly", b.label + ": overlap diagonal is not positive");
        mp.scale[n] = double(1.0L / std::sqrt(r.S(n, n)));
    }
    mp.H.resize(M, M);
    mp.S.resize(M, M);
    for (int n = 0; n < M; ++n)
        for (int m = 0; m < M; ++m) {
            const ld c = (ld)mp.scale[n] * mp.scale[m];
            mp.H(n, m) = double(r.H(n, m) * c);
            mp.S(n, m) = double(r.S(n, m) * c);
        }
    if (opt.checkOrder) {
        const Raw r2 = assemble_raw(b, M, 2 * Nq, opt.parallel);
        double diff = 0.0;
        for (int n = 0; n < M; ++n)
            for (int m = 0; m < M; ++m) {
                const ld c = (ld)mp.scale[n] * mp.scale[m];
                diff = std::max({diff, double(std::abs((r2.H(n, m) - r.H(n, m)) * c)),
                                 double(std::abs((r2.S(n, m) - r.S(n, m)) * c))});
            }
        mp.orderCheck = diff;
    }
    return mp;
}

MatrixPair hamiltonian_matrix(const PotentialModel& m, Route r, int M, const RouteOptions& o,
                              const AssemblyOptions& opt) {
    return hamiltonian_matrix(basis_spec(m, r, o), M, opt);
}

double band_defect(const MatrixPair& mp, double E) {
    const Eigen::MatrixXd A = mp.H - E * mp.S;
    double off = 0.0, all = 0.0;
    for (int n = 0; n < A.rows(); ++n)
        for (int m = 0; m < A.cols(); ++m) {
            all = std::max(all, std::abs(A(n, m)));
            if (std::abs(n - m) >= 2) off = std::max(off, std::abs(A(n, m)));
        }
    return all > 0.0 ? off / all : 0.0;
}

TridiagReport tridiagonality_defect(const BasisSpec& b, int M, const AssemblyOptions& opt) {
    const MatrixPair mp = hamiltonian_matrix(b, M, opt);
    TridiagReport rep;
    rep.label = b.label;
    if (b.energy) rep.energies = {*b.energy};
    else rep.energies = {-1.3, 0.4, 2.7};
    for (double E : rep.energies) rep.defect = std::max(rep.defect, band_defect(mp, E));
    return rep;
}

TridiagReport tridiagonality_defect(const PotentialModel& m, Route r, int M, const RouteOptions& o) {
    return tridiagonality_defect(basis_spec(m, r, o), M);
}

BasisSpec perturbed_basis(const BasisSpec& b, double shift) {
    BasisSpec out = b;
    out.label = b.label + "-perturbed";
    if (b.kind == BasisKind::Laguerre) out.p += shift;
    else out.alpha += shift;
    return out;
}

std::vector<AuditCase> audit_catalog() {
    std::vector<AuditCase> c;
    RouteOptions def;
    RouteOptions cdh;
    cdh.nu = 1.5;   // any nu > -1 keeps the matrices tridiagonal
    RouteOptions wil;
    wil.a = 0.75;
    c.push_back({Coulomb{-1.0, 1, 1.0}, Route::MP, def});
    c.push_back({Oscillator{1.0, 1, 0.9}, Route::MP, def});
    c.push_back({Morse{0.5, -3.0, 1.0}, Route::MP, def});
    c.push_back({Morse{0.5, -3.0, 1.0}, Route::CDH, cdh});
    c.push_back({Oscillator{1.0, 1, 1.0}, Route::CDH, cdh});
    c.push_back({Coulomb{-1.0, 1, 1.0}, Route::CDH, cdh});
    c.push_back({PoschlTeller{-12.0, 1.0, 1.0}, Route::Wilson, wil});
    c.push_back({TrigScarf{0.5, 3.0, 1.0, 1.0}, Route::Wilson, wil});
    c.push_back({Eckart{-6.0, 1.0, 1.0}, Route::Wilson, wil});
    c.push_back({RosenMorse{2.5, 60.0, 1.0}, Route::Wilson, wil});
    for (int row = 1; row <= 7; ++row) {
        Table1Entry t;
        t.row = row;
        if (row == 7) t.Vplus = t.Vminus = 550.0;
        c.push_back({t, Route::Wilson, def});
    }
    return c;
}

namespace {

std::vector<double> ritz_values(const BasisSpec& b, int M) {
    const MatrixPair mp = hamiltonian_matrix(b, M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(mp.H, mp.S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver", b.label + ": generalized eigensolver failed");
    const auto& v = es.eigenvalues();
    return std::vector<double>(v.data(), v.data() + v.size());
}

// k-th eigenvalue with the basis tied to the same energy, by fixed-point iteration.
double self_consistent_level(const PotentialModel& m, Route r, const RouteOptions& o, int M, int k, double E0) {
    double E = E0, prev = HUGE_VAL;
    for (int it = 0; it < 60; ++it) {
        const auto v = ritz_values(basis_spec(m, r, o, E), M);
        if (k >= int(v.size()) || !(v[k] < 0.0))
            throw NumericalError("oracle_nonconvergence", model_name(m) + ": level " + std::to_string(k) +
                                                              " left the bound region during iteration");
        const double En = v[k];
        const double d = std::abs(En - E);
        E = En;
        // The map E -> E_k(basis(E)) is nearly flat; stop once the step hits the eigensolver's noise.
        if (d <= 1e-12 * std::abs(En)) return En;
        if (d >= prev && d <= 1e-9 * std::abs(En)) return En;
        prev = d;
    }
    throw NumericalError("oracle_nonconvergence", model_name(m) + ": self-consistent basis energy did not converge");
}

}  // namespace

OracleResult eigen_oracle_spectrum(const PotentialModel& m, Route r, int M, int levels, const RouteOptions& o,
                                   bool convergenceCheck) {
    if (M < 2) throw ValidationError("domain", "oracle size must be >= 2");
    const BasisSpec b0 = basis_spec(m, r, o);
    if (b0.maxSize < 2) throw ValidationError("basis_size", b0.label + ": fewer than two usable basis functions");
    M = std::min(M, b0.maxSize);
    const int M2 = std::min(2 * M, b0.maxSize);
    convergenceCheck = convergenceCheck && M2 > M;
    int count = levels;
    try {
        const SpectrumResult s = bound_spectrum(m, r, o);
        if (s.finite) count = std::min(count, s.N + 1);
    } catch (const ValidationError&) {
    }
    OracleResult res;
    res.M = M;
    if (b0.energy && !std::holds_alternative<Table1Entry>(m)) {
        double guess = *b0.energy;
        for (int k = 0; k < count; ++k) {
            OracleLevel L;
            L.k = k;
            L.value = self_consistent_level(m, r, o, M, k, guess);
            if (convergenceCheck)
                L.convergenceDelta = std::abs(self_consistent_level(m, r, o, M2, k, L.value) - L.value);
            res.levels.push_back(L);
            guess = L.value;
        }
        return res;
    }
    const auto v = ritz_values(b0, M);
    std::vector<double> v2;
    if (convergenceCheck) v2 = ritz_values(b0, M2);
    for (int k = 0; k < count && k < int(v.size()); ++k) {
        OracleLevel L;
        L.k = k;
        L.value = v[k];
        if (convergenceCheck) L.convergenceDelta = std::abs(v2[k] - v[k]);
        res.levels.push_back(L);
    }
    return res;
}

}  // namespace tra

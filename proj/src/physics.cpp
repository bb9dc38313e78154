#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tra/errors.hpp"
#include "tra/physics.hpp"
#include "tra/specfun.hpp"

namespace tra {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void need(bool ok, const std::string& what) {
    if (!ok) throw ValidationError("domain", what);
}

bool finite_all(std::initializer_list<double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// floor with a relative guard so that an exact integer is not lost to rounding.
int guarded_floor(double v) { return static_cast<int>(std::floor(v + 1e-12 * (1.0 + std::abs(v)))); }

bool near_int(double v) { return std::abs(v - std::round(v)) <= 1e-12 * (1.0 + std::abs(v)); }

FamilyParams unchecked(FamilyVariant v) {
    FamilyParams p(std::move(v));
    p.unchecked = true;
    return p;
}

struct WilsonMap {
    cplx mu, nu;
    double z2;
};

// mu, nu from their sum s and difference d (d may be imaginary: d = i dIm).
WilsonMap wilson_from(double s, double dRe, double dIm, double z2) {
    const cplx d(dRe, dIm);
    return {0.5 * (s - d), 0.5 * (s + d), z2};
}

WilsonMap wilson_map(const PotentialModel& m, double E) {
    if (auto* c = std::get_if<PoschlTeller>(&m)) {
        const double l2 = c->lambda * c->lambda;
        return wilson_from(1.0 + std::sqrt(0.25 + 2.0 * c->V1 / l2), std::sqrt(0.25 - 2.0 * c->V0 / l2), 0.0,
                           E / (2.0 * l2));
    }
    if (auto* c = std::get_if<TrigScarf>(&m)) {
        const double l2 = c->lambda * c->lambda;
        const double up = 2.0 * c->Vplus / l2, um = 2.0 * c->Vminus / l2, u0 = 2.0 * c->V0 / l2, eps = 2.0 * E / l2;
        const double g = eps - u0;
        return wilson_from(1.0 + std::sqrt(up + um + 0.25), g >= 0.0 ? 2.0 * std::sqrt(g) : 0.0,
                           g >= 0.0 ? 0.0 : 2.0 * std::sqrt(-g), -0.25 * (up - um + 0.25));
    }
    if (auto* c = std::get_if<Eckart>(&m)) {
        const double l2 = c->lambda * c->lambda;
        const double u0 = 2.0 * c->V0 / l2, u1 = 2.0 * c->V1 / l2, eps = 2.0 * E / l2;
        const double g = -eps - u0;
        return wilson_from(1.0 + std::sqrt(4.0 * u1 + 1.0), g >= 0.0 ? 2.0 * std::sqrt(g) : 0.0,
                           g >= 0.0 ? 0.0 : 2.0 * std::sqrt(-g), eps);
    }
    const auto& c = std::get<RosenMorse>(m);
    const double l2 = c.lambda * c.lambda;
    return wilson_from(c.B - c.A + 0.5, c.B + c.A + 0.5, 0.0, 2.0 * E / l2);
}

// Meixner beta of the MP-route Coulomb and oscillator bound states, with the
// sign s such that the expansion coefficients are s^n M_n.
struct MeixnerMap {
    double mu, beta, sign, k;
};

MeixnerMap coulomb_meixner(const Coulomb& c, double E) {
    const double kap = std::sqrt(-2.0 * E);
    const double r = (2.0 * kap - c.lambda) / (2.0 * kap + c.lambda);
    return {c.ell + 1.0, r * r, r < 0.0 ? -1.0 : 1.0, -c.Z / kap - (c.ell + 1.0)};
}

MeixnerMap oscillator_meixner(const Oscillator& c, double E) {
    const double l2 = c.lambda * c.lambda;
    const double r = (c.omega - l2) / (c.omega + l2);
    const double mu = 0.5 * (c.ell + 1.5);
    return {mu, r * r, r < 0.0 ? -1.0 : 1.0, E / (2.0 * c.omega) - mu};
}

}  // namespace

std::string model_name(const PotentialModel& m) {
    return std::visit(overloaded{[](const Coulomb&) -> std::string { return "coulomb"; },
                                 [](const Oscillator&) -> std::string { return "oscillator"; },
                                 [](const Morse&) -> std::string { return "morse"; },
                                 [](const PoschlTeller&) -> std::string { return "poschl-teller"; },
                                 [](const TrigScarf&) -> std::string { return "trig-scarf"; },
                                 [](const Eckart&) -> std::string { return "eckart"; },
                                 [](const RosenMorse&) -> std::string { return "rosen-morse"; },
                                 [](const LogSpectrum&) -> std::string { return "log-spectrum"; },
                                 [](const Table1Entry& t) -> std::string {
                                     return "table1-row" + std::to_string(t.row);
                                 }},
                      m);
}

std::string route_name(Route r) {
    switch (r) {
        case Route::MP: return "mp";
        case Route::CDH: return "cdh";
        case Route::Wilson: return "wilson";
    }
    return "?";
}

Route parse_route(const std::string& s) {
    if (s == "mp") return Route::MP;
    if (s == "cdh") return Route::CDH;
    if (s == "wilson") return Route::Wilson;
    throw ValidationError("invalid_route", "route must be mp, cdh or wilson, got '" + s + "'");
}

Route default_route(const PotentialModel& m) {
    if (std::holds_alternative<Coulomb>(m) || std::holds_alternative<Oscillator>(m) ||
        std::holds_alternative<Morse>(m) || std::holds_alternative<LogSpectrum>(m))
        return Route::MP;
    return Route::Wilson;
}

void validate_model(const PotentialModel& m) {
    std::visit(overloaded{
                   [](const Coulomb& c) {
                       need(std::isfinite(c.Z), "coulomb: Z must be finite");
                       need(c.ell >= 0, "coulomb: ell must be >= 0");
                       need(c.lambda > 0.0 && std::isfinite(c.lambda), "coulomb: lambda must be > 0");
                   },
                   [](const Oscillator& c) {
                       need(c.omega > 0.0 && std::isfinite(c.omega), "oscillator: omega must be > 0");
                       need(c.ell >= 0, "oscillator: ell must be >= 0");
                       need(c.lambda > 0.0 && std::isfinite(c.lambda), "oscillator: lambda must be > 0");
                   },
                   [](const Morse& c) {
                       need(finite_all({c.V0, c.V1, c.alpha}), "morse: parameters must be finite");
                       need(c.V0 > 0.0, "morse: V0 must be > 0");
                       need(c.alpha > 0.0, "morse: alpha must be > 0");
                   },
                   [](const PoschlTeller& c) {
                       need(finite_all({c.V0, c.V1}) && c.lambda > 0.0, "poschl-teller: bad parameters");
                       const double l2 = c.lambda * c.lambda;
                       need(c.V0 / l2 <= 0.125, "poschl-teller: u0 = V0/lambda^2 must be <= 1/8");
                       need(c.V1 / l2 >= -0.125, "poschl-teller: u1 = V1/lambda^2 must be >= -1/8");
                   },
                   [](const TrigScarf& c) {
                       need(finite_all({c.V0, c.Vplus, c.Vminus}) && c.lambda > 0.0, "trig-scarf: bad parameters");
                       const double l2 = c.lambda * c.lambda;
                       const double up = 2.0 * c.Vplus / l2, um = 2.0 * c.Vminus / l2;
                       need(up + um >= -0.25 && up - um >= -0.25, "trig-scarf: need u+ +- u- >= -1/4");
                   },
                   [](const Eckart& c) {
                       need(finite_all({c.V0, c.V1}) && c.lambda > 0.0, "eckart: bad parameters");
                       need(1.0 + 8.0 * c.V1 / (c.lambda * c.lambda) >= 0.0, "eckart: need 4 u1 + 1 >= 0");
                   },
                   [](const RosenMorse& c) {
                       need(finite_all({c.A, c.B}) && c.lambda > 0.0, "rosen-morse: bad parameters");
                   },
                   [](const LogSpectrum& c) {
                       need(std::isfinite(c.mu) && c.mu < 0.0, "log-spectrum: mu must be < 0");
                       need(c.lambda > 0.0 && std::isfinite(c.lambda), "log-spectrum: lambda must be > 0");
                   },
                   [](const Table1Entry& t) {
                       need(t.row >= 1 && t.row <= 7, "table1: row must be 1..7");
                       need(finite_all({t.V0, t.V1, t.Vplus, t.Vminus, t.E}) && t.lambda > 0.0,
                            "table1: bad parameters");
                   }},
               m);
}

double route_nu(const PotentialModel& m, const RouteOptions& o) {
    if (o.nu) {
        need(*o.nu > -1.0, "nu must be > -1");
        return *o.nu;
    }
    if (auto* c = std::get_if<Coulomb>(&m)) return 2.0 * c->ell;
    if (auto* c = std::get_if<Oscillator>(&m)) return c->ell - 0.5;
    return 1.0;
}

void check_route(const PotentialModel& m, Route r) {
    bool ok = false;
    if (std::holds_alternative<Coulomb>(m) || std::holds_alternative<Oscillator>(m) || std::holds_alternative<Morse>(m))
        ok = r == Route::MP || r == Route::CDH;
    else if (std::holds_alternative<LogSpectrum>(m))
        ok = r == Route::MP;
    else
        ok = r == Route::Wilson;
    if (!ok) throw ValidationError("invalid_route", model_name(m) + " has no " + route_name(r) + " route");
    if (auto* c = std::get_if<Morse>(&m); c && r == Route::MP && c->V0 < c->alpha * c->alpha / 8.0)
        throw ValidationError("domain", "morse: the mp route needs V0 >= alpha^2/8 (use --route cdh)");
}

PolynomialMap map_to_polynomial(const PotentialModel& m, Route r, double E, const RouteOptions& o) {
    validate_model(m);
    check_route(m, r);
    need(std::isfinite(E), "energy must be finite");
    PolynomialMap pm;
    const double a = o.a, ab = 0.5 * (route_nu(m, o) + 1.0);

    if (auto* c = std::get_if<Coulomb>(&m)) {
        const double l2 = c->lambda * c->lambda;
        if (r == Route::MP) {
            need(E != 0.0, "coulomb: E = 0 is the threshold");
            if (E > 0.0) {
                pm.family = MeixnerPollaczek{c->ell + 1.0, std::acos((2.0 * E - l2 / 4.0) / (2.0 * E + l2 / 4.0))};
                // The matrix recursion of the Laguerre basis fixes z = -Z/sqrt(2E); the
                // opposite sign fails it and only mirrors the phase.
                pm.argument = -c->Z / std::sqrt(2.0 * E);
                pm.variableMap = "mu = l+1, cos(theta) = (2E - (lambda/2)^2)/(2E + (lambda/2)^2), z = -Z/sqrt(2E)";
                return pm;
            }
            const MeixnerMap mm = coulomb_meixner(*c, E);
            if (mm.beta == 0.0) throw ValidationError("degenerate_map", "coulomb: lambda = 2 sqrt(-2E) gives beta = 0");
            pm.family = unchecked(Meixner{mm.mu, mm.beta});
            pm.discrete = pm.family;
            pm.rotated = true;
            pm.argument = mm.k;
            pm.variableMap = "z -> iz, theta -> i theta: Meixner sqrt(beta) = |2 kappa - lambda|/(2 kappa + lambda)";
            return pm;
        }
        need(E < 0.0, "coulomb CDH route covers bound states only (E < 0)");
        const double eps = 2.0 * E / l2, rho = c->Z / c->lambda;
        pm.family = unchecked(ContinuousDualHahn{0.5 + rho / std::sqrt(-eps), ab, ab});
        pm.argument = -(c->ell + 0.5) * (c->ell + 0.5);
        pm.variableMap = "mu = 1/2 + rho/sqrt(-eps), a = b = (nu+1)/2, z = i(l+1/2)";
        return pm;
    }
    if (auto* c = std::get_if<Oscillator>(&m)) {
        if (r == Route::MP) {
            const MeixnerMap mm = oscillator_meixner(*c, E);
            if (mm.beta == 0.0)
                throw ValidationError("degenerate_map", "oscillator: lambda^2 = omega gives beta = 0");
            pm.family = unchecked(Meixner{mm.mu, mm.beta});
            pm.discrete = pm.family;
            pm.rotated = true;
            pm.argument = mm.k;
            pm.variableMap = "mu = (l+3/2)/2, z = iE/2omega, sqrt(beta) = |omega - lambda^2|/(omega + lambda^2)";
            return pm;
        }
        const double eps = 2.0 * E / c->omega;
        pm.family = unchecked(ContinuousDualHahn{0.5 - eps / 4.0, ab, ab});
        pm.argument = -0.25 * (c->ell + 0.5) * (c->ell + 0.5);
        pm.variableMap = "mu = 1/2 - eps/4 (2E = alpha^2 eps, alpha^2 = omega), a = b = (nu+1)/2, z = (i/2)(l+1/2)";
        return pm;
    }
    if (auto* c = std::get_if<Morse>(&m)) {
        const double al2 = c->alpha * c->alpha;
        if (r == Route::MP) {
            need(E < 0.0, "morse MP route covers bound states only (E < 0)");
            const double eps = 2.0 * E / al2, u0 = 2.0 * c->V0 / al2, u1 = 2.0 * c->V1 / al2;
            const double mu = 0.5 + std::sqrt(-eps);
            const double zi = u1 / (2.0 * std::sqrt(u0));
            pm.family = unchecked(Meixner{mu, 0.5});
            pm.rotated = true;
            pm.argument = -zi - mu;
            const int N = guarded_floor(-zi - 0.5);
            if (N >= 0 && c->V0 > al2 / 8.0) {
                const double th = std::acosh((2.0 * c->V0 + al2 / 4.0) / (2.0 * c->V0 - al2 / 4.0));
                pm.discrete = unchecked(Krawtchouk{N, std::exp(-2.0 * th)});
            }
            pm.variableMap = "mu = 1/2 + sqrt(-eps), z = i u1/(2 sqrt(u0)), gamma = exp(-2 theta)";
            return pm;
        }
        const double V = c->V1 * c->alpha / std::sqrt(8.0 * c->V0);
        pm.family = unchecked(ContinuousDualHahn{2.0 * V / al2 + 0.5, ab, ab});
        pm.argument = 2.0 * E / al2;
        pm.variableMap = "mu = rho + 1/2 (2V = alpha^2 rho, x shifted so V0 = alpha^2/8), a = b = (nu+1)/2, z^2 = eps";
        return pm;
    }
    if (auto* c = std::get_if<LogSpectrum>(&m)) {
        need(E > 0.0, "log-spectrum: kappa^2 = 2E needs E > 0");
        const double kap = std::sqrt(2.0 * E);
        const double ch = (kap - c->mu * c->lambda) / (kap + c->mu * c->lambda);
        pm.family = unchecked(MeixnerPollaczek{c->mu, ch >= 1.0 ? std::acosh(ch) : std::nan("")});
        pm.rotated = true;
        pm.argument = std::log(kap / c->lambda);
        pm.variableMap = "cosh(theta) = (kappa - mu lambda)/(kappa + mu lambda), z = i ln(kappa/lambda)";
        return pm;
    }
    if (std::holds_alternative<Table1Entry>(m))
        throw ValidationError("no_polynomial_map", "table rows have no closed parameter map");
    const WilsonMap w = wilson_map(m, E);
    pm.family = unchecked(Wilson{w.mu, w.nu, cplx(a), cplx(a)});
    pm.argument = w.z2;
    pm.variableMap = "wilson mu, nu from the model; a = b = " + std::to_string(a);
    return pm;
}

int log_spectrum_size(double mu) {
    need(mu < 0.0 && std::isfinite(mu), "log-spectrum: mu must be < 0");
    const double t = -mu;
    // e^{-(N+mu)} > -mu  <=>  N < t - ln t
    return static_cast<int>(std::ceil(t - std::log(t))) - 1;
}

double log_spectrum_threshold(int N) {
    need(N >= 1, "threshold needs N >= 1");
    if (N == 1) return -1.0;
    // The branch t = -mu > 1, where t - ln t increases.
    double lo = 1.0, hi = 2.0 * N + 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid - std::log(mid) < N ? lo : hi) = mid;
    }
    return -0.5 * (lo + hi);
}

SpectrumResult bound_spectrum(const PotentialModel& m, Route r, const RouteOptions& o) {
    validate_model(m);
    check_route(m, r);
    need(o.kmax >= 1, "kmax must be >= 1");
    SpectrumResult s;
    auto finite = [&](int N, double top, auto energy) {
        if (N < 0) throw ValidationError("no_bound_states", model_name(m) + ": no bound states for these parameters");
        s.finite = true;
        s.N = N;
        s.boundary = near_int(top);
        for (int k = 0; k <= N; ++k) s.energies.push_back({k, energy(k)});
    };

    if (auto* c = std::get_if<Coulomb>(&m)) {
        if (!(c->Z < 0.0)) throw ValidationError("no_bound_states", "coulomb: bound states need Z < 0");
        s.sourceFormula = "E_k = -Z^2 / (2 (k + l + 1)^2)";
        for (int k = 0; k < o.kmax; ++k) {
            const double d = k + c->ell + 1.0;
            s.energies.push_back({k, -0.5 * c->Z * c->Z / (d * d)});
        }
        return s;
    }
    if (auto* c = std::get_if<Oscillator>(&m)) {
        s.sourceFormula = "E_k = omega (2k + l + 3/2)";
        for (int k = 0; k < o.kmax; ++k) s.energies.push_back({k, c->omega * (2.0 * k + c->ell + 1.5)});
        return s;
    }
    if (auto* c = std::get_if<Morse>(&m)) {
        const double al = c->alpha;
        const double q = c->V1 / (al * std::sqrt(2.0 * c->V0));
        s.sourceFormula = r == Route::MP ? "E_k = -alpha^2/2 (k + 1/2 + V1/(alpha sqrt(2 V0)))^2"
                                         : "E_k = -alpha^2/2 (k + 1/2 + 2V/alpha^2), V = V1 alpha/sqrt(8 V0)";
        finite(guarded_floor(-q - 0.5), -q - 0.5, [&](int k) { return -0.5 * al * al * (k + 0.5 + q) * (k + 0.5 + q); });
        return s;
    }
    if (auto* c = std::get_if<PoschlTeller>(&m)) {
        const double l2 = c->lambda * c->lambda;
        const double t1 = std::sqrt(0.25 + 2.0 * c->V1 / l2), t0 = std::sqrt(0.25 - 2.0 * c->V0 / l2);
        s.sourceFormula = "E_k = -lambda^2/2 (2k + 1 + sqrt(1/4 + 2V1/lambda^2) - sqrt(1/4 - 2V0/lambda^2))^2";
        const double top = 0.5 * t0 - 0.5 * t1 - 0.5;
        finite(guarded_floor(top), top, [&](int k) {
            const double b = 2.0 * k + 1.0 + t1 - t0;
            return -0.5 * l2 * b * b;
        });
        return s;
    }
    if (auto* c = std::get_if<TrigScarf>(&m)) {
        const double l2 = c->lambda * c->lambda;
        const double up = 2.0 * c->Vplus / l2, um = 2.0 * c->Vminus / l2, u0 = 2.0 * c->V0 / l2;
        const double h = 0.5 * std::sqrt(up + um + 0.25) + 0.5 * std::sqrt(up - um + 0.25);
        s.sourceFormula = "eps_k = u0 + (k + 1/2 + sqrt(u+ + u- + 1/4)/2 + sqrt(u+ - u- + 1/4)/2)^2, E = lambda^2 eps/2";
        for (int k = 0; k < o.kmax; ++k) {
            s.eps.push_back(u0 + (k + 0.5 + h) * (k + 0.5 + h));
            s.energies.push_back({k, 0.5 * l2 * s.eps.back()});
        }
        return s;
    }
    if (auto* c = std::get_if<Eckart>(&m)) {
        const double l2 = c->lambda * c->lambda;
        const double u0 = 2.0 * c->V0 / l2, u1 = 2.0 * c->V1 / l2;
        // The pole condition puts the shift at (mu + nu)/2. A shift of (mu + nu + 1)/2
        // disagrees with a direct finite-difference solve.
        const double c0 = 0.5 + 0.5 * std::sqrt(4.0 * u1 + 1.0);
        s.sourceFormula = "eps_k = -1/4 [k + (mu+nu)/2 - u0/(k + (mu+nu)/2)]^2 - u0, E = lambda^2 eps/2";
        if (!(u0 < 0.0)) throw ValidationError("no_bound_states", "eckart: bound states need V0 < 0");
        const double top = std::sqrt(-u0) - c0;   // bound while (k + c0)^2 < -u0
        int N = static_cast<int>(std::ceil(top)) - 1;
        finite(N, top, [&](int k) {
            const double b = k + c0;
            const double t = b - u0 / b;
            s.eps.push_back(-0.25 * t * t - u0);
            return 0.5 * l2 * s.eps.back();
        });
        return s;
    }
    if (auto* c = std::get_if<RosenMorse>(&m)) {
        const double l2 = c->lambda * c->lambda;
        s.sourceFormula = "eps_k = -(k - A)^2, E = lambda^2 eps/2";
        finite(c->A >= 0.0 ? guarded_floor(c->A) : -1, c->A, [&](int k) {
            s.eps.push_back(-(k - c->A) * (k - c->A));
            return 0.5 * l2 * s.eps.back();
        });
        return s;
    }
    if (auto* c = std::get_if<LogSpectrum>(&m)) {
        const double t = -c->mu;
        s.sourceFormula = "E_k = lambda^2/2 exp(-2(k + mu)), N largest with exp(-(N+mu)) > -mu";
        finite(log_spectrum_size(c->mu), t - std::log(t),
               [&](int k) { return 0.5 * c->lambda * c->lambda * std::exp(-2.0 * (k + c->mu)); });
        s.boundary = false;
        return s;
    }
    throw ValidationError("no_spectrum_formula", model_name(m) + ": no closed-form spectrum");
}

double pole_condition_residual(const PotentialModel& m, Route r, int k, const RouteOptions& o) {
    RouteOptions oo = o;
    oo.kmax = std::max(o.kmax, k + 1);
    const SpectrumResult s = bound_spectrum(m, r, oo);
    if (k < 0 || k >= int(s.energies.size())) throw ValidationError("domain", "k outside the spectrum");
    const double E = s.energies[k].value;
    double mu = 0.0, iz = 0.0;   // iz is real on the bound states
    if (auto* c = std::get_if<Coulomb>(&m); c && r == Route::MP) {
        mu = c->ell + 1.0;
        iz = c->Z / std::sqrt(-2.0 * E);
    } else if (auto* c = std::get_if<Oscillator>(&m); c && r == Route::MP) {
        mu = 0.5 * (c->ell + 1.5);
        iz = -E / (2.0 * c->omega);
    } else if (auto* c = std::get_if<Morse>(&m); c && r == Route::MP) {
        const double al2 = c->alpha * c->alpha;
        mu = 0.5 + std::sqrt(-2.0 * E / al2);
        iz = -(2.0 * c->V1 / al2) / (2.0 * std::sqrt(2.0 * c->V0 / al2));
    } else if (std::holds_alternative<LogSpectrum>(m)) {
        const auto& c = std::get<LogSpectrum>(m);
        mu = c.mu;
        iz = -std::log(std::sqrt(2.0 * E) / c.lambda);
    } else {
        const PolynomialMap pm = map_to_polynomial(m, r, E, o);
        if (auto* f = std::get_if<ContinuousDualHahn>(&pm.family.v)) mu = f->mu;
        else if (auto* w = std::get_if<Wilson>(&pm.family.v)) mu = w->mu.real();
        else throw ValidationError("regime", "no pole condition for this route");
        iz = std::sqrt(std::max(0.0, -pm.argument));
    }
    return std::min(std::abs(k + mu + iz), std::abs(k + mu - iz));
}

ScatteringResult phase_shift(const PotentialModel& m, Route r, double E, const RouteOptions& o) {
    validate_model(m);
    check_route(m, r);
    need(E > 0.0 && std::isfinite(E), "phase shift needs E > 0");
    if (auto* c = std::get_if<Coulomb>(&m); c && r == Route::MP) {
        const PolynomialMap pm = map_to_polynomial(m, r, E, o);
        return closed_form_scattering(pm.family, pm.argument);
    }
    if (std::holds_alternative<Morse>(m) && r == Route::CDH) {
        const PolynomialMap pm = map_to_polynomial(m, r, E, o);
        return closed_form_scattering(pm.family, std::sqrt(pm.argument));
    }
    if (std::holds_alternative<PoschlTeller>(m) || std::holds_alternative<Eckart>(m) ||
        std::holds_alternative<RosenMorse>(m)) {
        need(o.a > 0.0, "basis parameter a must be > 0");
        const PolynomialMap pm = map_to_polynomial(m, r, E, o);
        return closed_form_scattering(pm.family, std::sqrt(pm.argument));
    }
    throw ValidationError("no_continuum", model_name(m) + " via " + route_name(r) + " has no scattering phase");
}

WavefunctionSample reconstruct_wavefunction(const PotentialModel& m, Route r, const std::string& label,
                                            const std::vector<double>& xGrid, int truncation, const RouteOptions& o) {
    validate_model(m);
    check_route(m, r);
    if (r != Route::MP || !(std::holds_alternative<Coulomb>(m) || std::holds_alternative<Oscillator>(m)))
        throw ValidationError("unsupported", "wavefunction reconstruction covers MP-route coulomb and oscillator");
    need(truncation >= 1, "truncation must be >= 1");
    const bool bound = label.rfind("k=", 0) == 0;
    if (!bound && label.rfind("E=", 0) != 0) throw ValidationError("domain", "energy label must be k=<int> or E=<value>");
    double val = 0.0;
    try {
        size_t pos = 0;
        val = std::stod(label.substr(2), &pos);
        if (pos != label.size() - 2) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ValidationError("domain", "cannot parse energy label '" + label + "'");
    }

    std::vector<double> coef(truncation);
    if (bound) {
        need(val >= 0.0 && val == std::floor(val), "k must be a non-negative integer");
        const int k = static_cast<int>(val);
        RouteOptions oo = o;
        oo.kmax = k + 1;
        const double E = bound_spectrum(m, r, oo).energies[k].value;
        const MeixnerMap mm = std::holds_alternative<Coulomb>(m) ? coulomb_meixner(std::get<Coulomb>(m), E)
                                                                 : oscillator_meixner(std::get<Oscillator>(m), E);
        if (mm.beta == 0.0) {
            // The basis scale matches this level: only phi_k survives, with the sign of the beta -> 0 limit.
            if (k < truncation) coef[k] = k % 2 ? -1.0 : 1.0;
        } else {
        const FamilyParams f = Meixner{mm.mu, mm.beta};
        const double lw = 2.0 * mm.mu * std::log1p(-mm.beta) + k * std::log(mm.beta) + std::lgamma(2.0 * mm.mu + k) -
                          std::lgamma(2.0 * mm.mu) - std::lgamma(k + 1.0);
        const double sw = std::exp(0.5 * lw);
        for (int n = 0; n < truncation; ++n)
            coef[n] = sw * (n % 2 && mm.sign < 0.0 ? -1.0 : 1.0) * poly_eval_closed(f, n, double(k));
        }
    } else {
        if (!std::holds_alternative<Coulomb>(m))
            throw ValidationError("regime", "oscillator has no scattering states");
        need(val > 0.0, "scattering energy must be > 0");
        const PolynomialMap pm = map_to_polynomial(m, r, val, o);
        const double rho = weight(pm.family).density(pm.argument);
        const auto P = poly_eval_all(pm.family, truncation - 1, pm.argument);
        for (int n = 0; n < truncation; ++n) coef[n] = std::sqrt(rho) * P[n];
    }

    const BasisSpec b = basis_spec(m, r, o);
    if (bound) {
        // The Meixner weights normalize against the basis' own measure; rescale to unit norm in x.
        const MatrixPair mp = hamiltonian_matrix(b, truncation);
        double n2 = 0.0;
        for (int i = 0; i < truncation; ++i)
            for (int j = std::max(0, i - 1); j <= std::min(truncation - 1, i + 1); ++j)
                n2 += coef[i] * coef[j] * b.norm(i) * b.norm(j) * mp.S(i, j) / (mp.scale[i] * mp.scale[j]);
        if (!(n2 > 0.0)) throw NumericalError("normalization", "bound-state expansion has zero norm");
        // Phase: psi > 0 next to the origin, where phi_n ~ A_n L_n(0) s^p.
        double lead = 0.0;
        for (int n = 0; n < truncation; ++n)
            lead += coef[n] * b.norm(n) *
                    std::exp(std::lgamma(n + b.nu + 1.0) - std::lgamma(n + 1.0) - std::lgamma(b.nu + 1.0));
        const double f = (lead < 0.0 ? -1.0 : 1.0) / std::sqrt(n2);
        for (double& c : coef) c *= f;
    }
    WavefunctionSample w;
    w.x = xGrid;
    w.truncation = truncation;
    w.energyLabel = label;
    w.values.reserve(xGrid.size());
    for (double x : xGrid) {
        double s = 0.0;
        for (int n = 0; n < truncation; ++n) s += coef[n] * basis_eval(b, n, x);
        w.values.push_back(s);
    }
    double tail = 0.0;
    for (int n = truncation - std::max(1, truncation / 10); n < truncation; ++n) tail += coef[n] * coef[n];
    w.tailEstimate = std::sqrt(tail);
    return w;
}

}  // namespace tra

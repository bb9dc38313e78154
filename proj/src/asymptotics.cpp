#include "tra/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tra/errors.hpp"

namespace tra {

namespace {

constexpr double kPi = std::numbers::pi;

// Real part of a sum of log-gammas; NaN when a normalization constant sits on a pole.
template <class... Z>
double log_gamma_sum(Z... z) {
    try {
        return (log_gamma_complex(cplx(z)).real() + ...);
    } catch (const ValidationError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

void require_continuous(const FamilyParams& p, bool allowMixed = false) {
    validate(p);
    if (!is_continuous(p)) throw ValidationError("regime", family_name(p) + ": no continuous asymptotics");
    if (allowMixed) return;
    if (auto* f = std::get_if<ContinuousDualHahn>(&p.v); f && f->mu < 0.0)
        throw ValidationError("regime", "continuous-dual-hahn: mu < 0 is a mixed regime");
    if (auto* f = std::get_if<Wilson>(&p.v); f && f->mu.real() < 0.0)
        throw ValidationError("regime", "wilson: mu < 0 is a mixed regime");
}

void require_positive_z(const FamilyParams& p, double z) {
    if (!std::holds_alternative<MeixnerPollaczek>(p.v) && !(z > 0.0))
        throw ValidationError("domain", family_name(p) + ": z must be > 0");
}

}  // namespace

double wrap_phase(double x) {
    double r = std::remainder(x, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

double AsymptoticModel::phase_base(int n, double z) const {
    if (auto* f = std::get_if<MeixnerPollaczek>(&family.v))
        return (n + f->mu) * f->theta - f->mu * kPi / 2.0 - z * std::log(2.0 * n * std::sin(f->theta));
    if (std::holds_alternative<ContinuousDualHahn>(family.v)) return z * std::log(double(n));
    return 2.0 * z * std::log(double(n));
}

AsymptoticModel asymptotic_model(const FamilyParams& p) {
    require_continuous(p);
    AsymptoticModel m;
    m.family = p;
    if (std::holds_alternative<MeixnerPollaczek>(p.v))
        m.phaseForm = "(n+mu)*theta + arg Gamma(mu+iz) - mu*pi/2 - z*ln(2n sin(theta))";
    else if (std::holds_alternative<ContinuousDualHahn>(p.v))
        m.phaseForm = "z*ln(n) + arg[Gamma(2iz)/(Gamma(mu+iz)Gamma(a+iz)Gamma(b+iz))]";
    else
        m.phaseForm = "2z*ln(n) + arg[Gamma(2iz)/(Gamma(mu+iz)Gamma(nu+iz)Gamma(a+iz)Gamma(b+iz))]";
    return m;
}

ScatteringResult closed_form_scattering(const FamilyParams& p, double z) {
    // mu < 0 adds bound states but leaves the continuum formula intact.
    require_continuous(p, true);
    require_positive_z(p, z);
    const cplx iz(0.0, z);
    ScatteringResult r;
    r.method = ScatteringMethod::ClosedForm;
    if (auto* f = std::get_if<MeixnerPollaczek>(&p.v)) {
        const cplx g = log_gamma_complex(f->mu + iz);
        const double lformula =
            std::log(2.0) + (kPi / 2.0 - f->theta) * z - f->mu * std::log(2.0 * std::sin(f->theta)) - g.real();
        r.formulaAmplitude = std::exp(lformula);
        // formulaAmplitude belongs to the monic-ratio normalization; the
        // orthonormal polynomial carries an extra sqrt(Gamma(2 mu)).
        r.amplitude = std::exp(lformula + 0.5 * std::lgamma(2.0 * f->mu));
        r.phase = wrap_phase(g.imag());
        return r;
    }
    if (auto* f = std::get_if<ContinuousDualHahn>(&p.v)) {
        const cplx L = log_gamma_complex(2.0 * iz) - log_gamma_complex(f->mu + iz) - log_gamma_complex(f->a + iz) -
                       log_gamma_complex(f->b + iz);
        const double lnorm = 0.5 * log_gamma_sum(f->mu + f->a, f->mu + f->b, f->a + f->b);
        r.amplitude = r.formulaAmplitude = 2.0 * std::exp(lnorm + L.real());
        r.phase = wrap_phase(L.imag());
        return r;
    }
    const auto& w = std::get<Wilson>(p.v);
    const cplx L = log_gamma_complex(2.0 * iz) - log_gamma_complex(w.mu + iz) - log_gamma_complex(w.nu + iz) -
                   log_gamma_complex(w.a + iz) - log_gamma_complex(w.b + iz);
    const double lB = log_gamma_sum(w.mu + w.nu, w.a + w.b, w.mu + w.a, w.mu + w.b, w.nu + w.a, w.nu + w.b) -
                      log_gamma_sum(w.mu + w.nu + w.a + w.b);
    r.amplitude = 2.0 * std::sqrt(2.0) * std::exp(0.5 * lB + L.real());
    r.formulaAmplitude = r.amplitude;
    r.phase = wrap_phase(L.imag());
    return r;
}

double inverse_gamma_envelope(const FamilyParams& p, cplx z) {
    double mu = 0.0;
    if (auto* f = std::get_if<MeixnerPollaczek>(&p.v)) mu = f->mu;
    else if (auto* f = std::get_if<ContinuousDualHahn>(&p.v)) mu = f->mu;
    else if (auto* f = std::get_if<Wilson>(&p.v)) mu = f->mu.real();
    else throw ValidationError("regime", family_name(p) + ": no continuous asymptotics");
    const cplx w = mu + cplx(0.0, 1.0) * z;
    const double re = w.real();
    if (std::abs(w.imag()) == 0.0 && re <= 0.0 && re == std::floor(re)) return 0.0;
    return std::exp(-log_gamma_complex(w).real());
}

std::vector<std::pair<int, double>> evaluate_large_n(const FamilyParams& p, double z, const NRange& r) {
    require_continuous(p);
    if (r.lo < 0 || r.hi > 100000 || r.lo >= r.hi || r.samples < 2)
        throw ValidationError("domain", "degree range must satisfy 0 <= lo < hi <= 1e5, samples >= 2");
    const double arg = std::holds_alternative<MeixnerPollaczek>(p.v) ? z : z * z;
    const auto P = poly_eval_all_ld(p, r.hi, arg);
    const int count = std::min(r.samples, r.hi - r.lo + 1);
    std::vector<std::pair<int, double>> out;
    out.reserve(count);
    int last = -1;
    for (int i = 0; i < count; ++i) {
        const int n = r.lo + static_cast<int>(std::llround(double(i) * (r.hi - r.lo) / (count - 1)));
        if (n == last) continue;
        out.emplace_back(n, double(P[n]));
        last = n;
    }
    return out;
}

namespace {

// Mean over octaves of max sqrt(n)|P_n|.
double octave_envelope(const std::vector<std::pair<int, double>>& v) {
    double sum = 0.0;
    int octaves = 0;
    for (int lo = std::max(1, v.front().first); lo <= v.back().first; lo *= 2) {
        double mx = 0.0;
        int cnt = 0;
        for (const auto& [n, val] : v)
            if (n >= lo && n < 2 * lo) {
                mx = std::max(mx, std::sqrt(double(n)) * std::abs(val));
                ++cnt;
            }
        if (cnt >= 8) {
            sum += mx;
            ++octaves;
        }
    }
    return octaves ? sum / octaves : 0.0;
}

}  // namespace

ScatteringResult fit_scattering(const FamilyParams& p, double z, const NRange& r) {
    require_positive_z(p, z);
    const AsymptoticModel m = asymptotic_model(p);
    const auto v = evaluate_large_n(p, z, r);

    // sqrt(n) P_n = (c1 + d1/n) cos(phi) - (c2 + d2/n) sin(phi). The 1/n columns
    // absorb the leading correction to the asymptotic form; without them the
    // phase is biased by about 2.5e-4 z at n ~ 1e3.
    std::vector<int> ns;
    for (const auto& [n, val] : v)
        if (n >= 1) ns.push_back(n);
    Eigen::MatrixXd X(ns.size(), 4);
    Eigen::VectorXd y(ns.size());
    for (std::size_t i = 0, j = 0; i < v.size(); ++i) {
        const auto [n, val] = v[i];
        if (n < 1) continue;
        const double ph = m.phase_base(n, z), c = std::cos(ph), s = -std::sin(ph);
        X.row(j) << c, s, c / n, s / n;
        y(j++) = std::sqrt(double(n)) * val;
    }
    const Eigen::VectorXd cn = X.colwise().norm();
    const Eigen::MatrixXd Xs = X * cn.cwiseInverse().asDiagonal();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-8 * sv(0)))
        throw NumericalError("ill_conditioned_fit",
                             family_name(p) + ": cosine and sine columns are nearly dependent at this z");
    const Eigen::VectorXd coef = svd.solve(y).cwiseQuotient(cn);
    const double c1 = coef(0), c2 = coef(1);

    ScatteringResult res;
    res.method = ScatteringMethod::Fitted;
    res.amplitude = std::hypot(c1, c2);
    res.phase = wrap_phase(std::atan2(c2, c1));
    const double rms = (X * coef - y).norm() / std::sqrt(double(std::max<Eigen::Index>(y.size(), 1)));
    res.residual = res.amplitude > 0.0 ? rms / res.amplitude : 0.0;
    res.envelope = octave_envelope(v);
    return res;
}

double envelope_slope(const FamilyParams& p, double z, const NRange& r) {
    require_positive_z(p, z);
    const AsymptoticModel m = asymptotic_model(p);
    const double delta = fit_scattering(p, z, r).phase;
    NRange dense = r;
    dense.samples = r.hi - r.lo + 1;
    // Running envelope |P_n| / |cos(phase)| away from the cosine's zeros; the
    // log-n phases of CDH and Wilson move too slowly for raw octave maxima.
    std::vector<std::pair<int, double>> env;
    for (const auto& [n, val] : evaluate_large_n(p, z, dense)) {
        if (n < 1) continue;
        const double c = std::cos(m.phase_base(n, z) + delta);
        if (std::abs(c) >= 0.5) env.emplace_back(n, std::abs(val / c));
    }
    std::vector<double> lx, ly;
    for (int lo = std::max(1, r.lo); lo <= r.hi; lo *= 2) {
        double mx = 0.0;
        int at = 0, cnt = 0;
        for (const auto& [n, e] : env)
            if (n >= lo && n < 2 * lo) {
                ++cnt;
                if (e > mx) {
                    mx = e;
                    at = n;
                }
            }
        if (cnt >= 8) {
            lx.push_back(std::log(double(at)));
            ly.push_back(std::log(mx));
        }
    }
    if (lx.size() < 2) throw ValidationError("domain", "envelope slope needs at least two octaves");
    const double k = double(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

std::vector<ScatteringResult> scan_scattering(const FamilyParams& p, const std::vector<double>& zs,
                                              const NRange& r, bool parallel) {
    std::vector<ScatteringResult> out(zs.size());
    const long n = static_cast<long>(zs.size());
    std::vector<std::string> errors(zs.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = fit_scattering(p, zs[i], r);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (long i = 0; i < n; ++i)
        if (!errors[i].empty()) throw NumericalError("scan_failure", "z=" + std::to_string(zs[i]) + ": " + errors[i]);
    return out;
}

}  // namespace tra

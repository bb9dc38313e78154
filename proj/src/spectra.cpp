#include "tra/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tra/errors.hpp"

namespace tra {

namespace {

bool near_integer(double v) { return std::abs(v - std::round(v)) <= 1e-12 * (1.0 + std::abs(v)); }

// x = (k + c)^2 has two roots; keep the one on the finite grid, closest to an integer.
long double shifted_square_root(long double x, long double c, int N) {
    const long double r = std::sqrt(std::max(0.0L, x));
    const long double k1 = r - c, k2 = -r - c;
    auto score = [N](long double k) {
        if (k < -0.5L || k > N + 0.5L) return 1e300L;
        return std::abs(k - std::round(k));
    };
    return score(k1) <= score(k2) ? k1 : k2;
}

void check_size(const FamilyParams& p, int M) {
    if (M < 1) throw ValidationError("domain", "matrix size must be >= 1");
    if (auto sz = finite_size(p); sz && M > *sz)
        throw ValidationError("degree_out_of_range", family_name(p) + ": M exceeds N+1");
}

}  // namespace

SpectrumResult spectrum_points(const FamilyParams& p, int kmax) {
    validate(p);
    SpectrumResult r;
    double mu = 0.0;
    if (auto* f = std::get_if<ContinuousDualHahn>(&p.v)) {
        mu = f->mu;
        r.sourceFormula = "continuous-dual-hahn z_k^2 = -(k+mu)^2";
    } else if (auto* w = std::get_if<Wilson>(&p.v)) {
        mu = w->mu.real();
        r.sourceFormula = "wilson z_k^2 = -(k+mu)^2";
    } else if (auto* m = std::get_if<MeixnerPollaczek>(&p.v)) {
        mu = m->mu;
        r.sourceFormula = "meixner-pollaczek z_k^2 = -(k+mu)^2";
    } else if (auto* m2 = std::get_if<Meixner>(&p.v)) {
        mu = m2->mu;
        r.sourceFormula = "meixner z_k^2 = -(k+mu)^2";
    } else {
        throw ValidationError("regime", family_name(p) + ": no bound-state spectrum formula");
    }

    const bool infinite = std::holds_alternative<MeixnerPollaczek>(p.v) || std::holds_alternative<Meixner>(p.v);
    if (infinite) {
        if (kmax < 1) throw ValidationError("domain", "kmax must be >= 1");
        for (int k = 0; k < kmax; ++k) r.energies.push_back({k, -(k + mu) * (k + mu)});
        return r;
    }
    if (!(mu < 0.0)) throw ValidationError("regime", family_name(p) + ": finite spectrum needs mu < 0");
    r.finite = true;
    r.N = static_cast<int>(std::floor(-mu + 1e-12 * (1.0 - mu)));
    r.boundary = near_integer(-mu);
    for (int k = 0; k <= r.N; ++k) r.energies.push_back({k, -(k + mu) * (k + mu)});
    return r;
}

Eigen::MatrixXd jacobi_matrix(const FamilyParams& p, int M) {
    check_size(p, M);
    const RecurrenceCoefficients rc(p);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(M, M);
    for (int n = 0; n < M; ++n) {
        J(n, n) = rc.diag(n);
        if (n + 1 < M) {
            J(n, n + 1) = rc.sup(n);
            J(n + 1, n) = rc.sub(n + 1);
        }
    }
    return J;
}

long double natural_argument(const FamilyParams& p, long double x) {
    if (auto* f = std::get_if<MeixnerPollaczek>(&p.v)) return x / std::sin((long double)f->theta);
    if (auto* f = std::get_if<Meixner>(&p.v)) return x / (f->beta - 1.0L);
    if (auto* f = std::get_if<DualHahn>(&p.v))
        return shifted_square_root(x, 0.5L * (f->alpha + (long double)f->beta + 1.0L), f->N);
    if (auto* f = std::get_if<Racah>(&p.v))
        return shifted_square_root(x, 0.5L * (f->gamma - (long double)f->beta - f->N), f->N);
    return x;
}

QuadratureRuleLD gauss_rule_ld(const FamilyParams& p, int M) {
    check_size(p, M);
    const RecurrenceCoefficients rc(p);
    if (!rc.symmetric()) throw ValidationError("unsupported_family", "h-poly: no known measure");
    std::vector<long double> d(M), e(M);
    for (int n = 0; n < M; ++n) {
        d[n] = rc.diag_ld(n);
        e[n] = std::abs(rc.upper_ld(n));
    }
    QuadratureRuleLD g = gauss_from_recurrence(d, e, 1.0L);
    for (auto& x : g.nodes) x = natural_argument(p, x);
    std::vector<int> idx(M);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return g.nodes[a] < g.nodes[b]; });
    QuadratureRuleLD out;
    for (int i : idx) {
        out.nodes.push_back(g.nodes[i]);
        out.weights.push_back(g.weights[i]);
    }
    return out;
}

QuadratureRule gauss_rule(const FamilyParams& p, int M) {
    const QuadratureRuleLD g = gauss_rule_ld(p, M);
    QuadratureRule r;
    r.nodes.assign(g.nodes.begin(), g.nodes.end());
    r.weights.assign(g.weights.begin(), g.weights.end());
    r.order = M;
    return r;
}

double gauss_pairing(const FamilyParams& p, int M, int n, int m) {
    if (n + m > 2 * M - 1) throw ValidationError("domain", "gauss pairing needs n+m <= 2M-1");
    const QuadratureRuleLD g = gauss_rule_ld(p, M);
    const int top = std::max(n, m);
    long double s = 0.0L;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const auto P = poly_eval_all_ld(p, top, g.nodes[i]);
        s += g.weights[i] * P[n] * P[m];
    }
    return double(s);
}

double measure_crosscheck(const FamilyParams& p, int M, int n, int m, const QuadOptions& q) {
    const double G = gauss_pairing(p, M, n, m);
    const double delta = n == m ? 1.0 : 0.0;
    const auto D = orthogonality_gram(p, std::max(n, m), q);
    return std::max(std::abs(G - delta), std::abs(G - D[n][m]));
}

MixedNodeReport mixed_regime_nodes(const FamilyParams& p, int M) {
    const SpectrumResult s = spectrum_points(p);
    if (!s.finite) throw ValidationError("regime", "mixed-regime report needs CDH or Wilson with mu < 0");
    MixedNodeReport r;
    const QuadratureRuleLD g = gauss_rule_ld(p, M);
    r.nodes.assign(g.nodes.begin(), g.nodes.end());
    for (const auto& e : s.energies) r.closedFormPoints.push_back(e.value);
    return r;
}

}  // namespace tra

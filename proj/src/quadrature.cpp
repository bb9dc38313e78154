#include "tra/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "tra/errors.hpp"

namespace tra {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

struct Node {
    double x = 0.0;
    double w = 0.0;   // dx/dt
    bool skip = false;
};

Node map_node(double t, DEDomain d, double a, double b, double cutoff) {
    Node n;
    switch (d) {
        case DEDomain::RealLine: {
            const double s = kHalfPi * std::sinh(t);
            n.x = std::sinh(s);
            n.w = kHalfPi * std::cosh(t) * std::cosh(s);
            n.skip = std::abs(n.x) > cutoff;
            break;
        }
        case DEDomain::HalfLine: {
            const double s = kHalfPi * std::sinh(t);
            const double e = std::exp(s);
            n.x = a + e;
            n.w = e * kHalfPi * std::cosh(t);
            n.skip = e > cutoff || e == 0.0;
            break;
        }
        case DEDomain::Interval: {
            const double s = kHalfPi * std::sinh(t);
            const double c = std::cosh(s);
            const double half = 0.5 * (b - a);
            n.x = 0.5 * (a + b) + half * std::tanh(s);
            n.w = half * kHalfPi * std::cosh(t) / (c * c);
            n.skip = n.w == 0.0 || n.x <= a || n.x >= b;
            break;
        }
    }
    return n;
}

// t-range that covers the useful part of each map.
std::pair<double, double> t_range(DEDomain d, double cutoff) {
    switch (d) {
        case DEDomain::RealLine: {
            const double t = std::asinh(std::asinh(cutoff) / kHalfPi);
            return {-t, t};
        }
        case DEDomain::HalfLine:
            // lower end at x - a = e^{-60}
            return {std::asinh(-60.0 / kHalfPi), std::asinh(std::log(cutoff) / kHalfPi)};
        case DEDomain::Interval:
            return {-3.2, 3.2};
    }
    return {0.0, 0.0};
}

}  // namespace

DEResult de_integrate(const std::function<void(double, double*)>& f, int dim, DEDomain domain,
                      double a, double b, const DEOptions& opt) {
    const auto [tlo, thi] = t_range(domain, opt.cutoff);
    double h = 0.5;
    std::vector<double> sum(dim, 0.0);      // sum of f*w over all nodes so far
    std::vector<double> prev(dim, 0.0);
    std::vector<double> cur(dim, 0.0);
    DEResult res;

    std::vector<double> ts;
    auto eval_nodes = [&](const std::vector<double>& tt) {
        std::vector<double> buf(tt.size() * dim, 0.0);
        const long nt = static_cast<long>(tt.size());
#pragma omp parallel for schedule(static) if (opt.parallel)
        for (long i = 0; i < nt; ++i) {
            const Node nd = map_node(tt[i], domain, a, b, opt.cutoff);
            if (nd.skip) continue;
            double* out = &buf[i * dim];
            f(nd.x, out);
            for (int j = 0; j < dim; ++j) out[j] *= nd.w;
        }
        for (long i = 0; i < nt; ++i)
            for (int j = 0; j < dim; ++j) {
                const double v = buf[i * dim + j];
                if (std::isfinite(v)) sum[j] += v;
            }
        res.evaluations += nt;
    };

    // level 0: all multiples of h inside the range
    for (long k = static_cast<long>(std::floor(tlo / h)); k * h <= thi; ++k) ts.push_back(k * h);
    eval_nodes(ts);
    for (int j = 0; j < dim; ++j) cur[j] = h * sum[j];

    for (int level = 1; level <= opt.maxLevel; ++level) {
        prev = cur;
        h *= 0.5;
        ts.clear();
        for (long k = static_cast<long>(std::floor(tlo / h)); k * h <= thi; ++k)
            if (k % 2 != 0) ts.push_back(k * h);
        eval_nodes(ts);
        double change = 0.0, scale = 1.0;
        for (int j = 0; j < dim; ++j) {
            cur[j] = h * sum[j];
            change = std::max(change, std::abs(cur[j] - prev[j]));
            scale = std::max(scale, std::abs(cur[j]));
        }
        res.level = level;
        res.change = change;
        if (level >= opt.minLevel && change <= opt.tol * scale) {
            res.converged = true;
            break;
        }
    }
    res.value = cur;
    return res;
}

QuadratureRuleLD gauss_from_recurrence(const std::vector<long double>& diag,
                                       const std::vector<long double>& off, long double mu0) {
    const int n = static_cast<int>(diag.size());
    QuadratureRuleLD r;
    if (n == 0) return r;
    using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    VecL d(n), e(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) d[i] = diag[i];
    for (int i = 0; i + 1 < n; ++i) e[i] = off[i];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver", "tridiagonal eigensolver failed");

    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const long double x = es.eigenvalues()[i];
        // Christoffel sum with running rescaling against overflow.
        long double pm = 0.0L, p = 1.0L, s = 1.0L, logscale = 0.0L;
        for (int k = 0; k + 1 < n; ++k) {
            long double pn = ((x - diag[k]) * p - (k > 0 ? off[k - 1] * pm : 0.0L)) / off[k];
            pm = p;
            p = pn;
            s += p * p;
            if (s > 1e1000L) {
                s *= 1e-1000L;
                p *= 1e-500L;
                pm *= 1e-500L;
                logscale += 1000.0L * std::log(10.0L);
            }
        }
        r.nodes[i] = x;
        r.weights[i] = mu0 / s * std::exp(-logscale);
    }
    return r;
}

QuadratureRuleLD gauss_laguerre(int n, long double alpha) {
    std::vector<long double> d(n), e(n);
    for (int k = 0; k < n; ++k) {
        d[k] = 2.0L * k + alpha + 1.0L;
        e[k] = std::sqrt((k + 1.0L) * (k + 1.0L + alpha));
    }
    return gauss_from_recurrence(d, e, std::tgamma(alpha + 1.0L));
}

QuadratureRuleLD gauss_jacobi(int n, long double a, long double b) {
    std::vector<long double> d(n), e(n);
    for (int k = 0; k < n; ++k) {
        const long double c = 2.0L * k + a + b;
        if (k == 0) {
            d[k] = (b - a) / (a + b + 2.0L);
            e[k] = std::sqrt(4.0L * (a + 1.0L) * (b + 1.0L) / ((a + b + 2.0L) * (a + b + 2.0L) * (a + b + 3.0L)));
        } else {
            d[k] = (b * b - a * a) / (c * (c + 2.0L));
            e[k] = 2.0L / (c + 2.0L) *
                   std::sqrt((k + 1.0L) * (k + a + 1.0L) * (k + b + 1.0L) * (k + a + b + 1.0L) /
                             ((c + 1.0L) * (c + 3.0L)));
        }
    }
    const long double lmu0 = (a + b + 1.0L) * std::log(2.0L) + std::lgamma(a + 1.0L) +
                             std::lgamma(b + 1.0L) - std::lgamma(a + b + 2.0L);
    return gauss_from_recurrence(d, e, std::exp(lmu0));
}

}  // namespace tra

#pragma once

#include <functional>
#include <vector>

namespace tra {

enum class DEDomain { RealLine, HalfLine, Interval };

struct DEResult {
    std::vector<double> value;
    int level = 0;
    double change = 0.0;   // max |S_level - S_{level-1}|
    bool converged = false;
    long evaluations = 0;
};

struct DEOptions {
    double tol = 1e-10;     // relative agreement of two successive levels
    int minLevel = 2;
    int maxLevel = 10;
    double cutoff = 2000.0; // |x| beyond this counts as zero (integrands decay exponentially)
    bool parallel = true;
};

/// Double-exponential trapezoid for a vector-valued integrand f(x, out[dim]).
/// sinh-sinh on the real line, exp-sinh on (a, inf), tanh-sinh on [a, b].
/// Each level halves the step. New nodes are evaluated (in parallel if asked)
/// into a buffer and summed in index order, so results do not depend on the
/// thread count.
DEResult de_integrate(const std::function<void(double, double*)>& f, int dim, DEDomain domain,
                      double a = 0.0, double b = 0.0, const DEOptions& opt = {});

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;
};

struct QuadratureRuleLD {
    std::vector<long double> nodes;
    std::vector<long double> weights;
};

/// Gauss rule for the measure whose orthonormal polynomials satisfy
/// x p_k = diag[k] p_k + off[k-1] p_{k-1} + off[k] p_{k+1}; mu0 is the total mass.
/// Nodes from the symmetric tridiagonal eigenproblem, weights from the
/// Christoffel sum mu0 / sum_k p_k(x_i)^2.
QuadratureRuleLD gauss_from_recurrence(const std::vector<long double>& diag,
                                       const std::vector<long double>& off, long double mu0);

/// Weight x^alpha e^{-x} on (0, inf).
QuadratureRuleLD gauss_laguerre(int n, long double alpha);
/// Weight (1-x)^a (1+x)^b on [-1, 1].
QuadratureRuleLD gauss_jacobi(int n, long double a, long double b);

}  // namespace tra

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tra/polyfam.hpp"
#include "tra/quadrature.hpp"

namespace tra {

struct SpectrumPoint {
    int k = 0;
    double value = 0.0;
};

struct SpectrumResult {
    std::vector<SpectrumPoint> energies;
    bool finite = false;
    int N = -1;               // largest index when finite
    bool boundary = false;    // -mu is an integer, so the top point sits at zero
    std::string sourceFormula;
    std::vector<double> eps;  // dimensionless eps_k where the formula is written in eps
};

/// z_k^2 = -(k+mu)^2. Finite (k = 0..floor(-mu)) for CDH and Wilson with mu < 0;
/// for MP and Meixner the list is unbounded and truncated at kmax points.
SpectrumResult spectrum_points(const FamilyParams& p, int kmax = 20);

/// M x M tridiagonal matrix in the recursion's left-side variable:
/// J(n,n) = diag(n), J(n,n+1) = sup(n), J(n+1,n) = sub(n+1).
Eigen::MatrixXd jacobi_matrix(const FamilyParams& p, int M);

/// Maps a recursion variable x back to the family's natural argument
/// (z for MP, z^2 for CDH/Wilson, k for the discrete families).
long double natural_argument(const FamilyParams& p, long double x);

/// Gauss rule from the Jacobi matrix; nodes in the natural argument, ascending.
QuadratureRuleLD gauss_rule_ld(const FamilyParams& p, int M);
QuadratureRule gauss_rule(const FamilyParams& p, int M);

/// Pairing of P_n, P_m under the M-point Gauss rule.
double gauss_pairing(const FamilyParams& p, int M, int n, int m);

/// max(|G - delta_nm|, |G - D|) where G is the Gauss pairing (recursion only)
/// and D the direct quadrature against the closed-form weight.
double measure_crosscheck(const FamilyParams& p, int M, int n, int m, const QuadOptions& q = {});

/// Mixed regimes: raw Jacobi-matrix nodes next to the closed-form discrete points.
struct MixedNodeReport {
    std::vector<double> nodes;
    std::vector<double> closedFormPoints;
};
MixedNodeReport mixed_regime_nodes(const FamilyParams& p, int M);

}  // namespace tra

#pragma once

#include <complex>
#include <vector>

namespace tra {

using cplx = std::complex<double>;

/// Principal branch of log Gamma(z). Throws ValidationError("pole") at
/// non-positive integers and ValidationError("domain") on non-finite input.
cplx log_gamma_complex(cplx z);

/// arg Gamma(z) on the principal branch of log Gamma (not reduced mod 2pi).
double arg_gamma(cplx z);

/// Rising factorial (a)_n.
cplx pochhammer(cplx a, int n);

/// Log of |(a)_n| for real a; used where (a)_n overflows.
double log_abs_pochhammer(double a, int n);

struct HypSeriesSpec {
    std::vector<cplx> upper;   // one entry must equal -terminationIndex
    std::vector<cplx> lower;
    cplx argument{0.0, 0.0};
    int terminationIndex = 0;
};

inline constexpr int kDefaultDegreeCap = 200;

/// Terminating pFq sum by forward term ratios.
cplx hyp_terminating(const HypSeriesSpec& spec, int degreeCap = kDefaultDegreeCap);

/// Associated Laguerre L_n^nu(x).
double laguerre_eval(int n, double nu, double x);
long double laguerre_eval_ld(int n, long double nu, long double x);

/// Jacobi P_n^(sigma,tau)(y).
double jacobi_eval(int n, double sigma, double tau, double y);
long double jacobi_eval_ld(int n, long double sigma, long double tau, long double y);

}  // namespace tra

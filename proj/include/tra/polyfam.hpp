#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tra/specfun.hpp"

namespace tra {

struct MeixnerPollaczek { double mu = 1.0; double theta = 1.0; };   // z on the real line
struct Meixner { double mu = 1.0; double beta = 0.5; };              // k = 0, 1, 2, ...
struct Krawtchouk { int N = 1; double gamma = 0.5; };                // k = 0..N
struct ContinuousDualHahn { double mu = 1.0; cplx a{1.0}; cplx b{1.0}; };  // argument z^2
struct DualHahn { int N = 1; double alpha = 0.0; double beta = 0.0; };     // k = 0..N
// mu and nu are complex so the Eckart map (mu, nu conjugate) fits; argument z^2.
struct Wilson { cplx mu{1.0}; cplx nu{1.0}; cplx a{1.0}; cplx b{1.0}; };
struct Racah { int N = 1; double alpha = 0.0; double beta = 0.0; double gamma = 0.0; };  // k = 0..N
struct HPoly { double mu = 0.0; double nu = 0.0; double alpha = 0.0; double theta = 1.0; };  // z real

using FamilyVariant = std::variant<MeixnerPollaczek, Meixner, Krawtchouk, ContinuousDualHahn,
                                   DualHahn, Wilson, Racah, HPoly>;

struct FamilyParams {
    FamilyVariant v;
    // Skips range checks (the escape hatch for exploring mu < 0 and other
    // regimes outside the stated parameter ranges).
    bool unchecked = false;

    FamilyParams() = default;
    template <class T>
        requires std::is_constructible_v<FamilyVariant, T>
    FamilyParams(T t, bool skipChecks = false) : v(std::move(t)), unchecked(skipChecks) {}
};

std::string family_name(const FamilyParams& p);
bool is_continuous(const FamilyParams& p);   // MP, CDH, Wilson
bool is_discrete(const FamilyParams& p);     // Meixner, Krawtchouk, DualHahn, Racah
std::optional<int> finite_size(const FamilyParams& p);  // N+1 for finite families

/// Throws ValidationError("parameter_range") unless p.unchecked.
void validate(const FamilyParams& p);

/// x P_n = diag(n) P_n + lower(n) P_{n-1} + upper(n) P_{n+1}, with x = lhs(arg).
/// sub(n) = |lower(n)|, sup(n) = |upper(n)| and sign(n) = sign of upper(n).
/// Symmetric families have lower(n+1) = upper(n). HPoly is written in the
/// z-form of its recursion and is not symmetric.
class RecurrenceCoefficients {
public:
    explicit RecurrenceCoefficients(FamilyParams p);
    double diag(int n) const { return double(diag_ld(n)); }
    double upper(int n) const { return double(upper_ld(n)); }
    double lower(int n) const { return double(lower_ld(n)); }
    long double diag_ld(int n) const;
    long double upper_ld(int n) const;
    long double lower_ld(int n) const;
    double sup(int n) const { return std::abs(upper(n)); }
    double sub(int n) const { return n == 0 ? 0.0 : std::abs(lower(n)); }
    int sign(int n) const { return upper(n) < 0.0 ? -1 : 1; }
    bool symmetric() const;
    /// Left-side variable of the recursion at the family's natural argument.
    long double lhs(long double arg) const;
    const std::string& variableMap() const { return map_; }
    const FamilyParams& params() const { return p_; }

private:
    FamilyParams p_;
    std::string map_;
};

RecurrenceCoefficients recurrence_coeffs(const FamilyParams& p);

/// Natural arguments: MP z, Meixner/Krawtchouk/DualHahn/Racah k, CDH/Wilson z^2, HPoly z.
double poly_eval_recursion(const FamilyParams& p, int n, double arg);
/// P_0..P_nmax at one argument (long double internally).
std::vector<double> poly_eval_all(const FamilyParams& p, int nmax, double arg);
std::vector<long double> poly_eval_all_ld(const FamilyParams& p, int nmax, long double arg);
/// Sign and log|P_n| for the exponentially growing region.
std::pair<int, double> poly_eval_log(const FamilyParams& p, int n, double arg);

double poly_eval_closed(const FamilyParams& p, int n, double arg);

/// Renormalized Racah polynomial (alpha+1)_n (gamma+1)_n / ((alpha+beta+N+2)_n n!) 4F3(...).
double racah_renormalized_eval(const Racah& p, int n, double k);

double h_poly_eval(const HPoly& p, int n, double z);

struct WeightSpec {
    enum class Kind { Continuous, Discrete, Mixed };
    Kind kind = Kind::Continuous;
    double lo = 0.0, hi = 0.0;                       // continuous support in z
    std::vector<std::pair<double, double>> masses;   // (argument, mass)
    FamilyParams params;
    double log_density(double z) const;
    double density(double z) const;
};

WeightSpec weight(const FamilyParams& p);

/// Discrete masses of the generalized relations (B3/C4 form), at z^2 = -(k+mu)^2.
/// Masses carry their sign, so <P_n,P_m> = integral + sum(mass P_n P_m).
std::vector<std::pair<double, double>> mixed_masses(const FamilyParams& p);

struct QuadOptions {
    double tol = 1e-10;
    int maxLevel = 10;
    bool parallel = true;
    int kmaxCap = 200000;   // Meixner truncation cap
};

/// Gram matrix <P_n,P_m>, n,m <= nmax, against the family's weight.
std::vector<std::vector<double>> orthogonality_gram(const FamilyParams& p, int nmax,
                                                    const QuadOptions& q = {});
double orthogonality_defect(const FamilyParams& p, int n, int m, const QuadOptions& q = {});
double dual_orthogonality_defect(const FamilyParams& p, int n, int m);
std::vector<std::vector<double>> generalized_orthogonality_gram(const FamilyParams& p, int nmax,
                                                                const QuadOptions& q = {});
double generalized_orthogonality_defect(const FamilyParams& p, int n, int m,
                                        const QuadOptions& q = {});

/// Terms kept by the Meixner truncation rule for the given degree bound.
int meixner_kmax(const Meixner& p, int nmax, int cap = 200000);

}  // namespace tra

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tra/asymptotics.hpp"
#include "tra/polyfam.hpp"
#include "tra/spectra.hpp"

namespace tra {

// Atomic units throughout. Attractive Coulomb is Z < 0.
struct Coulomb { double Z = -1.0; int ell = 0; double lambda = 1.0; };
struct Oscillator { double omega = 1.0; int ell = 0; double lambda = 1.0; };
// V(x) = V0 e^{2 alpha x} + V1 e^{alpha x}
struct Morse { double V0 = 0.125; double V1 = -1.0; double alpha = 1.0; };
// V(x) = V0 / cosh^2(lambda x) + V1 / sinh^2(lambda x), x >= 0
struct PoschlTeller { double V0 = -12.0; double V1 = 1.0; double lambda = 1.0; };
// V(x) = V0 + (V+ - V- sin(lambda x)) / cos^2(lambda x), |x| <= pi / (2 lambda)
struct TrigScarf { double V0 = 0.0; double Vplus = 3.0; double Vminus = 1.0; double lambda = 1.0; };
// V(x) = [V0 + V1 / (1 - e^{-lambda x})] / (e^{lambda x} - 1), x >= 0
struct Eckart { double V0 = -6.0; double V1 = 1.0; double lambda = 1.0; };
// (2 / lambda^2) V(x) = [(B^2 + A^2 + A) - B (2A + 1) cosh(lambda x)] / sinh^2(lambda x), x >= 0
struct RosenMorse { double A = 2.5; double B = 60.0; double lambda = 1.0; };
// E_k = lambda^2 e^{-2(k+mu)} / 2, mu < 0
struct LogSpectrum { double mu = -3.0; double lambda = 1.0; };
// Rows 1..7 of the H_n class table. Rows 1, 2 and 6 are written with L, and
// lambda stands for pi/L, 1/L and 2pi/L there. E is the energy that fixes the
// basis on the energy-dependent rows (3, 4, 5).
struct Table1Entry {
    int row = 1;
    double V0 = 1.0, V1 = 0.5, Vplus = 2.0, Vminus = 1.0;
    double lambda = 1.0;
    double E = -1.0;
};

using PotentialModel = std::variant<Coulomb, Oscillator, Morse, PoschlTeller, TrigScarf, Eckart, RosenMorse,
                                    LogSpectrum, Table1Entry>;

enum class Route { MP, CDH, Wilson };

struct RouteOptions {
    double a = 0.5;        // Wilson-route a = b
    std::optional<double> nu;   // CDH-route Laguerre index (a = b = (nu+1)/2); see route_nu
    int kmax = 10;         // levels reported for infinite spectra
};

std::string model_name(const PotentialModel& m);
std::string route_name(Route r);
Route parse_route(const std::string& s);
/// MP for Coulomb, oscillator and Morse; Wilson for the hyperbolic and trigonometric potentials.
Route default_route(const PotentialModel& m);
void validate_model(const PotentialModel& m);
/// CDH-route nu: the configured value, else the one matching the r -> 0 behaviour
/// (2l for Coulomb, l - 1/2 for the oscillator) and 1 for Morse.
double route_nu(const PotentialModel& m, const RouteOptions& o);
/// Throws ValidationError("invalid_route") unless the model supports the route.
void check_route(const PotentialModel& m, Route r);

/// Polynomial parameters at energy E.
struct PolynomialMap {
    FamilyParams family;       // unchecked when the map leaves the strict ranges
    double argument = 0.0;     // natural argument (z or z^2) when real
    bool rotated = false;      // z -> iz, theta -> i theta (bound-state regime)
    std::optional<FamilyParams> discrete;   // discrete version for bound states
    std::string variableMap;
};

PolynomialMap map_to_polynomial(const PotentialModel& m, Route r, double E, const RouteOptions& o = {});

SpectrumResult bound_spectrum(const PotentialModel& m, Route r, const RouteOptions& o = {});

/// N of the log-spectrum rule: largest N with e^{-(N+mu)} > -mu.
int log_spectrum_size(double mu);
/// mu < 0 at which the rule switches from N-1 to N states (N >= 1), i.e. -mu - ln(-mu) = N.
double log_spectrum_threshold(int N);

/// |k + mu_k + s i z_k| at the k-th bound state, minimized over the sign s.
double pole_condition_residual(const PotentialModel& m, Route r, int k, const RouteOptions& o = {});

ScatteringResult phase_shift(const PotentialModel& m, Route r, double E, const RouteOptions& o = {});

// ---------------------------------------------------------------------------
// bases and matrix elements

enum class BasisKind { Laguerre, Jacobi };

/// Laguerre type: phi_n = A_n s^p e^{-s/2} L_n^nu(s) with ds/dx = kappa s^h.
/// Jacobi type:  phi_n = A_n (1-y)^alpha (1+y)^beta P_n^(sigma,tau)(y) with
/// dy/dx = kappa (1-y)^h1 (1+y)^h2; on the cosh map y >= 1 and (y-1) replaces (1-y).
/// The potential enters as R = V * s^k1 (Laguerre) or V * (1-y)^k1 (1+y)^k2, a polynomial.
struct BasisSpec {
    BasisKind kind = BasisKind::Laguerre;
    std::string label;
    std::string coordinateMap;
    bool coshDomain = false;
    double p = 0.0, nu = 0.0, h = 0.0;
    double alpha = 0.0, beta = 0.0, sigma = 0.0, tau = 0.0, h1 = 0.0, h2 = 0.0;
    double kappa = 1.0;
    int k1 = 0, k2 = 0;
    int degR = 0;
    std::function<long double(long double)> R;
    std::function<double(double)> coordinate;       // x -> s or y
    std::optional<double> energy;                   // H - E S is tridiagonal only at this E
    std::function<double(int)> norm;                // A_n used by basis_eval
    int maxSize = 1 << 20;                          // square-integrable functions available
};

BasisSpec basis_spec(const PotentialModel& m, Route r, const RouteOptions& o = {},
                     std::optional<double> energy = std::nullopt);

double basis_eval(const BasisSpec& b, int n, double x);
double basis_eval(const PotentialModel& m, Route r, int n, double x, const RouteOptions& o = {});

struct MatrixPair {
    Eigen::MatrixXd H;
    Eigen::MatrixXd S;
    std::vector<double> scale;   // basis rescaled by scale[n] so that S(n,n) = 1
    double orderCheck = 0.0;     // max entry change when the quadrature order doubles
};

struct AssemblyOptions {
    int order = 0;               // 0 selects 2M + 16
    bool parallel = true;
    bool checkOrder = false;
};

MatrixPair hamiltonian_matrix(const BasisSpec& b, int M, const AssemblyOptions& opt = {});
MatrixPair hamiltonian_matrix(const PotentialModel& m, Route r, int M, const RouteOptions& o = {},
                              const AssemblyOptions& opt = {});

/// max |(H - E S)_{nm}| over |n - m| >= 2 divided by max |(H - E S)_{nm}|.
double band_defect(const MatrixPair& mp, double E);

struct TridiagReport {
    std::string label;
    double defect = 0.0;
    std::vector<double> energies;   // energies at which the defect was taken
};

/// Defect at the basis energy, or the max over sample energies when the basis is energy-free.
TridiagReport tridiagonality_defect(const BasisSpec& b, int M, const AssemblyOptions& opt = {});
TridiagReport tridiagonality_defect(const PotentialModel& m, Route r, int M, const RouteOptions& o = {});

/// The same basis with alpha (Jacobi) or p (Laguerre) shifted; used as a negative control.
BasisSpec perturbed_basis(const BasisSpec& b, double shift = 0.3);

/// Every model basis plus the seven H_n class rows, with parameters where the audit is meaningful.
struct AuditCase {
    PotentialModel model;
    Route route;
    RouteOptions options;
};
std::vector<AuditCase> audit_catalog();

struct OracleLevel {
    int k = 0;
    double value = 0.0;
    double convergenceDelta = 0.0;   // |E(M) - E(2M)|
};
struct OracleResult {
    std::vector<OracleLevel> levels;
    int M = 0;
};

/// Rayleigh-Ritz in the route's basis. Energy-dependent bases are iterated to
/// self-consistency per level. `levels` caps the count (bounded by N+1 when finite).
OracleResult eigen_oracle_spectrum(const PotentialModel& m, Route r, int M, int levels = 5,
                                   const RouteOptions& o = {}, bool convergenceCheck = true);

struct WavefunctionSample {
    std::vector<double> x;
    std::vector<double> values;
    int truncation = 0;
    double tailEstimate = 0.0;   // norm of the last 10% of terms
    std::string energyLabel;
};

/// Discrete-polynomial expansion for bound states (energyLabel "k=<int>") and
/// sqrt(rho) P_n expansion for scattering states (energyLabel "E=<value>"). MP-route Coulomb, oscillator and Morse.
WavefunctionSample reconstruct_wavefunction(const PotentialModel& m, Route r, const std::string& energyLabel,
                                            const std::vector<double>& xGrid, int truncation,
                                            const RouteOptions& o = {});

}  // namespace tra

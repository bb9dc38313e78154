#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tra/polyfam.hpp"

namespace tra {

/// Large-n form sqrt(n) P_n ~ A cos(phi_n + delta) with a fixed frequency part phi_n.
struct AsymptoticModel {
    FamilyParams family;
    double powerExponent = 0.5;
    std::string phaseForm;
    /// phi_n without the phase shift.
    double phase_base(int n, double z) const;
};

AsymptoticModel asymptotic_model(const FamilyParams& p);

enum class ScatteringMethod { ClosedForm, Fitted };

struct ScatteringResult {
    double amplitude = 0.0;          // envelope of the orthonormal polynomial
    double phase = 0.0;              // principal value in (-pi, pi]
    ScatteringMethod method = ScatteringMethod::ClosedForm;
    double residual = 0.0;           // fit only: rms residual / amplitude
    double formulaAmplitude = 0.0;   // closed form only: amplitude in the monic-ratio normalization
    double envelope = 0.0;           // fit only: mean per-octave max of sqrt(n)|P_n|
};

struct NRange {
    int lo = 1000;
    int hi = 10000;
    int samples = 2000;
};

double wrap_phase(double x);

ScatteringResult closed_form_scattering(const FamilyParams& p, double z);

/// 1/|Gamma(mu + i z)| for complex z; vanishes at the spectrum points.
double inverse_gamma_envelope(const FamilyParams& p, cplx z);

/// (n, P_n(z)) at `samples` evenly spaced degrees in [lo, hi].
std::vector<std::pair<int, double>> evaluate_large_n(const FamilyParams& p, double z, const NRange& r = {});

ScatteringResult fit_scattering(const FamilyParams& p, double z, const NRange& r = {});

/// Slope of log(max |P_n| per octave) against log n over the range.
double envelope_slope(const FamilyParams& p, double z, const NRange& r = {});

/// Fits at many energies; the parallel path distributes energies over threads.
std::vector<ScatteringResult> scan_scattering(const FamilyParams& p, const std::vector<double>& zs,
                                              const NRange& r = {}, bool parallel = true);

}  // namespace tra

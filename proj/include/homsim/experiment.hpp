#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "homsim/spectral.hpp"

// Hong-Ou-Mandel experiment model: builds the input states, applies loss,
// partial distinguishability and the half beamsplitter, and evaluates the
// twofold click probability both exactly (truncated-Fock-space pipeline)
// and with the weak-transmittance closed form. Also extracts visibilities,
// dip curves, and the brightness optimum of the coherent arm.
//
// Mode layout of the exact pipeline, 2 spatial x 2 internal modes:
//   0 = (a, matched)   1 = (a, orthogonal)
//   2 = (b, matched)   3 = (b, orthogonal)
// Partial distinguishability V is encoded by rotating arm b's amplitude
// into the orthogonal internal mode with cos(theta) = sqrt(V); the 50:50
// beamsplitter then acts on each internal pair, and detectors watch the
// spatial groups {0,1} and {2,3}.

namespace homsim::experiment {

enum class SourcePair {
    single_vs_coherent,
    single_vs_single,
    coherent_vs_coherent_phase_averaged,
};

enum class Method { exact, closed_form };

// Either Gaussian arm widths (overlap from the closed form), a direct
// overlap value at zero delay, or widths whose Gaussian shape is kept but
// whose peak is pinned to a supplied V0.
class SpectralInput {
public:
    enum class Kind { widths, direct_v0, widths_with_peak };

    static SpectralInput from_widths(spectral::SpectralWidth heralded,
                                     spectral::SpectralWidth coherent);
    static SpectralInput direct(double v0);
    static SpectralInput widths_with_peak(spectral::SpectralWidth heralded,
                                          spectral::SpectralWidth coherent, double v0);

    Kind kind() const { return kind_; }
    bool has_shape() const { return kind_ != Kind::direct_v0; }

    // Overlap at a delay. A direct V0 carries no temporal shape, so only
    // delay == 0 is meaningful there (anything else throws).
    double value_at(double delay_s) const;
    double peak() const;

    const spectral::SpectralWidth& heralded() const;
    const spectral::SpectralWidth& coherent() const;

private:
    SpectralInput(Kind k, spectral::SpectralWidth p, spectral::SpectralWidth w, double v0)
        : kind_(k), heralded_(p), coherent_(w), v0_(v0) {}

    Kind kind_;
    spectral::SpectralWidth heralded_;
    spectral::SpectralWidth coherent_;
    double v0_;
};

struct ExperimentParams {
    double transmittance = 1.0;       // T in (0, 1]
    double dark_prob = 0.0;           // d in [0, 1)
    double mean_photon_number = 0.0;  // |alpha|^2 of the coherent arm
    SpectralInput spectral = SpectralInput::direct(1.0);
    SourcePair source_pair = SourcePair::single_vs_coherent;
    int cutoff = 16;                  // photons per mode in the exact pipeline

    void validate() const;  // throws std::invalid_argument
};

struct GaussianDipFit {
    double visibility = 0.0;  // dip depth A of B (1 - A e^{-(t-t0)^2/(2 s^2)})
    double fwhm = 0.0;        // 2 sqrt(2 ln 2) s, seconds
    double center = 0.0;      // t0, seconds
    double baseline = 0.0;    // B
    int iterations = 0;
    double rms_residual = 0.0;
    bool degenerate = false;  // flat curve, dip depth not resolvable
};

struct DipCurve {
    std::vector<double> delays;         // seconds, sorted
    std::vector<double> probabilities;  // same length
    std::optional<GaussianDipFit> fit;
};

struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact twofold click probability at a given mode overlap v (delay folded
// in by the caller). Dispatches on source_pair; the phase-averaged pair is
// averaged over a uniform relative-phase grid with a convergence check.
double coincidence_exact_at_overlap(const ExperimentParams& params, double v);
double coincidence_exact(const ExperimentParams& params, double delay_s);

// The weak-transmittance closed form, valid for T << 1 and d << 1:
//   1 - v / [(1 + 2d/(T x)) (1 + d/T + x/2)],  x = mean photon number.
// Returned up to an overall proportionality; ratios against the v = 0
// baseline are well defined. x = 0 makes the expression singular and is
// rejected; use the exact model there.
double coincidence_closed_form_at_overlap(const ExperimentParams& params, double v);
double coincidence_closed_form(const ExperimentParams& params, double delay_s);

// Dip depth 1 - P(0) / P(infinity), with the baseline evaluated at v = 0
// (the Gaussian-tail limit, grid independent). Returns 0 when there are no
// coincidences at all.
double visibility(const ExperimentParams& params, Method method);

struct OptimalBrightness {
    bool interior = false;   // false when d = 0: no interior optimum,
                             // brightness should be minimized
    double x_numeric = 0.0;  // bracketed scalar minimization
    double x_analytic = 0.0; // sqrt(2 (2d/T) (1 + d/T)) from df/dx = 0
};

// Mean photon number minimizing the coincidence floor
// f(x) = (1 + 2d/(Tx)) (1 + d/T + x/2) on x in (0, 4].
OptimalBrightness optimal_mean_photon_number(double transmittance, double dark_prob);
double brightness_objective(double transmittance, double dark_prob, double x);

// Visibility with both inputs heralded single photons (exact model only;
// each photon gets an independent loss branch).
double two_photon_visibility(const ExperimentParams& params);

// Visibility of two equal-brightness coherent pulses with uniformly random
// relative phase. Bounded by 1/2.
double classical_baseline_visibility(const ExperimentParams& params);

DipCurve scan_dip(const ExperimentParams& params, const std::vector<double>& delays,
                  Method method);

// Least-squares fit of B (1 - A e^{-(t-t0)^2/(2 s^2)}) to the curve.
// Throws fit_error when the fit does not converge; flags degeneracy on
// flat curves instead of fitting noise.
DipCurve fit_gaussian_dip(const DipCurve& curve);

}  // namespace homsim::experiment

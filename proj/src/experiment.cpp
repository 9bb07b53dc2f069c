#include "homsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "homsim/fock.hpp"

namespace homsim::experiment {

using fock::Ensemble;
using fock::StateVector;
using fock::cplx;

SpectralInput SpectralInput::from_widths(spectral::SpectralWidth heralded,
                                         spectral::SpectralWidth coherent) {
    return SpectralInput(Kind::widths, heralded, coherent, 0.0);
}

SpectralInput SpectralInput::direct(double v0) {
    if (!(v0 > 0.0 && v0 <= 1.0))
        throw std::invalid_argument("SpectralInput: V0 must be in (0, 1]");
    return SpectralInput(Kind::direct_v0, spectral::SpectralWidth(1.0),
                         spectral::SpectralWidth(1.0), v0);
}

SpectralInput SpectralInput::widths_with_peak(spectral::SpectralWidth heralded,
                                              spectral::SpectralWidth coherent, double v0) {
    if (!(v0 > 0.0 && v0 <= 1.0))
        throw std::invalid_argument("SpectralInput: V0 must be in (0, 1]");
    return SpectralInput(Kind::widths_with_peak, heralded, coherent, v0);
}

double SpectralInput::value_at(double delay_s) const {
    switch (kind_) {
        case Kind::widths:
            return spectral::overlap_v_closed(heralded_, coherent_, delay_s);
        case Kind::direct_v0:
            if (delay_s != 0.0)
                throw std::domain_error(
                    "SpectralInput: a direct V0 has no temporal shape; supply arm widths "
                    "to evaluate nonzero delays");
            return v0_;
        case Kind::widths_with_peak: {
            const double shape = spectral::overlap_v_closed(heralded_, coherent_, delay_s) /
                                 spectral::overlap_v_closed(heralded_, coherent_, 0.0);
            return v0_ * shape;
        }
    }
    throw std::logic_error("SpectralInput: bad kind");
}

double SpectralInput::peak() const { return value_at(0.0); }

const spectral::SpectralWidth& SpectralInput::heralded() const {
    if (kind_ == Kind::direct_v0)
        throw std::domain_error("SpectralInput: no widths behind a direct V0");
    return heralded_;
}

const spectral::SpectralWidth& SpectralInput::coherent() const {
    if (kind_ == Kind::direct_v0)
        throw std::domain_error("SpectralInput: no widths behind a direct V0");
    return coherent_;
}

void ExperimentParams::validate() const {
    if (!(transmittance > 0.0 && transmittance <= 1.0))
        throw std::invalid_argument("ExperimentParams: transmittance must be in (0, 1]");
    if (!(dark_prob >= 0.0 && dark_prob < 1.0))
        throw std::invalid_argument("ExperimentParams: dark_prob must be in [0, 1)");
    if (!(mean_photon_number >= 0.0))
        throw std::invalid_argument("ExperimentParams: mean photon number must be >= 0");
    if (cutoff < 2)
        throw std::invalid_argument("ExperimentParams: cutoff must be >= 2");
}

namespace {

// modes 0,1 = arm a (matched, orthogonal); modes 2,3 = arm b
constexpr int kAm = 0, kAo = 1, kBm = 2, kBo = 3;

// Sources and loss live on a compact two-mode space (arm a, arm b); the
// orthogonal internal modes only matter once the distinguishability
// rotation acts, so each lossy branch is embedded into the four-mode
// layout just before the beamsplitter stage.
StateVector embed_arms(const StateVector& pair) {
    const int L = pair.levels();
    StateVector out(4, pair.cutoff());
    const std::size_t sa = out.stride(kAm), sb = out.stride(kBm);
    for (int na = 0; na < L; ++na)
        for (int nb = 0; nb < L; ++nb)
            out[sa * static_cast<std::size_t>(na) + sb * static_cast<std::size_t>(nb)] =
                pair[static_cast<std::size_t>(na) +
                     static_cast<std::size_t>(L) * static_cast<std::size_t>(nb)];
    return out;
}

// Rotate arm b's amplitude between its internal modes to set the overlap,
// mix the arms on the half beamsplitter internal pair by internal pair,
// then read out the twofold click probability.
double detect_after_bs(const Ensemble& arm_pairs, double v, double dark_prob) {
    const double cv = std::sqrt(v);
    const double sv = std::sqrt(1.0 - v);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Ensemble ens;
    for (const fock::Branch& br : arm_pairs.branches) {
        StateVector st = embed_arms(br.state);
        if (v < 1.0) st = fock::apply_mixer(st, kBm, kBo, cv, sv);
        st = fock::apply_mixer(st, kAm, kBm, inv_sqrt2, -inv_sqrt2);
        st = fock::apply_mixer(st, kAo, kBo, inv_sqrt2, -inv_sqrt2);
        ens.branches.push_back({br.probability, std::move(st)});
    }
    return fock::coincidence_click_probability(ens, {kAm, kAo}, {kBm, kBo},
                                               fock::DetectorModel(dark_prob));
}

double single_vs_coherent_exact(const ExperimentParams& pr, double v) {
    StateVector st = fock::make_vacuum(2, pr.cutoff);
    st = fock::apply_create(st, 0);
    if (pr.mean_photon_number > 0.0)
        st = fock::apply_displacement(st, 1, std::sqrt(pr.mean_photon_number));
    Ensemble ens = Ensemble::pure(std::move(st));
    ens = fock::apply_loss(ens, 0, pr.transmittance);
    ens = fock::apply_loss(ens, 1, pr.transmittance);
    return detect_after_bs(ens, v, pr.dark_prob);
}

double single_vs_single_exact(const ExperimentParams& pr, double v) {
    StateVector st = fock::make_vacuum(2, pr.cutoff);
    st = fock::apply_create(st, 0);
    st = fock::apply_create(st, 1);
    Ensemble ens = Ensemble::pure(std::move(st));
    ens = fock::apply_loss(ens, 0, pr.transmittance);
    ens = fock::apply_loss(ens, 1, pr.transmittance);
    return detect_after_bs(ens, v, pr.dark_prob);
}

double coherent_pair_at_phase(const ExperimentParams& pr, double v, double phase) {
    const double amp = std::sqrt(pr.mean_photon_number);
    StateVector st = fock::make_vacuum(2, pr.cutoff);
    if (amp > 0.0) {
        st = fock::apply_displacement(st, 0, amp);
        st = fock::apply_displacement(st, 1, amp * std::exp(cplx(0.0, phase)));
    }
    Ensemble ens = Ensemble::pure(std::move(st));
    ens = fock::apply_loss(ens, 0, pr.transmittance);
    ens = fock::apply_loss(ens, 1, pr.transmittance);
    return detect_after_bs(ens, v, pr.dark_prob);
}

double phase_averaged_exact(const ExperimentParams& pr, double v) {
    auto grid_average = [&](int n) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += coherent_pair_at_phase(pr, v, 2.0 * M_PI * i / n);
        return acc / n;
    };
    // Uniform grids double until two refinements agree; the trapezoid rule
    // on a smooth periodic integrand converges exponentially so 64 points
    // is normally already converged.
    int n = 64;
    double coarse = grid_average(n);
    for (int round = 0; round < 4; ++round) {
        const double fine = grid_average(2 * n);
        if (std::abs(fine - coarse) <= 1e-10 * std::max(std::abs(fine), std::abs(coarse)) + 1e-16)
            return fine;
        coarse = fine;
        n *= 2;
    }
    throw std::runtime_error("phase average did not converge on refinement");
}

}  // namespace

double coincidence_exact_at_overlap(const ExperimentParams& params, double v) {
    params.validate();
    if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("coincidence_exact_at_overlap: v must be in [0, 1]");
    switch (params.source_pair) {
        case SourcePair::single_vs_coherent:
            return single_vs_coherent_exact(params, v);
        case SourcePair::single_vs_single:
            return single_vs_single_exact(params, v);
        case SourcePair::coherent_vs_coherent_phase_averaged:
            return phase_averaged_exact(params, v);
    }
    throw std::logic_error("coincidence_exact_at_overlap: bad source pair");
}

double coincidence_exact(const ExperimentParams& params, double delay_s) {
    return coincidence_exact_at_overlap(params, params.spectral.value_at(delay_s));
}

double coincidence_closed_form_at_overlap(const ExperimentParams& params, double v) {
    params.validate();
    if (params.source_pair != SourcePair::single_vs_coherent)
        throw std::domain_error(
            "coincidence_closed_form: defined for the single-photon vs coherent pair only");
    const double x = params.mean_photon_number;
    if (x == 0.0)
        throw std::domain_error(
            "coincidence_closed_form: x = 0 is singular (2d/(Tx) diverges); "
            "use the exact model for the vacuum-brightness limit");
    const double T = params.transmittance;
    const double d = params.dark_prob;
    return 1.0 - v / ((1.0 + 2.0 * d / (T * x)) * (1.0 + d / T + x / 2.0));
}

double coincidence_closed_form(const ExperimentParams& params, double delay_s) {
    return coincidence_closed_form_at_overlap(params, params.spectral.value_at(delay_s));
}

namespace {

double coincidence_at_overlap(const ExperimentParams& params, double v, Method method) {
    return method == Method::exact ? coincidence_exact_at_overlap(params, v)
                                   : coincidence_closed_form_at_overlap(params, v);
}

}  // namespace

double visibility(const ExperimentParams& params, Method method) {
    const double v0 = params.spectral.peak();
    const double p0 = coincidence_at_overlap(params, v0, method);
    const double pinf = coincidence_at_overlap(params, 0.0, method);
    if (pinf <= 0.0) return 0.0;
    return 1.0 - p0 / pinf;
}

double brightness_objective(double transmittance, double dark_prob, double x) {
    if (!(x > 0.0)) throw std::domain_error("brightness_objective: x must be positive");
    const double T = transmittance, d = dark_prob;
    return (1.0 + 2.0 * d / (T * x)) * (1.0 + d / T + x / 2.0);
}

OptimalBrightness optimal_mean_photon_number(double transmittance, double dark_prob) {
    if (!(transmittance > 0.0 && transmittance <= 1.0))
        throw std::invalid_argument("optimal_mean_photon_number: transmittance out of range");
    if (!(dark_prob >= 0.0 && dark_prob < 1.0))
        throw std::invalid_argument("optimal_mean_photon_number: dark_prob out of range");

    OptimalBrightness out;
    if (dark_prob == 0.0) {
        // f is strictly increasing: the optimum sits on the x -> 0 boundary.
        out.interior = false;
        return out;
    }
    const double ratio = 2.0 * dark_prob / transmittance;
    out.x_analytic = std::sqrt(2.0 * ratio * (1.0 + dark_prob / transmittance));
    out.interior = true;

    // Golden-section search on (0, 4].
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-9, hi = 4.0;
    double c = hi - gr * (hi - lo);
    double d2 = lo + gr * (hi - lo);
    double fc = brightness_objective(transmittance, dark_prob, c);
    double fd = brightness_objective(transmittance, dark_prob, d2);
    for (int it = 0; it < 300 && hi - lo > 1e-13; ++it) {
        if (fc < fd) {
            hi = d2;
            d2 = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = brightness_objective(transmittance, dark_prob, c);
        } else {
            lo = c;
            c = d2;
            fc = fd;
            d2 = lo + gr * (hi - lo);
            fd = brightness_objective(transmittance, dark_prob, d2);
        }
    }
    out.x_numeric = 0.5 * (lo + hi);
    return out;
}

double two_photon_visibility(const ExperimentParams& params) {
    if (params.source_pair != SourcePair::single_vs_single)
        throw std::invalid_argument("two_photon_visibility: source pair must be single_vs_single");
    return visibility(params, Method::exact);
}

double classical_baseline_visibility(const ExperimentParams& params) {
    if (params.source_pair != SourcePair::coherent_vs_coherent_phase_averaged)
        throw std::invalid_argument(
            "classical_baseline_visibility: source pair must be the phase-averaged coherent pair");
    return visibility(params, Method::exact);
}

DipCurve scan_dip(const ExperimentParams& params, const std::vector<double>& delays,
                  Method method) {
    if (delays.size() < 3)
        throw std::invalid_argument("scan_dip: need at least 3 grid points");
    if (!std::is_sorted(delays.begin(), delays.end()))
        throw std::invalid_argument("scan_dip: delay grid must be sorted");

    DipCurve curve;
    curve.delays = delays;
    curve.probabilities.reserve(delays.size());
    for (double tau : delays) {
        const double v = params.spectral.value_at(tau);
        curve.probabilities.push_back(coincidence_at_overlap(params, v, method));
    }
    return curve;
}

namespace {

// Levenberg-Marquardt on the nondimensionalized dip model
//   y/ys = B (1 - A exp(-(u - u0)^2 / (2 s^2))),  u = (t - tbar)/tscale.
struct DipFitWork {
    std::vector<double> u, y;
    double tbar = 0.0, tscale = 1.0, yscale = 1.0;

    double model(const double th[4], double uu) const {
        const double z = (uu - th[2]) / th[3];
        return th[0] * (1.0 - th[1] * std::exp(-0.5 * z * z));
    }

    double chi2(const double th[4]) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double r = y[i] - model(th, u[i]);
            acc += r * r;
        }
        return acc;
    }
};

bool solve4(double m[4][4], double rhs[4]) {
    int perm[4] = {0, 1, 2, 3};
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-300) return false;
        std::swap(m[col], m[piv]);
        std::swap(rhs[col], rhs[piv]);
        std::swap(perm[col], perm[piv]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int col = 3; col >= 0; --col) {
        for (int r = col + 1; r < 4; ++r) rhs[col] -= m[col][r] * rhs[r];
        rhs[col] /= m[col][col];
    }
    return true;
}

}  // namespace

DipCurve fit_gaussian_dip(const DipCurve& curve) {
    const std::size_t n = curve.delays.size();
    if (n < 5 || curve.probabilities.size() != n)
        throw std::invalid_argument("fit_gaussian_dip: need at least 5 points spanning the dip");

    DipFitWork w;
    w.tbar = 0.0;
    for (double t : curve.delays) w.tbar += t;
    w.tbar /= static_cast<double>(n);
    w.tscale = 0.0;
    for (double t : curve.delays) w.tscale = std::max(w.tscale, std::abs(t - w.tbar));
    if (w.tscale == 0.0) throw std::invalid_argument("fit_gaussian_dip: degenerate delay grid");
    w.yscale = *std::max_element(curve.probabilities.begin(), curve.probabilities.end());
    if (w.yscale <= 0.0) w.yscale = 1.0;

    w.u.resize(n);
    w.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        w.u[i] = (curve.delays[i] - w.tbar) / w.tscale;
        w.y[i] = curve.probabilities[i] / w.yscale;
    }

    // Initial guesses from the raw curve shape.
    const double baseline0 = 0.5 * (w.y.front() + w.y.back());
    const std::size_t imin =
        static_cast<std::size_t>(std::min_element(w.y.begin(), w.y.end()) - w.y.begin());
    const double ymin = w.y[imin];

    DipCurve out = curve;
    GaussianDipFit fit;

    const double depth = baseline0 - ymin;
    if (!(baseline0 > 0.0) || depth <= 1e-9 * std::max(baseline0, 1e-300)) {
        // Flat curve: report a zero-depth fit instead of chasing noise.
        fit.baseline = baseline0 * w.yscale;
        fit.visibility = 0.0;
        fit.center = w.tbar;
        fit.fwhm = 0.0;
        fit.degenerate = true;
        out.fit = fit;
        return out;
    }

    double th[4];
    th[0] = baseline0;                              // B
    th[1] = std::clamp(depth / baseline0, 0.0, 1.0);  // A
    th[2] = w.u[imin];                              // u0
    // Half-depth crossing gives the width scale.
    double uhalf = 0.0;
    bool found = false;
    const double level = baseline0 - 0.5 * depth;
    for (std::size_t i = imin; i + 1 < n; ++i) {
        if (w.y[i + 1] >= level) {
            uhalf = w.u[i + 1];
            found = true;
            break;
        }
    }
    th[3] = found ? std::max(std::abs(uhalf - th[2]) / std::sqrt(2.0 * std::log(2.0)), 1e-3)
                  : (w.u.back() - w.u.front()) / 6.0;

    double lambda = 1e-3;
    double chi = w.chi2(th);
    int iter = 0;
    for (; iter < 500; ++iter) {
        // Build normal equations J^T J dth = J^T r.
        double jtj[4][4] = {};
        double jtr[4] = {};
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (w.u[i] - th[2]) / th[3];
            const double g = std::exp(-0.5 * z * z);
            const double r = w.y[i] - th[0] * (1.0 - th[1] * g);
            const double J[4] = {
                1.0 - th[1] * g,
                -th[0] * g,
                -th[0] * th[1] * g * z / th[3],
                -th[0] * th[1] * g * z * z / th[3],
            };
            for (int a = 0; a < 4; ++a) {
                jtr[a] += J[a] * r;
                for (int b = 0; b < 4; ++b) jtj[a][b] += J[a] * J[b];
            }
        }
        double m[4][4];
        double step[4];
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) m[a][b] = jtj[a][b];
            m[a][a] *= 1.0 + lambda;
            step[a] = jtr[a];
        }
        if (!solve4(m, step)) {
            lambda *= 10.0;
            if (lambda > 1e12)
                throw fit_error("fit_gaussian_dip: singular normal equations, rms residual " +
                                std::to_string(std::sqrt(chi / n)));
            continue;
        }
        double trial[4] = {th[0] + step[0], th[1] + step[1], th[2] + step[2], th[3] + step[3]};
        trial[3] = std::abs(trial[3]);
        if (trial[3] < 1e-9) trial[3] = 1e-9;
        const double trial_chi = w.chi2(trial);
        if (trial_chi <= chi) {
            const double rel_drop = (chi - trial_chi) / std::max(chi, 1e-300);
            double step_sq = 0.0;
            for (double v : step) step_sq += v * v;
            std::copy(trial, trial + 4, th);
            chi = trial_chi;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel_drop < 1e-14 && step_sq < 1e-24) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    if (iter >= 500)
        throw fit_error("fit_gaussian_dip: no convergence after 500 iterations, rms residual " +
                        std::to_string(std::sqrt(chi / n)));

    fit.baseline = th[0] * w.yscale;
    fit.visibility = th[1];
    fit.center = w.tbar + th[2] * w.tscale;
    fit.fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0)) * th[3] * w.tscale;
    fit.iterations = iter;
    fit.rms_residual = std::sqrt(chi / n) * w.yscale;
    fit.degenerate = false;
    out.fit = fit;
    return out;
}

}  // namespace homsim::experiment

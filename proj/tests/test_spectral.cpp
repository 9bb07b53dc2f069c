#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "homsim/spectral.hpp"

using namespace homsim;
using spectral::SpectralWidth;

namespace {

// Numerical Fourier-transform oracle: build the time-domain Gaussian with
// the requested INTENSITY FWHM directly from the FWHM definition,
// transform it on a grid, and read the amplitude-spectrum sigma off the
// second moment of the intensity spectrum (Var_I = sigma_omega^2 / 2).
double sigma_via_fourier(double dt_fwhm) {
    const double wmax = 40.0 / dt_fwhm;  // generous spectral support
    const int nw = 801;
    const double tmax = 4.0 * dt_fwhm;
    const int nt = 4001;
    const double dt = 2.0 * tmax / (nt - 1);

    std::vector<double> power(nw);
    double m0 = 0.0, m2 = 0.0;
    for (int iw = 0; iw < nw; ++iw) {
        const double w = -wmax + 2.0 * wmax * iw / (nw - 1);
        std::complex<double> acc(0.0);
        for (int it = 0; it < nt; ++it) {
            const double t = -tmax + it * dt;
            const double amp = std::exp(-2.0 * std::log(2.0) * t * t / (dt_fwhm * dt_fwhm));
            acc += amp * std::exp(std::complex<double>(0.0, -w * t));
        }
        power[iw] = std::norm(acc * dt);
        m0 += power[iw];
        m2 += w * w * power[iw];
    }
    const double var_intensity = m2 / m0;
    return std::sqrt(2.0 * var_intensity);
}

// Product-of-Gaussians oracle for the cascade rule: multiply amplitude
// transfer functions on a grid and read the effective sigma off the second
// moment of the squared product.
double cascade_via_grid(const std::vector<double>& sigmas) {
    double smin = sigmas[0];
    for (double s : sigmas) smin = std::min(smin, s);
    const double wmax = 10.0 * smin;
    const int n = 200001;
    double m0 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = -wmax + 2.0 * wmax * i / (n - 1);
        double amp = 1.0;
        for (double s : sigmas) amp *= std::exp(-w * w / (2.0 * s * s));
        const double p = amp * amp;
        m0 += p;
        m2 += w * w * p;
    }
    return std::sqrt(2.0 * m2 / m0);
}

}  // namespace

TEST_CASE("time-FWHM conversion against the Fourier oracle") {
    const double dt = 1.2e-12;
    const SpectralWidth w = spectral::sigma_from_time_fwhm(dt);
    CHECK(w.sigma_omega == doctest::Approx(1387591018596.1628).epsilon(1e-12));
    CHECK(w.sigma_omega == doctest::Approx(sigma_via_fourier(dt)).epsilon(1e-6));

    const SpectralWidth wider = spectral::sigma_from_time_fwhm(2.0 * dt);
    CHECK(wider.sigma_omega == doctest::Approx(0.5 * w.sigma_omega).epsilon(1e-14));

    CHECK(spectral::time_fwhm_from_sigma(w) == doctest::Approx(dt).epsilon(1e-12));
    CHECK_THROWS_AS(spectral::sigma_from_time_fwhm(0.0), std::invalid_argument);
    CHECK_THROWS_AS(spectral::sigma_from_time_fwhm(-1e-12), std::invalid_argument);
}

TEST_CASE("wavelength-FWHM conversions") {
    const SpectralWidth bg2 = spectral::sigma_from_wavelength_fwhm(1e-9, 1522e-9);
    // c dl / lambda^2 = 129.417 GHz for 1 nm at 1522 nm
    CHECK(spectral::speed_of_light * 1e-9 / (1522e-9 * 1522e-9) ==
          doctest::Approx(129417020795.30876).epsilon(1e-12));
    CHECK(bg2.sigma_omega == doctest::Approx(488347018118.92108).epsilon(1e-12));

    CHECK(spectral::speed_of_light * 0.2e-9 / (780e-9 * 780e-9) ==
          doctest::Approx(98551103879.026947).epsilon(1e-12));
    const SpectralWidth bg1 = spectral::sigma_from_wavelength_fwhm(0.2e-9, 780e-9);
    CHECK(bg1.sigma_omega == doctest::Approx(371876414832.40979).epsilon(1e-12));

    const SpectralWidth doubled = spectral::sigma_from_wavelength_fwhm(0.4e-9, 780e-9);
    CHECK(doubled.sigma_omega == doctest::Approx(2.0 * bg1.sigma_omega).epsilon(1e-14));

    CHECK(spectral::wavelength_fwhm_from_sigma(bg1, 780e-9) ==
          doctest::Approx(0.2e-9).epsilon(1e-12));
    CHECK_THROWS_AS(spectral::sigma_from_wavelength_fwhm(0.0, 780e-9), std::invalid_argument);
    CHECK_THROWS_AS(spectral::sigma_from_wavelength_fwhm(1e-9, 0.0), std::invalid_argument);
}

TEST_CASE("cascade of Gaussian transfer functions") {
    const SpectralWidth a(3.0e11);
    CHECK(spectral::cascade_widths({a}).sigma_omega == doctest::Approx(a.sigma_omega));
    CHECK(spectral::cascade_widths({a, a}).sigma_omega ==
          doctest::Approx(a.sigma_omega / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(spectral::cascade_widths({}), std::invalid_argument);
}

TEST_CASE("arm cascades of the default filter stack") {
    const SpectralWidth bg1 = spectral::sigma_from_wavelength_fwhm(0.2e-9, 780e-9);
    const SpectralWidth wg = spectral::sigma_from_wavelength_fwhm(0.3e-9, 780e-9);
    const SpectralWidth bg2 = spectral::sigma_from_wavelength_fwhm(1e-9, 1522e-9);
    const SpectralWidth pulse = spectral::sigma_from_time_fwhm(1.2e-12);

    const SpectralWidth heralded = spectral::cascade_widths({bg1, wg, bg2});
    const SpectralWidth coherent = spectral::cascade_widths({pulse, wg, bg2});
    CHECK(heralded.sigma_omega == doctest::Approx(261371530302.74677).epsilon(1e-12));
    CHECK(coherent.sigma_omega == doctest::Approx(355192060709.67029).epsilon(1e-12));

    // cross-check the closed composition rule against the grid oracle
    CHECK(heralded.sigma_omega ==
          doctest::Approx(cascade_via_grid(
                              {bg1.sigma_omega, wg.sigma_omega, bg2.sigma_omega}))
              .epsilon(1e-6));

    const double v0 = spectral::overlap_v_closed(heralded, coherent, 0.0);
    CHECK(v0 == doctest::Approx(0.95473852638281753).epsilon(1e-12));
    CHECK(spectral::dip_fwhm(heralded, coherent) ==
          doctest::Approx(7.9096038918300122e-12).epsilon(1e-12));
}

TEST_CASE("closed-form overlap values") {
    const SpectralWidth p(2.0e11);
    const SpectralWidth w3(6.0e11);
    CHECK(spectral::overlap_v_closed(p, p, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(spectral::overlap_v_closed(p, w3, 0.0) == doctest::Approx(0.6).epsilon(1e-14));

    const double tau = 3.3e-12;
    CHECK(spectral::overlap_v_closed(p, w3, tau) ==
          spectral::overlap_v_closed(p, w3, -tau));
}

TEST_CASE("quadrature oracle certifies the closed form") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> logs(std::log(1e10), std::log(1e13));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralWidth p(std::exp(logs(rng)));
        const SpectralWidth w(std::exp(logs(rng)));
        const double sc = std::min(p.sigma_omega, w.sigma_omega);
        const double tau = 6.0 * unif(rng) / sc * (unif(rng) < 0.5 ? -1.0 : 1.0);
        worst = std::max(worst, std::abs(spectral::overlap_v_closed(p, w, tau) -
                                         spectral::overlap_v_quadrature(p, w, tau)));
    }
    CHECK(worst < 1e-8);

    const SpectralWidth eq(4.0e11);
    CHECK(spectral::overlap_v_quadrature(eq, eq, 0.0) == doctest::Approx(1.0).epsilon(1e-8));

    // delay far beyond the coherence time: overlap gone
    CHECK(spectral::overlap_v_quadrature(eq, eq, 30.0 / eq.sigma_omega) < 1e-6);
}

TEST_CASE("overlap bounds, monotonicity and log-concavity") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> logs(std::log(1e10), std::log(1e13));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralWidth p(std::exp(logs(rng)));
        const SpectralWidth w(std::exp(logs(rng)));
        const double sc = std::min(p.sigma_omega, w.sigma_omega);
        const double t1 = 3.0 * unif(rng) / sc;
        const double t2 = t1 + (0.1 + 2.0 * unif(rng)) / sc;
        const double v0 = spectral::overlap_v_closed(p, w, 0.0);
        const double v1 = spectral::overlap_v_closed(p, w, t1);
        const double v2 = spectral::overlap_v_closed(p, w, t2);
        CHECK(v0 > 0.0);
        CHECK(v0 <= 1.0);
        CHECK(v1 > v2);  // strictly decreasing in |tau|
        // log V is concave: second difference on an even grid is <= 0
        const double h = (t2 - t1);
        const double la = std::log(spectral::overlap_v_closed(p, w, t1));
        const double lb = std::log(spectral::overlap_v_closed(p, w, t1 + h));
        const double lc = std::log(spectral::overlap_v_closed(p, w, t1 + 2.0 * h));
        CHECK(la + lc - 2.0 * lb <= 1e-9 * std::abs(lb));
    }

    // V = 1 only for matched widths at zero delay
    const SpectralWidth a(3.1e11), b(3.2e11);
    CHECK(spectral::overlap_v_closed(a, b, 0.0) < 1.0);
    CHECK(spectral::overlap_v_closed(a, a, 1e-13) < 1.0);
    CHECK(spectral::overlap_v_closed(a, a, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("overlap prefactor symmetries") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> logs(std::log(1e10), std::log(1e13));
    for (int trial = 0; trial < 50; ++trial) {
        const SpectralWidth p(std::exp(logs(rng)));
        const SpectralWidth w(std::exp(logs(rng)));
        const double vp = spectral::overlap_v_closed(p, w, 0.0);
        CHECK(spectral::overlap_v_closed(w, p, 0.0) == doctest::Approx(vp).epsilon(1e-14));
        const SpectralWidth p2(3.7 * p.sigma_omega);
        const SpectralWidth w2(3.7 * w.sigma_omega);
        CHECK(spectral::overlap_v_closed(p2, w2, 0.0) == doctest::Approx(vp).epsilon(1e-14));
    }
}

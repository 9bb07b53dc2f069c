#pragma once

#include <stdexcept>
#include <vector>

// Gaussian spectral-mode algebra: bandwidth conversions, cascaded-filter
// effective widths, and the spectro-temporal mode overlap V(delay).
//
// Width convention: every SpectralWidth stores the standard deviation of
// the Gaussian spectral AMPLITUDE in angular frequency (rad/s), matching
// the e^{-w^2/(2 dw^2)} form. User-facing inputs are intensity FWHMs (the
// convention experimentalists quote) and are converted at the boundary.

namespace homsim::spectral {

struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double speed_of_light = 299792458.0;  // m/s

struct SpectralWidth {
    double sigma_omega;  // amplitude std dev, rad/s

    explicit SpectralWidth(double s) : sigma_omega(s) {
        if (!(s > 0.0) || !(s < 1e308))
            throw std::invalid_argument("SpectralWidth: sigma_omega must be positive and finite");
    }
};

struct FilterSpec {
    enum class Kind { time_fwhm, wavelength_fwhm };

    Kind kind;
    double value;                    // seconds (time) or meters (wavelength)
    double center_wavelength = 0.0;  // meters, required for wavelength_fwhm
};

// Transform-limited Gaussian pulse whose INTENSITY FWHM in time is dt:
// the amplitude e^{-t^2/(2 st^2)} has st = dt/(2 sqrt(ln 2)), and its
// Fourier transform e^{-w^2 st^2 / 2} has sigma_omega = 1/st, so
// sigma_omega = 2 sqrt(ln 2) / dt.
SpectralWidth sigma_from_time_fwhm(double dt_fwhm_s);
double time_fwhm_from_sigma(const SpectralWidth& w);

// Intensity FWHM quoted in wavelength at a carrier `center`, first-order
// dispersion of the nu = c/lambda map:
//   dnu_fwhm = c dl / center^2,  domega_fwhm = 2 pi dnu_fwhm,
//   sigma_omega = domega_fwhm / (2 sqrt(ln 2)).
SpectralWidth sigma_from_wavelength_fwhm(double dl_fwhm_m, double center_m);
double wavelength_fwhm_from_sigma(const SpectralWidth& w, double center_m);

SpectralWidth to_width(const FilterSpec& f);

// Product of Gaussian amplitude transfer functions: 1/s_eff^2 = sum 1/s_i^2.
// Frequency translation by difference-frequency generation with a cw pump
// preserves angular-frequency widths, so filters at different carriers
// compose directly after conversion.
SpectralWidth cascade_widths(const std::vector<SpectralWidth>& widths);

// Mode overlap of two Gaussian spectral amplitudes at relative delay tau:
//   V = [2 sp sw / (sp^2 + sw^2)] exp[- sp^2 sw^2 tau^2 / (sp^2 + sw^2)].
double overlap_v_closed(const SpectralWidth& p, const SpectralWidth& w, double delay_s);

// Same overlap evaluated as |(pi sp sw)^{-1/2} Int e^{-i w tau}
// e^{-w^2/(2 sp^2)} e^{-w^2/(2 sw^2)} dw|^2 by adaptive quadrature over
// +-8 combined sigmas (absolute tolerance 1e-10 on the reduced integral).
// This is the oracle that certifies the closed form.
double overlap_v_quadrature(const SpectralWidth& p, const SpectralWidth& w, double delay_s);

// FWHM in delay of the Gaussian factor of V(tau): 2 sqrt(ln 2 / a) with
// a = sp^2 sw^2 / (sp^2 + sw^2).
double dip_fwhm(const SpectralWidth& p, const SpectralWidth& w);

}  // namespace homsim::spectral

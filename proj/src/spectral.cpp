#include "homsim/spectral.hpp"

#include <cmath>
#include <complex>

namespace homsim::spectral {

namespace {

const double kTwoSqrtLn2 = 2.0 * std::sqrt(std::log(2.0));

}  // namespace

SpectralWidth sigma_from_time_fwhm(double dt_fwhm_s) {
    if (!(dt_fwhm_s > 0.0))
        throw std::invalid_argument("sigma_from_time_fwhm: FWHM must be positive");
    return SpectralWidth(kTwoSqrtLn2 / dt_fwhm_s);
}

double time_fwhm_from_sigma(const SpectralWidth& w) {
    return kTwoSqrtLn2 / w.sigma_omega;
}

SpectralWidth sigma_from_wavelength_fwhm(double dl_fwhm_m, double center_m) {
    if (!(dl_fwhm_m > 0.0))
        throw std::invalid_argument("sigma_from_wavelength_fwhm: FWHM must be positive");
    if (!(center_m > 0.0))
        throw std::invalid_argument("sigma_from_wavelength_fwhm: center wavelength must be positive");
    const double dnu_fwhm = speed_of_light * dl_fwhm_m / (center_m * center_m);
    const double domega_fwhm = 2.0 * M_PI * dnu_fwhm;
    return SpectralWidth(domega_fwhm / kTwoSqrtLn2);
}

double wavelength_fwhm_from_sigma(const SpectralWidth& w, double center_m) {
    if (!(center_m > 0.0))
        throw std::invalid_argument("wavelength_fwhm_from_sigma: center wavelength must be positive");
    const double dnu_fwhm = w.sigma_omega * kTwoSqrtLn2 / (2.0 * M_PI);
    return dnu_fwhm * center_m * center_m / speed_of_light;
}

SpectralWidth to_width(const FilterSpec& f) {
    switch (f.kind) {
        case FilterSpec::Kind::time_fwhm:
            return sigma_from_time_fwhm(f.value);
        case FilterSpec::Kind::wavelength_fwhm:
            return sigma_from_wavelength_fwhm(f.value, f.center_wavelength);
    }
    throw std::invalid_argument("to_width: unknown filter kind");
}

SpectralWidth cascade_widths(const std::vector<SpectralWidth>& widths) {
    if (widths.empty()) throw std::invalid_argument("cascade_widths: empty list");
    double inv = 0.0;
    for (const SpectralWidth& w : widths) inv += 1.0 / (w.sigma_omega * w.sigma_omega);
    return SpectralWidth(1.0 / std::sqrt(inv));
}

double overlap_v_closed(const SpectralWidth& p, const SpectralWidth& w, double delay_s) {
    const double sp2 = p.sigma_omega * p.sigma_omega;
    const double sw2 = w.sigma_omega * w.sigma_omega;
    const double pre = 2.0 * p.sigma_omega * w.sigma_omega / (sp2 + sw2);
    return pre * std::exp(-sp2 * sw2 * delay_s * delay_s / (sp2 + sw2));
}

namespace {

using cplx = std::complex<double>;

struct Quad {
    double phase_rate;  // sigma_c * tau, oscillation rate in reduced units
    int evals = 0;

    cplx f(double u) const {
        return std::exp(cplx(-0.5 * u * u, -phase_rate * u));
    }

    cplx simpson(double a, double b, cplx fa, cplx fm, cplx fb) const {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }

    cplx adapt(double a, double b, cplx fa, cplx fm, cplx fb, cplx whole, double tol, int depth) {
        if (depth > 48)
            throw quadrature_error("overlap_v_quadrature: adaptive subdivision did not converge");
        const double m = 0.5 * (a + b);
        const cplx fl = f(0.5 * (a + m));
        const cplx fr = f(0.5 * (m + b));
        const cplx left = simpson(a, m, fa, fl, fm);
        const cplx right = simpson(m, b, fm, fr, fb);
        if (std::abs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return adapt(a, m, fa, fl, fm, left, tol / 2.0, depth + 1) +
               adapt(m, b, fm, fr, fb, right, tol / 2.0, depth + 1);
    }
};

}  // namespace

double overlap_v_quadrature(const SpectralWidth& p, const SpectralWidth& w, double delay_s) {
    const double sp2 = p.sigma_omega * p.sigma_omega;
    const double sw2 = w.sigma_omega * w.sigma_omega;
    // combined width of the Gaussian product, used to nondimensionalize
    const double sigma_c = std::sqrt(sp2 * sw2 / (sp2 + sw2));

    Quad q{sigma_c * delay_s};
    // Pre-split into fixed panels so an oscillatory integrand cannot fool
    // the top-level Simpson estimate into converging early.
    const int panels = 16;
    const double lo = -8.0, hi = 8.0, h = (hi - lo) / panels;
    cplx reduced(0.0);
    for (int i = 0; i < panels; ++i) {
        const double a = lo + i * h, b = a + h;
        const cplx fa = q.f(a), fm = q.f(0.5 * (a + b)), fb = q.f(b);
        const cplx whole = q.simpson(a, b, fa, fm, fb);
        reduced += q.adapt(a, b, fa, fm, fb, whole, 1e-10 / panels, 0);
    }

    const double integral_sq = std::norm(sigma_c * reduced);
    return integral_sq / (M_PI * p.sigma_omega * w.sigma_omega);
}

double dip_fwhm(const SpectralWidth& p, const SpectralWidth& w) {
    const double sp2 = p.sigma_omega * p.sigma_omega;
    const double sw2 = w.sigma_omega * w.sigma_omega;
    const double a = sp2 * sw2 / (sp2 + sw2);
    return 2.0 * std::sqrt(std::log(2.0) / a);
}

}  // namespace homsim::spectral

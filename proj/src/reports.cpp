#include "homsim/reports.hpp"

#include <cmath>
#include <limits>

#include "homsim/jsonio.hpp"
#include "homsim/validate.hpp"

namespace homsim::cli {

using experiment::ExperimentParams;
using experiment::Method;
using experiment::SourcePair;
using jsonio::Writer;

namespace {

const char* source_pair_name(SourcePair s) {
    switch (s) {
        case SourcePair::single_vs_coherent: return "single_vs_coherent";
        case SourcePair::single_vs_single: return "single_vs_single";
        case SourcePair::coherent_vs_coherent_phase_averaged:
            return "coherent_vs_coherent_phase_averaged";
    }
    return "?";
}

void write_inputs(Writer& w, const RunConfig& cfg) {
    w.key("inputs").begin_object();
    w.key("source_pair").value(source_pair_name(cfg.params.source_pair));
    w.key("transmittance").value(cfg.params.transmittance);
    w.key("dark_prob").value(cfg.params.dark_prob);
    w.key("mean_photon_number").value(cfg.params.mean_photon_number);
    w.key("cutoff").value(cfg.params.cutoff);
    w.key("composition").value(cfg.composition_note);
    if (cfg.params.spectral.has_shape()) {
        w.key("sigma_heralded_rad_s").value(cfg.params.spectral.heralded().sigma_omega);
        w.key("sigma_coherent_rad_s").value(cfg.params.spectral.coherent().sigma_omega);
    }
    if (cfg.v0)
        w.key("v0").value(*cfg.v0);
    else
        w.key("v0").value_null();
    w.end_object();
}

}  // namespace

std::string render_overlap(const RunConfig& cfg) {
    if (!cfg.params.spectral.has_shape() &&
        (cfg.heralded_arm.empty() || cfg.coherent_arm.empty()))
        throw config_error("overlap: spectral arm specifications are required");

    const spectral::SpectralWidth& p = cfg.params.spectral.heralded();
    const spectral::SpectralWidth& q = cfg.params.spectral.coherent();
    const double v0_widths = spectral::overlap_v_closed(p, q, 0.0);
    const double fwhm = spectral::dip_fwhm(p, q);

    Writer w;
    w.begin_object();
    w.key("command").value("overlap");
    write_inputs(w, cfg);
    w.key("derived").begin_object();
    w.key("sigma_heralded_rad_s").value(p.sigma_omega);
    w.key("sigma_coherent_rad_s").value(q.sigma_omega);
    w.key("v0_widths_model").value(v0_widths);
    w.key("v0_used").value(cfg.params.spectral.peak());
    w.key("overlap_fwhm_s").value(fwhm);
    w.key("overlap_fwhm_mm_optical_path").value(fwhm * spectral::speed_of_light * 1e3);
    w.end_object();
    w.end_object();
    return w.str();
}

DipDocuments render_dip(const RunConfig& cfg) {
    if (!cfg.params.spectral.has_shape())
        throw config_error("dip: a delay scan needs spectral arm widths, not just a direct V0");

    const std::vector<double> delays = cfg.grid.make();
    const experiment::DipCurve exact =
        experiment::scan_dip(cfg.params, delays, Method::exact);

    // Closed-form ratio column; undefined (null) when x = 0.
    std::vector<double> closed_ratio;
    const bool closed_defined = cfg.params.source_pair == SourcePair::single_vs_coherent &&
                                cfg.params.mean_photon_number > 0.0;
    if (closed_defined) {
        const experiment::DipCurve closed =
            experiment::scan_dip(cfg.params, delays, Method::closed_form);
        closed_ratio = closed.probabilities;  // baseline of the bracket is 1 at v = 0
    } else {
        closed_ratio.assign(delays.size(), std::numeric_limits<double>::quiet_NaN());
    }

    experiment::DipCurve fitted;
    if (cfg.method == Method::closed_form) {
        if (!closed_defined)
            throw std::domain_error(
                "dip: the closed form needs the single-photon vs coherent pair with "
                "|alpha|^2 > 0; use --method exact");
        experiment::DipCurve c;
        c.delays = delays;
        c.probabilities = closed_ratio;
        fitted = experiment::fit_gaussian_dip(c);
    } else {
        fitted = experiment::fit_gaussian_dip(exact);
    }
    const experiment::GaussianDipFit& fit = *fitted.fit;

    Writer w;
    w.begin_object();
    w.key("command").value("dip");
    write_inputs(w, cfg);
    w.key("derived").begin_object();
    w.key("method_for_fit").value(cfg.method == Method::exact ? "exact" : "closed");
    w.key("v0_used").value(cfg.params.spectral.peak());
    w.key("p_baseline_exact").value(
        experiment::coincidence_exact_at_overlap(cfg.params, 0.0));
    w.end_object();
    w.key("curve").begin_object();
    w.key("delay_s").begin_array();
    for (double t : delays) w.value(t);
    w.end_array();
    w.key("p_exact").begin_array();
    for (double p : exact.probabilities) w.value(p);
    w.end_array();
    w.key("p_closed_ratio").begin_array();
    for (double p : closed_ratio) {
        if (std::isnan(p))
            w.value_null();
        else
            w.value(p);
    }
    w.end_array();
    w.end_object();
    w.key("fit").begin_object();
    w.key("visibility").value(fit.visibility);
    w.key("fwhm_s").value(fit.fwhm);
    w.key("center_s").value(fit.center);
    w.key("baseline").value(fit.baseline);
    w.key("degenerate").value(fit.degenerate);
    w.end_object();
    w.end_object();

    DipDocuments docs;
    docs.json = w.str();

    std::string csv = "delay_s,p_exact,p_closed_ratio\n";
    for (std::size_t i = 0; i < delays.size(); ++i) {
        csv += jsonio::format_double(delays[i]);
        csv += ',';
        csv += jsonio::format_double(exact.probabilities[i]);
        csv += ',';
        csv += std::isnan(closed_ratio[i]) ? "nan" : jsonio::format_double(closed_ratio[i]);
        csv += '\n';
    }
    docs.csv = csv;
    return docs;
}

std::string render_visibility(const RunConfig& cfg) {
    const double vis_exact = experiment::visibility(cfg.params, Method::exact);
    const bool closed_defined = cfg.params.source_pair == SourcePair::single_vs_coherent &&
                                cfg.params.mean_photon_number > 0.0;

    Writer w;
    w.begin_object();
    w.key("command").value("visibility");
    write_inputs(w, cfg);
    w.key("derived").begin_object();
    w.key("v0_used").value(cfg.params.spectral.peak());
    w.key("visibility_exact").value(vis_exact);
    if (closed_defined)
        w.key("visibility_closed").value(
            experiment::visibility(cfg.params, Method::closed_form));
    else
        w.key("visibility_closed").value_null();
    w.key("method").value(cfg.method == Method::exact ? "exact" : "closed");
    w.end_object();
    w.end_object();
    return w.str();
}

std::string render_optimize(const RunConfig& cfg) {
    const double T = cfg.params.transmittance;
    const double d = cfg.params.dark_prob;
    const experiment::OptimalBrightness opt = experiment::optimal_mean_photon_number(T, d);

    Writer w;
    w.begin_object();
    w.key("command").value("optimize");
    write_inputs(w, cfg);
    w.key("derived").begin_object();
    if (!opt.interior) {
        w.key("interior_optimum").value(false);
        w.key("note").value(
            "no interior optimum at d = 0; the coincidence floor decreases "
            "monotonically as the brightness is lowered");
    } else {
        w.key("interior_optimum").value(true);
        w.key("x_star_numeric").value(opt.x_numeric);
        w.key("x_star_analytic").value(opt.x_analytic);

        ExperimentParams at_opt = cfg.params;
        at_opt.source_pair = SourcePair::single_vs_coherent;
        at_opt.mean_photon_number = opt.x_numeric;
        w.key("visibility_at_x_star").value(
            experiment::visibility(at_opt, Method::closed_form));
        if (cfg.params.mean_photon_number > 0.0) {
            ExperimentParams at_cfg = at_opt;
            at_cfg.mean_photon_number = cfg.params.mean_photon_number;
            w.key("visibility_at_configured_x").value(
                experiment::visibility(at_cfg, Method::closed_form));
        } else {
            w.key("visibility_at_configured_x").value_null();
        }
    }
    w.end_object();
    w.end_object();
    return w.str();
}

ValidateOutcome render_validate(const RunConfig& cfg) {
    const std::vector<validate::CheckResult> results = validate::run_all(cfg.params);

    Writer w;
    w.begin_object();
    w.key("command").value("validate");
    write_inputs(w, cfg);
    w.key("checks").begin_array();
    for (const validate::CheckResult& r : results) {
        w.begin_object();
        w.key("name").value(r.name);
        w.key("pass").value(r.pass);
        w.key("detail").value(r.detail);
        w.end_object();
    }
    w.end_array();
    const bool ok = validate::all_passed(results);
    w.key("all_pass").value(ok);
    w.end_object();
    return {w.str(), ok};
}

}  // namespace homsim::cli

#include "homsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace homsim::cli {

using nlohmann::json;

std::vector<double> DelayGridSpec::make() const {
    if (steps < 3) throw config_error("delay_grid: steps must be >= 3");
    if (!(stop_s > start_s)) throw config_error("delay_grid: stop must exceed start");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        out.push_back(start_s + (stop_s - start_s) * i / (steps - 1));
    return out;
}

double mm_to_delay_s(double mm, MmConvention conv) {
    const double path_m = (conv == MmConvention::stage_travel ? 2.0 : 1.0) * mm * 1e-3;
    return path_m / spectral::speed_of_light;
}

namespace {

struct Quantity {
    double value;
    std::string unit;  // empty for bare numbers
};

Quantity split_quantity(const std::string& text) {
    std::istringstream in(text);
    double v;
    if (!(in >> v)) throw config_error("cannot parse quantity '" + text + "'");
    std::string unit;
    in >> unit;
    std::string rest;
    if (in >> rest) throw config_error("trailing content in quantity '" + text + "'");
    return {v, unit};
}

}  // namespace

double parse_time_s(const std::string& text, MmConvention mm) {
    const Quantity q = split_quantity(text);
    if (q.unit.empty() || q.unit == "s") return q.value;
    if (q.unit == "ms") return q.value * 1e-3;
    if (q.unit == "us") return q.value * 1e-6;
    if (q.unit == "ns") return q.value * 1e-9;
    if (q.unit == "ps") return q.value * 1e-12;
    if (q.unit == "fs") return q.value * 1e-15;
    if (q.unit == "mm") return mm_to_delay_s(q.value, mm);
    throw config_error("unknown time unit '" + q.unit + "' in '" + text + "'");
}

double parse_length_m(const std::string& text) {
    const Quantity q = split_quantity(text);
    if (q.unit.empty() || q.unit == "m") return q.value;
    if (q.unit == "mm") return q.value * 1e-3;
    if (q.unit == "um") return q.value * 1e-6;
    if (q.unit == "nm") return q.value * 1e-9;
    if (q.unit == "pm") return q.value * 1e-12;
    throw config_error("unknown length unit '" + q.unit + "' in '" + text + "'");
}

namespace {

double time_field(const json& j, const char* where, MmConvention mm) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_time_s(j.get<std::string>(), mm);
    throw config_error(std::string(where) + ": expected a number (seconds) or a unit string");
}

double length_field(const json& j, const char* where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_length_m(j.get<std::string>());
    throw config_error(std::string(where) + ": expected a number (meters) or a unit string");
}

spectral::FilterSpec parse_filter(const json& j, const std::string& where) {
    if (!j.is_object()) throw config_error(where + ": filter entries must be objects");
    spectral::FilterSpec f{};
    if (j.contains("time_fwhm")) {
        f.kind = spectral::FilterSpec::Kind::time_fwhm;
        f.value = time_field(j.at("time_fwhm"), where.c_str(), MmConvention::optical_path);
    } else if (j.contains("wavelength_fwhm")) {
        f.kind = spectral::FilterSpec::Kind::wavelength_fwhm;
        f.value = length_field(j.at("wavelength_fwhm"), where.c_str());
        if (!j.contains("center"))
            throw config_error(where + ": wavelength_fwhm requires a 'center' wavelength");
        f.center_wavelength = length_field(j.at("center"), where.c_str());
    } else {
        throw config_error(where + ": filter needs 'time_fwhm' or 'wavelength_fwhm'");
    }
    return f;
}

std::string describe_filter(const spectral::FilterSpec& f) {
    std::ostringstream os;
    os.precision(4);
    if (f.kind == spectral::FilterSpec::Kind::time_fwhm)
        os << "pulse " << f.value * 1e12 << " ps";
    else
        os << f.value * 1e9 << " nm @ " << f.center_wavelength * 1e9 << " nm";
    return os.str();
}

std::string describe_arm(const std::vector<spectral::FilterSpec>& arm) {
    std::string out = "[";
    for (std::size_t i = 0; i < arm.size(); ++i) {
        if (i) out += ", ";
        out += describe_filter(arm[i]);
    }
    return out + "]";
}

spectral::SpectralWidth arm_width(const std::vector<spectral::FilterSpec>& arm) {
    std::vector<spectral::SpectralWidth> ws;
    ws.reserve(arm.size());
    for (const spectral::FilterSpec& f : arm) ws.push_back(spectral::to_width(f));
    return spectral::cascade_widths(ws);
}

void assemble_spectral(RunConfig& cfg) {
    const bool have_arms = !cfg.heralded_arm.empty() && !cfg.coherent_arm.empty();
    if (have_arms) {
        const spectral::SpectralWidth p = arm_width(cfg.heralded_arm);
        const spectral::SpectralWidth w = arm_width(cfg.coherent_arm);
        if (cfg.v0)
            cfg.params.spectral = experiment::SpectralInput::widths_with_peak(p, w, *cfg.v0);
        else
            cfg.params.spectral = experiment::SpectralInput::from_widths(p, w);
        cfg.composition_note = "heralded arm " + describe_arm(cfg.heralded_arm) +
                               ", coherent arm " + describe_arm(cfg.coherent_arm) +
                               (cfg.v0 ? ", peak overlap pinned to supplied V0" : "");
    } else if (cfg.v0) {
        cfg.params.spectral = experiment::SpectralInput::direct(*cfg.v0);
        cfg.composition_note = "direct V0, no spectral shape";
    } else {
        throw config_error("spectral: supply arm filter lists, a direct 'v0', or both");
    }
}

}  // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.params.transmittance = 0.0008;
    cfg.params.dark_prob = 1.9e-5;
    cfg.params.mean_photon_number = 0.43;
    cfg.params.source_pair = experiment::SourcePair::single_vs_coherent;
    cfg.params.cutoff = 16;

    using FK = spectral::FilterSpec::Kind;
    cfg.heralded_arm = {
        {FK::wavelength_fwhm, 0.2e-9, 780e-9},   // herald-side grating
        {FK::wavelength_fwhm, 0.3e-9, 780e-9},   // converter acceptance
        {FK::wavelength_fwhm, 1.0e-9, 1522e-9},  // telecom-side grating
    };
    cfg.coherent_arm = {
        {FK::time_fwhm, 1.2e-12, 0.0},           // laser pulse
        {FK::wavelength_fwhm, 0.3e-9, 780e-9},
        {FK::wavelength_fwhm, 1.0e-9, 1522e-9},
    };
    cfg.v0 = 0.99;
    assemble_spectral(cfg);
    cfg.params.validate();
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // Map the byte offset to a line/column for the diagnostic.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw config_error("JSON parse error at line " + std::to_string(line) + ", column " +
                           std::to_string(col) + ": " + e.what());
    }
    if (!j.is_object()) throw config_error("config root must be a JSON object");

    RunConfig cfg = default_config();
    // An explicit spectral block replaces the default composition entirely.
    try {
        if (j.contains("transmittance")) cfg.params.transmittance = j.at("transmittance").get<double>();
        if (j.contains("dark_prob")) cfg.params.dark_prob = j.at("dark_prob").get<double>();
        if (j.contains("mean_photon_number"))
            cfg.params.mean_photon_number = j.at("mean_photon_number").get<double>();
        if (j.contains("cutoff")) cfg.params.cutoff = j.at("cutoff").get<int>();

        if (j.contains("source_pair")) {
            const std::string s = j.at("source_pair").get<std::string>();
            if (s == "single_vs_coherent")
                cfg.params.source_pair = experiment::SourcePair::single_vs_coherent;
            else if (s == "single_vs_single")
                cfg.params.source_pair = experiment::SourcePair::single_vs_single;
            else if (s == "coherent_vs_coherent_phase_averaged")
                cfg.params.source_pair =
                    experiment::SourcePair::coherent_vs_coherent_phase_averaged;
            else
                throw config_error("source_pair: unknown value '" + s + "'");
        }

        if (j.contains("mm_convention")) {
            const std::string s = j.at("mm_convention").get<std::string>();
            if (s == "optical_path")
                cfg.mm_convention = MmConvention::optical_path;
            else if (s == "stage_travel")
                cfg.mm_convention = MmConvention::stage_travel;
            else
                throw config_error("mm_convention: expected 'optical_path' or 'stage_travel'");
        }

        if (j.contains("spectral")) {
            const json& sp = j.at("spectral");
            if (!sp.is_object()) throw config_error("spectral: must be an object");
            cfg.heralded_arm.clear();
            cfg.coherent_arm.clear();
            cfg.v0.reset();
            if (sp.contains("heralded_arm")) {
                int i = 0;
                for (const json& f : sp.at("heralded_arm"))
                    cfg.heralded_arm.push_back(
                        parse_filter(f, "spectral.heralded_arm[" + std::to_string(i++) + "]"));
            }
            if (sp.contains("coherent_arm")) {
                int i = 0;
                for (const json& f : sp.at("coherent_arm"))
                    cfg.coherent_arm.push_back(
                        parse_filter(f, "spectral.coherent_arm[" + std::to_string(i++) + "]"));
            }
            if (sp.contains("v0")) cfg.v0 = sp.at("v0").get<double>();
            assemble_spectral(cfg);
        }

        if (j.contains("delay_grid")) {
            const json& g = j.at("delay_grid");
            if (!g.is_object()) throw config_error("delay_grid: must be an object");
            if (g.contains("start"))
                cfg.grid.start_s = time_field(g.at("start"), "delay_grid.start", cfg.mm_convention);
            if (g.contains("stop"))
                cfg.grid.stop_s = time_field(g.at("stop"), "delay_grid.stop", cfg.mm_convention);
            if (g.contains("steps")) cfg.grid.steps = g.at("steps").get<int>();
            if (cfg.grid.steps < 3) throw config_error("delay_grid.steps: must be >= 3");
        }

        if (j.contains("method")) {
            const std::string s = j.at("method").get<std::string>();
            if (s == "exact")
                cfg.method = experiment::Method::exact;
            else if (s == "closed")
                cfg.method = experiment::Method::closed_form;
            else
                throw config_error("method: expected 'exact' or 'closed'");
        }

        if (j.contains("output")) {
            const json& o = j.at("output");
            if (o.contains("format")) {
                const std::string s = o.at("format").get<std::string>();
                if (s == "json")
                    cfg.output.format = OutputSpec::Format::json;
                else if (s == "csv")
                    cfg.output.format = OutputSpec::Format::csv;
                else
                    throw config_error("output.format: expected 'json' or 'csv'");
            }
            if (o.contains("path")) cfg.output.path = o.at("path").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("config field error: ") + e.what());
    }

    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("invalid parameters: ") + e.what());
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace homsim::cli

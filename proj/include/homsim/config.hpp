#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "homsim/experiment.hpp"
#include "homsim/spectral.hpp"

// Run configuration for the CLI: JSON in, validated parameters out.
// Quantities are strings with explicit unit suffixes ("1.2 ps", "0.2 nm",
// "2.9 mm") or bare numbers in SI units; everything is stored in SI.

namespace homsim::cli {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MmConvention {
    // The millimetre axis quotes the optical path-length change directly:
    // delay = d / c. A 2.9 mm dip width maps to ~9.67 ps. Default, since a
    // double-passed delay stage reports path length, not carriage travel.
    optical_path,
    // The millimetre axis is carriage travel of a double-passed stage:
    // delay = 2 d / c. 2.9 mm maps to ~19.35 ps.
    stage_travel,
};

struct DelayGridSpec {
    double start_s = -25e-12;
    double stop_s = 25e-12;
    int steps = 101;

    std::vector<double> make() const;
};

struct OutputSpec {
    enum class Format { json, csv };
    Format format = Format::json;
    std::string path;  // empty = stdout
};

struct RunConfig {
    experiment::ExperimentParams params;

    // Retained for reporting: the filter stacks behind the arm widths.
    std::vector<spectral::FilterSpec> heralded_arm;
    std::vector<spectral::FilterSpec> coherent_arm;
    std::optional<double> v0;  // direct overlap, or peak override over widths
    std::string composition_note;

    DelayGridSpec grid;
    MmConvention mm_convention = MmConvention::optical_path;
    experiment::Method method = experiment::Method::exact;
    OutputSpec output;
};

// Built-in defaults: the observed operating point (T = 8e-4, d = 1.9e-5,
// |alpha|^2 = 0.43), the four-filter Gaussian composition model for the
// arm widths, and a 0.99 peak-overlap override.
RunConfig default_config();

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

// "1.2 ps" -> 1.2e-12. Bare numbers are seconds. mm needs the stage
// convention to become a delay.
double parse_time_s(const std::string& text, MmConvention mm);
double parse_length_m(const std::string& text);

double mm_to_delay_s(double mm, MmConvention conv);

}  // namespace homsim::cli

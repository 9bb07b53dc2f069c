#pragma once

#include <string>

#include "homsim/config.hpp"

// Renderers behind the CLI subcommands. Each returns the complete output
// document so the front end only handles argument parsing, file writes and
// exit codes, and so tests can inspect documents without spawning a
// process.

namespace homsim::cli {

std::string render_overlap(const RunConfig& cfg);

struct DipDocuments {
    std::string json;
    std::string csv;
};
DipDocuments render_dip(const RunConfig& cfg);

std::string render_visibility(const RunConfig& cfg);
std::string render_optimize(const RunConfig& cfg);

struct ValidateOutcome {
    std::string json;
    bool all_pass = false;
};
ValidateOutcome render_validate(const RunConfig& cfg);

}  // namespace homsim::cli

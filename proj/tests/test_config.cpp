#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homsim/config.hpp"
#include "homsim/jsonio.hpp"
#include "homsim/reports.hpp"

using namespace homsim;
using cli::config_error;
using cli::MmConvention;
using cli::RunConfig;

TEST_CASE("quantity parsing with unit suffixes") {
    CHECK(cli::parse_time_s("1.2 ps", MmConvention::optical_path) ==
          doctest::Approx(1.2e-12).epsilon(1e-15));
    CHECK(cli::parse_time_s("-25 ps", MmConvention::optical_path) ==
          doctest::Approx(-25e-12).epsilon(1e-15));
    CHECK(cli::parse_time_s("3 ns", MmConvention::optical_path) ==
          doctest::Approx(3e-9).epsilon(1e-15));
    CHECK(cli::parse_time_s("4.5e-12", MmConvention::optical_path) ==
          doctest::Approx(4.5e-12).epsilon(1e-15));

    CHECK(cli::parse_length_m("0.2 nm") == doctest::Approx(0.2e-9).epsilon(1e-15));
    CHECK(cli::parse_length_m("780 nm") == doctest::Approx(780e-9).epsilon(1e-15));
    CHECK(cli::parse_length_m("2.9 mm") == doctest::Approx(2.9e-3).epsilon(1e-15));

    CHECK_THROWS_AS(cli::parse_time_s("1.2 parsec", MmConvention::optical_path), config_error);
    CHECK_THROWS_AS(cli::parse_time_s("abc", MmConvention::optical_path), config_error);
    CHECK_THROWS_AS(cli::parse_time_s("1 2 ps", MmConvention::optical_path), config_error);
}

TEST_CASE("stage millimetres convert to delay under both conventions") {
    // 2.9 mm of optical path is ~9.67 ps; as double-passed carriage travel
    // it is twice that.
    const double path = cli::mm_to_delay_s(2.9, MmConvention::optical_path);
    CHECK(path == doctest::Approx(2.9e-3 / 299792458.0).epsilon(1e-15));
    CHECK(path == doctest::Approx(9.673356e-12).epsilon(1e-6));
    const double travel = cli::mm_to_delay_s(2.9, MmConvention::stage_travel);
    CHECK(travel == doctest::Approx(2.0 * path).epsilon(1e-15));
    CHECK(travel == doctest::Approx(19.346712e-12).epsilon(1e-6));

    CHECK(cli::parse_time_s("2.9 mm", MmConvention::optical_path) ==
          doctest::Approx(path).epsilon(1e-15));
}

TEST_CASE("default configuration carries the observed operating point") {
    const RunConfig cfg = cli::default_config();
    CHECK(cfg.params.transmittance == doctest::Approx(0.0008));
    CHECK(cfg.params.dark_prob == doctest::Approx(1.9e-5));
    CHECK(cfg.params.mean_photon_number == doctest::Approx(0.43));
    CHECK(cfg.params.cutoff == 16);
    REQUIRE(cfg.v0.has_value());
    CHECK(*cfg.v0 == doctest::Approx(0.99));
    CHECK(cfg.params.spectral.has_shape());
    CHECK(cfg.params.spectral.peak() == doctest::Approx(0.99).epsilon(1e-12));
    // the widths-only composition sits near 0.955
    CHECK(spectral::overlap_v_closed(cfg.params.spectral.heralded(),
                                     cfg.params.spectral.coherent(), 0.0) ==
          doctest::Approx(0.95473852638281753).epsilon(1e-12));
}

TEST_CASE("config parsing covers fields, spectral forms and errors") {
    const RunConfig direct = cli::parse_config_text(R"({
        "transmittance": 0.001,
        "dark_prob": 1e-5,
        "mean_photon_number": 0.31,
        "source_pair": "single_vs_single",
        "spectral": {"v0": 0.97},
        "delay_grid": {"start": "-10 ps", "stop": "10 ps", "steps": 21},
        "method": "closed",
        "output": {"format": "csv", "path": "out.csv"}
    })");
    CHECK(direct.params.transmittance == doctest::Approx(0.001));
    CHECK(direct.params.source_pair == experiment::SourcePair::single_vs_single);
    CHECK_FALSE(direct.params.spectral.has_shape());
    CHECK(direct.params.spectral.peak() == doctest::Approx(0.97));
    CHECK(direct.grid.steps == 21);
    CHECK(direct.grid.start_s == doctest::Approx(-10e-12));
    CHECK(direct.method == experiment::Method::closed_form);
    CHECK(direct.output.format == cli::OutputSpec::Format::csv);
    CHECK(direct.output.path == "out.csv");

    const RunConfig arms = cli::parse_config_text(R"({
        "spectral": {
            "heralded_arm": [{"wavelength_fwhm": "0.2 nm", "center": "780 nm"}],
            "coherent_arm": [{"time_fwhm": "1.2 ps"}]
        }
    })");
    CHECK(arms.params.spectral.has_shape());
    CHECK_FALSE(arms.v0.has_value());
    CHECK(arms.params.spectral.peak() < 1.0);

    const RunConfig pinned = cli::parse_config_text(R"({
        "spectral": {
            "heralded_arm": [{"wavelength_fwhm": "0.2 nm", "center": "780 nm"}],
            "coherent_arm": [{"time_fwhm": "1.2 ps"}],
            "v0": 0.99
        }
    })");
    CHECK(pinned.params.spectral.peak() == doctest::Approx(0.99).epsilon(1e-12));

    // identical arms overlap perfectly at zero delay
    const RunConfig same = cli::parse_config_text(R"({
        "spectral": {
            "heralded_arm": [{"wavelength_fwhm": "0.2 nm", "center": "780 nm"},
                             {"time_fwhm": "1.2 ps"}],
            "coherent_arm": [{"wavelength_fwhm": "0.2 nm", "center": "780 nm"},
                             {"time_fwhm": "1.2 ps"}]
        }
    })");
    CHECK(same.params.spectral.peak() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(cli::parse_config_text("{nope"), config_error);
    CHECK_THROWS_AS(cli::parse_config_text(R"({"transmittance": "lots"})"), config_error);
    CHECK_THROWS_AS(cli::parse_config_text(R"({"transmittance": 2.0})"), config_error);
    CHECK_THROWS_AS(cli::parse_config_text(R"({"source_pair": "banana"})"), config_error);
    CHECK_THROWS_AS(cli::parse_config_text(R"({"delay_grid": {"steps": 2}})"), config_error);
    CHECK_THROWS_AS(cli::parse_config_text(R"({"spectral": {}})"), config_error);
    CHECK_THROWS_AS(
        cli::parse_config_text(
            R"({"spectral": {"heralded_arm": [{"wavelength_fwhm": "0.2 nm"}],
                 "coherent_arm": [{"time_fwhm": "1.2 ps"}]}})"),
        config_error);

    // parse errors carry a line/column diagnostic
    try {
        cli::parse_config_text("{\n  \"transmittance\": 0.1,\n  !\n}");
        CHECK(false);
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("delay grid generation") {
    cli::DelayGridSpec g{-2e-12, 2e-12, 5};
    const std::vector<double> grid = g.make();
    REQUIRE(grid.size() == 5);
    CHECK(grid.front() == doctest::Approx(-2e-12));
    CHECK(grid.back() == doctest::Approx(2e-12));
    CHECK(grid[2] == doctest::Approx(0.0).scale(1e-15));

    cli::DelayGridSpec bad{0.0, 1e-12, 2};
    CHECK_THROWS_AS(bad.make(), config_error);
    cli::DelayGridSpec inverted{1e-12, -1e-12, 5};
    CHECK_THROWS_AS(inverted.make(), config_error);
}

TEST_CASE("json writer emits deterministic 17-digit documents") {
    jsonio::Writer w;
    w.begin_object();
    w.key("a").value(0.1);
    w.key("b").begin_array().value(1).value(2.5).value_null().end_array();
    w.key("c").value("x\"y");
    w.key("d").value(true);
    w.end_object();
    CHECK(w.str() ==
          "{\"a\":0.10000000000000001,\"b\":[1,2.5,null],\"c\":\"x\\\"y\",\"d\":true}");

    CHECK(jsonio::format_double(0.71969188666585659) == "0.71969188666585659");
    CHECK(jsonio::format_double(std::nan("")) == "null");
}

TEST_CASE("report renderers produce consistent documents") {
    RunConfig cfg = cli::default_config();
    cfg.grid = {-10e-12, 10e-12, 11};

    const std::string overlap = cli::render_overlap(cfg);
    CHECK(overlap.find("\"v0_widths_model\":0.95473852638281753") != std::string::npos);
    CHECK(overlap.find("\"v0_used\":" + jsonio::format_double(0.99)) != std::string::npos);
    CHECK(overlap.find("overlap_fwhm_s") != std::string::npos);

    const cli::DipDocuments dip = cli::render_dip(cfg);
    CHECK(dip.json.find("\"curve\"") != std::string::npos);
    CHECK(dip.csv.rfind("delay_s,p_exact,p_closed_ratio\n", 0) == 0);
    // identical run, identical bytes
    const cli::DipDocuments again = cli::render_dip(cfg);
    CHECK(dip.json == again.json);
    CHECK(dip.csv == again.csv);

    const std::string vis = cli::render_visibility(cfg);
    CHECK(vis.find("\"visibility_exact\":") != std::string::npos);

    const std::string opt = cli::render_optimize(cfg);
    CHECK(opt.find("\"x_star_numeric\":0.31") != std::string::npos);

    RunConfig nodark = cfg;
    nodark.params.dark_prob = 0.0;
    const std::string boundary = cli::render_optimize(nodark);
    CHECK(boundary.find("\"interior_optimum\":false") != std::string::npos);
    CHECK(boundary.find("no interior optimum") != std::string::npos);

    // a dip scan needs a spectral shape
    RunConfig shapeless = cli::parse_config_text(R"({"spectral": {"v0": 0.99}})");
    CHECK_THROWS_AS(cli::render_dip(shapeless), config_error);
}

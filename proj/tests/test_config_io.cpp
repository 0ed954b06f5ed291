#include "wavekin/config.hpp"
#include "wavekin/errors.hpp"
#include "wavekin/io.hpp"
#include "wavekin/scenarios.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wavekin;
using scenarios::Scenario;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "wavekin_test_config_io" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::size_t error_line(const std::string& text)
{
    try {
        config::parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    FAIL("no ConfigError for:\n" << text);
    return 0;
}

std::string error_message(const std::function<void()>& f)
{
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

const char* kSmall = R"(name: small
description: short matter run
kind: eigenstate_steady
field: {type: box_eigenstate, quantum_number: 1, box_length: 1, mass: 1}
kinetics: {mode: matter, omega: 1, tau: 1}
region: [0, 1]
grid_points: 21
bins: 10
t_end: 30
dt: 0.05
record_every: 10
seed: 8
ensemble: 200
transient_lifetimes: 20
thresholds:
  born_ratio_error: {max: 1.0e-6}
)";

} // namespace

TEST_CASE("every preset survives a YAML round trip", "[config]")
{
    for (const auto& s : scenarios::registry()) {
        const std::string text = config::to_yaml(s);
        const Scenario back = config::parse_scenario(text);
        CHECK(config::to_yaml(back) == text);
        CHECK(back.params == s.params);
        CHECK(back.t_end == s.t_end);
        CHECK(back.dt == s.dt);
        CHECK(back.seed == s.seed);
        CHECK(back.thresholds == s.thresholds);
        CHECK(back.checkpoints == s.checkpoints);
    }
}

TEST_CASE("a complete scenario file parses", "[config]")
{
    const Scenario s = config::parse_scenario(kSmall);
    CHECK(s.name == "small");
    CHECK(s.kind == scenarios::Kind::EigenstateSteady);
    CHECK(s.grid_points == 21);
    CHECK(s.seed == 8);
    CHECK(s.params.tau() == 1.0);
    CHECK(s.thresholds.at("born_ratio_error").value == 1e-6);
    CHECK(s.thresholds.at("born_ratio_error").bound == scenarios::Threshold::Bound::Max);
}

TEST_CASE("base presets are overridden key by key", "[config]")
{
    const Scenario s = config::parse_scenario(R"(base: wiener_normal
name: wiener_short
t_end: 20
kinetics: {tau: 0.5}
thresholds:
  visibility: {max: 0.5}
)");
    const auto& base = scenarios::find_scenario("wiener_normal");
    CHECK(s.name == "wiener_short");
    CHECK(s.t_end == 20.0);
    CHECK(s.params.tau() == 0.5);
    CHECK(s.params.omega() == base.params.omega());
    CHECK(s.params.calibration_product() == 1.0);
    CHECK(s.region == base.region);
    CHECK(s.thresholds.at("visibility").bound == scenarios::Threshold::Bound::Max);
    CHECK(s.thresholds.at("chi_square_p") == base.thresholds.at("chi_square_p"));
}

TEST_CASE("unknown keys are reported with their line", "[config]")
{
    CHECK(error_line("name: a\nkind: wiener\nnmae: b\n") == 3);
    const std::string msg = error_message([] { config::parse_scenario("name: a\nnmae: b\n"); });
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("nmae") != std::string::npos);
    CHECK(msg.find("allowed") != std::string::npos);

    std::string nested = kSmall;
    nested.replace(nested.find("tau: 1}"), 7, "tau: 1, tua: 2}");
    CHECK(error_line(nested) == 5);
}

TEST_CASE("malformed values are reported with their line", "[config]")
{
    std::string bad = kSmall;
    bad.replace(bad.find("t_end: 30"), 9, "t_end: soon");
    CHECK(error_line(bad) == 9);

    std::string negative = kSmall;
    negative.replace(negative.find("grid_points: 21"), 15, "grid_points: -3");
    CHECK(error_line(negative) == 7);

    CHECK(error_line("name: a\nregion: [0, 1\n") >= 2);
    CHECK_THROWS_AS(config::parse_scenario("- just\n- a list\n"), ConfigError);
    CHECK_THROWS_AS(config::parse_scenario("base: no_such_preset\n"), ConfigError);
}

TEST_CASE("inconsistent kinetic parameters are rejected", "[config]")
{
    std::string both = kSmall;
    both.replace(both.find("tau: 1}"), 7, "tau: 3, gamma: 0.1}");
    CHECK_THROWS_AS(config::parse_scenario(both), ConfigError);
    std::string consistent = kSmall;
    consistent.replace(consistent.find("tau: 1}"), 7, "tau: 1, gamma: 1.0000000000000002}");
    CHECK(config::parse_scenario(consistent).params.tau() == 1.0);
}

TEST_CASE("invalid scenarios are rejected at parse time", "[config]")
{
    std::string coarse = kSmall;
    coarse.replace(coarse.find("dt: 0.05"), 8, "dt: 0.5");
    CHECK_THROWS_AS(config::parse_scenario(coarse), ConfigError);
    std::string optical = kSmall;
    optical.replace(optical.find("mode: matter"), 12, "mode: photon");
    CHECK_THROWS_AS(config::parse_scenario(optical), ConfigError);
}

TEST_CASE("overrides edit single keys", "[config]")
{
    Scenario s = scenarios::find_scenario("born_violation");
    config::apply_override(s, "seed=123");
    config::apply_override(s, "kinetics.tau=2");
    config::apply_override(s, "thresholds.born_deviation.max=0.9");
    config::apply_override(s, "drive.half_period=2");
    CHECK(s.seed == 123);
    CHECK(s.params.tau() == 2.0);
    CHECK(s.thresholds.at("born_deviation").bound == scenarios::Threshold::Bound::Max);
    CHECK(s.thresholds.at("born_deviation").value == 0.9);
    CHECK(std::get<scenarios::SquareDrive>(s.drive).half_period == 2.0);

    CHECK_THROWS_AS(config::apply_override(s, "seed"), ConfigError);
    CHECK_THROWS_AS(config::apply_override(s, "sede=1"), ConfigError);
    CHECK_THROWS_AS(config::apply_override(s, "seed=abc"), ConfigError);
    CHECK_THROWS_AS(config::apply_override(s, "kinetics..tau=1"), ConfigError);
    CHECK(s.seed == 123);
}

TEST_CASE("the template is a valid scenario", "[config]")
{
    const Scenario s = config::parse_scenario(config::template_text());
    CHECK_NOTHROW(scenarios::validate(s));
    CHECK(s.kind == scenarios::Kind::Wiener);
}

TEST_CASE("scenario files load from disk", "[config]")
{
    const auto dir = scratch("load");
    {
        std::ofstream(dir / "s.yaml") << "base: constant_rate_sanity\nseed: 77\n";
    }
    CHECK(config::load_scenario_file(dir / "s.yaml").seed == 77);
    CHECK_THROWS_AS(config::load_scenario_file(dir / "missing.yaml"), ConfigError);
}

TEST_CASE("density CSV round trip is bit exact", "[io]")
{
    kinetics::DensitySeries d;
    d.mode = kinetics::Mode::Photon;
    d.grid = {0.0, 0.1, 1.0 / 3.0};
    d.times = {0.0, 0.7, 1e-300 + 2.0};
    d.values = {0.0, 1.0 / 7.0, 5e-324, 2.0, 3.141592653589793, 1e300, 0.1, 0.2, 0.30000000000000004};
    std::stringstream buf;
    io::write_density_csv(buf, d);
    const auto back = io::read_density_csv(buf, kinetics::Mode::Photon);
    CHECK(back.grid == d.grid);
    CHECK(back.times == d.times);
    CHECK(back.values == d.values);
    CHECK(back.mode == kinetics::Mode::Photon);
}

TEST_CASE("malformed density CSV is rejected with its line", "[io]")
{
    std::stringstream bad("t,r,value\n0,0,1\n0,1,x\n");
    try {
        io::read_density_csv(bad, kinetics::Mode::Matter);
        FAIL("accepted a malformed file");
    } catch (const FormatError& e) {
        CHECK(e.line() == 3);
    }
    std::stringstream header("time,r,value\n");
    CHECK_THROWS_AS(io::read_density_csv(header, kinetics::Mode::Matter), FormatError);
    std::stringstream ragged("t,r,value\n0,0,1\n0,1,1\n1,0,1\n");
    CHECK_THROWS_AS(io::read_density_csv(ragged, kinetics::Mode::Matter), FormatError);
}

TEST_CASE("event log round trip", "[io]")
{
    const auto params = kinetics::KineticParams::from_tau(kinetics::Mode::Matter, 1.0, 1.0);
    const auto log = pointprocess::simulate(
        params, [](double t, double r) { return 40.0 * (1.0 + std::cos(t * r)); }, {0.0, 2.0},
        5.0, 31);
    REQUIRE(log.events.size() > 100);
    std::stringstream buf;
    io::write_events_ndjson(buf, log);
    const auto back = io::read_events_ndjson(buf);
    CHECK(back == log);

    std::stringstream bad(buf.str() + "{\"kind\":\"rebirth\",\"id\":1,\"position\":0,\"time\":1}\n");
    CHECK_THROWS_AS(io::read_events_ndjson(bad), FormatError);
    std::stringstream empty;
    CHECK_THROWS_AS(io::read_events_ndjson(empty), FormatError);
}

TEST_CASE("histogram and profile round trips", "[io]")
{
    const auto grid = pointprocess::BinGrid::uniform(-1.0, 1.0, 4);
    const auto h = estimators::BinnedDistribution::from_counts(grid, {1.0, 0.0, 7.0, 2.0});
    const std::vector<double> expected = {0.1, 0.2, 0.3, 0.4};
    std::stringstream hb;
    io::write_histogram_csv(hb, h, expected);
    const auto hback = io::read_histogram_csv(hb);
    CHECK(hback.histogram.grid == grid);
    CHECK(hback.histogram.counts == h.counts);
    CHECK(hback.histogram.total == 10.0);
    CHECK(hback.expected == expected);

    const std::vector<double> g = {0.0, 0.5, 1.0};
    const std::vector<double> v = {1.0, 3.0, 1.0};
    std::stringstream pb;
    io::write_profile_csv(pb, g, v);
    const auto pback = io::read_profile_csv(pb);
    CHECK(pback.grid == g);
    CHECK(pback.value == v);
    // Trapezoid integral of v is 2.
    CHECK(pback.density == std::vector<double>{0.5, 1.5, 0.5});
}

TEST_CASE("atomic writes leave no partial files", "[io]")
{
    const auto dir = scratch("atomic");
    const auto target = dir / "out.txt";
    io::write_atomic(target, [](std::ostream& out) { out << "first\n"; });
    CHECK_THROWS(io::write_atomic(target, [](std::ostream& out) {
        out << "partial";
        throw std::runtime_error("writer failed");
    }));
    std::ifstream in(target);
    std::string line;
    std::getline(in, line);
    CHECK(line == "first");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) {
        ++files;
    }
    CHECK(files == 1);
}

TEST_CASE("a run directory parses back into its domain types", "[io]")
{
    const Scenario s = config::parse_scenario(kSmall);
    const auto bundle = scenarios::run_scenario(s);
    const auto dir = scratch("run");
    io::write_run(dir, s, bundle);

    std::ifstream sj(dir / io::kSummaryFile);
    const auto summary = io::read_summary_json(sj);
    CHECK(summary.scenario == "small");
    CHECK(summary.seed == 8);
    CHECK(summary.generator == "splitmix64");
    CHECK(summary.params == bundle.params);
    CHECK(summary.statistics == bundle.statistics);
    CHECK(summary.passed == bundle.passed());
    REQUIRE(summary.checks.size() == bundle.checks.size());
    for (std::size_t i = 0; i < summary.checks.size(); ++i) {
        CHECK(summary.checks[i].statistic == bundle.checks[i].statistic);
        CHECK(summary.checks[i].value == bundle.checks[i].value);
        CHECK(summary.checks[i].threshold == bundle.checks[i].threshold);
    }
    CHECK(summary.files.size() == 5);
    CHECK(summary.files.at("events") == io::kEventsFile);

    std::ifstream dj(dir / io::kDensityFile);
    const auto density = io::read_density_csv(dj, summary.params.mode());
    CHECK(density.values == bundle.density.values);
    CHECK(density.times == bundle.density.times);
    std::ifstream ej(dir / io::kEventsFile);
    CHECK(io::read_events_ndjson(ej) == bundle.events);
    std::ifstream hj(dir / io::kHistogramFile);
    const auto hist = io::read_histogram_csv(hj);
    CHECK(hist.histogram.counts == bundle.histogram.counts);
    CHECK(hist.expected == bundle.expected_pmf);
    std::ifstream pj(dir / io::kProfileFile);
    const auto prof = io::read_profile_csv(pj);
    CHECK(prof.value == bundle.profile);
    CHECK(prof.grid == bundle.profile_grid);
}

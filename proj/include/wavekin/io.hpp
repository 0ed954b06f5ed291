#pragma once

// Run-directory file formats.
//
//   density.csv     t,r,value            one row per (time, grid point)
//   events.ndjson   header line, then {kind, id, position, time} per event
//   histogram.csv   bin_lo,bin_hi,count,expected
//   profile.csv     r,value,density      time-averaged reference density
//   summary.json    statistics, checks, parameters, file manifest
//
// Numbers are written with 17 significant digits, so every file parses back
// to bit-identical doubles.

#include "wavekin/estimators.hpp"
#include "wavekin/kinetics.hpp"
#include "wavekin/pointprocess.hpp"
#include "wavekin/scenarios.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace wavekin::io {

inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kDensityFile = "density.csv";
inline constexpr const char* kEventsFile = "events.ndjson";
inline constexpr const char* kHistogramFile = "histogram.csv";
inline constexpr const char* kProfileFile = "profile.csv";

// Writes through a temporary file in the same directory, then renames it
// over `path`.
void write_atomic(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

void write_density_csv(std::ostream& out, const kinetics::DensitySeries& series);
// The mode is not part of the file; it comes from summary.json.
kinetics::DensitySeries read_density_csv(std::istream& in, kinetics::Mode mode);

void write_events_ndjson(std::ostream& out, const pointprocess::EventLog& log);
pointprocess::EventLog read_events_ndjson(std::istream& in);

struct HistogramFile {
    estimators::BinnedDistribution histogram;
    std::vector<double> expected;
};
void write_histogram_csv(std::ostream& out, const estimators::BinnedDistribution& histogram,
                         const std::vector<double>& expected);
HistogramFile read_histogram_csv(std::istream& in);

struct ProfileFile {
    std::vector<double> grid;
    std::vector<double> value;
    std::vector<double> density;  // value normalized to unit integral over the grid
};
void write_profile_csv(std::ostream& out, const std::vector<double>& grid,
                       const std::vector<double>& value);
ProfileFile read_profile_csv(std::istream& in);

struct Summary {
    std::string scenario;
    std::string description;
    scenarios::Kind kind = scenarios::Kind::Relaxation;
    std::uint64_t seed = 0;
    std::string generator;
    kinetics::KineticParams params =
        kinetics::KineticParams::from_tau(kinetics::Mode::Matter, 1.0, 1.0);
    std::map<std::string, double> statistics;
    std::vector<scenarios::CheckOutcome> checks;
    bool passed = false;
    std::map<std::string, std::string> files;
};
void write_summary_json(std::ostream& out, const scenarios::Scenario& scenario,
                        const scenarios::ResultBundle& bundle);
Summary read_summary_json(std::istream& in);

// Creates the directory if needed and writes all five files.
void write_run(const std::filesystem::path& dir, const scenarios::Scenario& scenario,
               const scenarios::ResultBundle& bundle);

} // namespace wavekin::io

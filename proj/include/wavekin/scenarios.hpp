#pragma once

// Named experiment presets and the pipeline that runs them.

#include "wavekin/common.hpp"
#include "wavekin/errors.hpp"
#include "wavekin/estimators.hpp"
#include "wavekin/kinetics.hpp"
#include "wavekin/pointprocess.hpp"
#include "wavekin/wavefield.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wavekin::scenarios {

enum class Kind {
    Wiener,            // standing-wave fringes on a photographic layer
    DoubleSlit,        // build-up of a two-slit pattern from single births
    PacketRelaxation,  // kinetics following a drifting, focusing Gaussian packet
    EigenstateSteady,  // relaxation onto a stationary state
    BornViolation,     // square-wave drive at the lifetime scale
    ConstantRate,      // homogeneous birth-death process
    Relaxation,        // bare kinetics under an arbitrary drive
};

std::string_view kind_name(Kind kind);
Kind parse_kind(std::string_view text);

// Spatially uniform drives given directly as an intensity.
struct ConstantDrive {
    double level = 1.0;
};
struct SquareDrive {
    double low = 0.0;
    double high = 1.0;
    double half_period = 1.0;
};
struct SinusoidDrive {
    double mean = 1.0;
    double amplitude = 0.5;
    double angular_frequency = 1.0;
    double phase = 0.0;
};

using Drive = std::variant<wavefield::FieldSpec, ConstantDrive, SquareDrive, SinusoidDrive>;

struct Threshold {
    enum class Bound { Min, Max };
    Bound bound = Bound::Max;
    double value = 0.0;

    bool accepts(double x) const;
    bool operator==(const Threshold&) const = default;
};

struct Scenario {
    std::string name;
    std::string description;
    Kind kind = Kind::Relaxation;
    Drive drive = ConstantDrive{};
    kinetics::KineticParams params = kinetics::KineticParams::from_tau(kinetics::Mode::Matter, 1.0, 1.0);

    Interval region{0.0, 1.0};
    std::size_t grid_points = 101;  // density grid
    std::size_t bins = 100;         // birth histogram
    std::size_t occupancy_bins = 0; // occupancy check; 0 uses bins
    double t_end = 50.0;
    double dt = 0.05;
    std::size_t record_every = 1;
    unsigned threads = 1;
    std::uint64_t seed = 1;

    // Number of independent copies of the system feeding the point process;
    // multiplies the birth rate, not the density.
    double ensemble = 1.0;
    // Born-limit checks ignore t < transient_lifetimes * tau.
    double transient_lifetimes = 10.0;
    // Birth counts at which the double-slit histogram is compared.
    std::vector<std::size_t> checkpoints;
    // Scale of the contrast run: the half-period (born_violation) or tau
    // (packet_relaxation) is multiplied by this factor.
    double contrast_factor = 100.0;
    // Proportionality constant of the critical disturbance scale.
    double critical_constant = 1.0;

    std::map<std::string, Threshold> thresholds;
};

// Throws InvalidSpecError naming the first violated invariant.
void validate(const Scenario& scenario);

// The eight built-in presets, in stable order.
const std::vector<Scenario>& registry();
std::vector<std::string> scenario_names();
// Throws InvalidSpecError listing the valid names.
const Scenario& find_scenario(std::string_view name);

// Driving intensity I(t, r) of a scenario (ensemble not included).
kinetics::Intensity drive_intensity(const Scenario& scenario);

struct CheckOutcome {
    std::string statistic;
    Threshold threshold;
    double value = 0.0;
    bool passed = false;
};

struct ResultBundle {
    std::string scenario;
    Kind kind = Kind::Relaxation;
    std::uint64_t seed = 0;
    kinetics::KineticParams params = kinetics::KineticParams::from_tau(kinetics::Mode::Matter, 1.0, 1.0);
    kinetics::DensitySeries density;
    pointprocess::EventLog events;
    estimators::BinnedDistribution histogram{pointprocess::BinGrid::uniform(0.0, 1.0, 1), {0.0}, 0.0};
    std::vector<double> expected_pmf;  // reference pmf per histogram bin
    std::vector<double> profile_grid;
    std::vector<double> profile;  // time-averaged reference density on profile_grid
    std::map<std::string, double> statistics;
    std::vector<CheckOutcome> checks;

    bool passed() const;
};

struct RunOptions {
    std::function<void(std::string_view)> progress;
};

// Error raised by run_scenario; the module error that caused it is nested
// (std::rethrow_if_nested).
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

ResultBundle run_scenario(const Scenario& scenario, const RunOptions& options = {});

} // namespace wavekin::scenarios

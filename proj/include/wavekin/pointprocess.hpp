#pragma once

// Stochastic birth-death particle process. Births form an inhomogeneous
// Poisson process in space-time with rate nu_plus(t, r); each particle stays
// where it was born and dies after an independent exponential lifetime of
// mean tau.

#include "wavekin/common.hpp"
#include "wavekin/kinetics.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavekin::pointprocess {

enum class EventKind { Birth, Death };

struct BirthDeathEvent {
    EventKind kind = EventKind::Birth;
    std::uint64_t particle_id = 0;
    double position = 0.0;
    double time = 0.0;

    bool operator==(const BirthDeathEvent&) const = default;
};

struct EventLog {
    std::vector<BirthDeathEvent> events;  // sorted by time
    std::uint64_t seed = 0;
    std::string generator;
    Interval region;
    double t_end = 0.0;
    kinetics::KineticParams params = kinetics::KineticParams::from_tau(kinetics::Mode::Matter, 1.0, 1.0);
    double rate_bound = 0.0;

    std::size_t birth_count() const;
    bool operator==(const EventLog&) const = default;
};

// One particle reconstructed from its events. death is +inf when the
// particle outlives t_end.
struct Particle {
    std::uint64_t id;
    double position;
    double birth;
    double death;
};

std::vector<Particle> particles(const EventLog& log);

// Bin edges over a 1D interval.
class BinGrid {
public:
    explicit BinGrid(std::vector<double> edges);
    static BinGrid uniform(double lo, double hi, std::size_t bins);

    std::size_t size() const { return edges_.size() - 1; }
    const std::vector<double>& edges() const { return edges_; }
    double lo() const { return edges_.front(); }
    double hi() const { return edges_.back(); }
    double width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
    double centre(std::size_t i) const { return 0.5 * (edges_[i] + edges_[i + 1]); }
    std::vector<double> centres() const;
    // Bin holding x; the last bin is closed on the right.
    std::optional<std::size_t> locate(double x) const;

    bool operator==(const BinGrid&) const = default;

private:
    std::vector<double> edges_;
};

struct OccupancyField {
    BinGrid grid;
    std::vector<double> times;
    std::vector<std::uint64_t> counts;  // times.size() x grid.size()

    std::uint64_t at(std::size_t ti, std::size_t bin) const { return counts[ti * grid.size() + bin]; }
};

using RateFunction = std::function<double(double t, double r)>;

// nu_plus = birth_gain * I.
RateFunction birth_rate(const kinetics::KineticParams& params, const kinetics::Intensity& intensity);

struct SimulationOptions {
    // Supremum of the rate over region x [0, t_end]. When absent the rate is
    // scanned on a scan_points x scan_points grid and the maximum is
    // multiplied by safety_factor.
    std::optional<double> rate_bound;
    std::size_t scan_points = 513;
    double safety_factor = 1.5;
};

// Generates births by thinning a homogeneous candidate process and assigns
// every birth an exponential lifetime. Deaths after t_end are not logged.
// Throws BoundExceededError when any evaluated rate exceeds the bound and
// DomainError on negative or non-finite rates.
EventLog simulate(const kinetics::KineticParams& params, const RateFunction& rate, Interval region,
                  double t_end, std::uint64_t seed, const SimulationOptions& options = {});

// Particles with birth <= t < death.
std::uint64_t population_at(const EventLog& log, double t);

OccupancyField occupancy(const EventLog& log, const BinGrid& grid, std::span<const double> times);

// Exact time average of the per-bin alive count over [t0, t1].
std::vector<double> mean_occupancy(const EventLog& log, const BinGrid& grid, double t0, double t1);

// Exact time average of the total population over [t0, t1].
double mean_population(const EventLog& log, double t0, double t1);

} // namespace wavekin::pointprocess

#include "wavekin/pointprocess.hpp"

#include "wavekin/errors.hpp"
#include "wavekin/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include <fmt/format.h>

namespace wavekin::pointprocess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PendingDeath {
    double time;
    std::uint64_t id;
    double position;

    // Min-heap on time, ties broken by id so the order is total.
    bool operator>(const PendingDeath& o) const
    {
        return time != o.time ? time > o.time : id > o.id;
    }
};

double checked_rate(const RateFunction& rate, double t, double x)
{
    const double r = rate(t, x);
    if (!std::isfinite(r) || r < 0.0) {
        throw DomainError(fmt::format("birth rate at (t = {}, r = {}) is {}; it must be finite "
                                      "and non-negative",
                                      t, x, r));
    }
    return r;
}

void check_window(const EventLog& log, double t, std::string_view what)
{
    if (!std::isfinite(t) || t < 0.0 || t > log.t_end) {
        throw DomainError(fmt::format("{} t = {} outside [0, {}]", what, t, log.t_end));
    }
}

} // namespace

std::size_t EventLog::birth_count() const
{
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const auto& e) {
        return e.kind == EventKind::Birth;
    }));
}

std::vector<Particle> particles(const EventLog& log)
{
    std::vector<Particle> out;
    for (const auto& e : log.events) {
        if (e.kind == EventKind::Birth) {
            if (e.particle_id != out.size()) {
                throw AccountingError(
                    fmt::format("particle ids must be dense in birth order; saw {} after {} births",
                                e.particle_id, out.size()));
            }
            out.push_back({e.particle_id, e.position, e.time, kInf});
        }
    }
    for (const auto& e : log.events) {
        if (e.kind == EventKind::Death) {
            if (e.particle_id >= out.size()) {
                throw AccountingError(fmt::format("death of unknown particle {}", e.particle_id));
            }
            out[e.particle_id].death = e.time;
        }
    }
    return out;
}

BinGrid::BinGrid(std::vector<double> edges) : edges_(std::move(edges))
{
    if (edges_.size() < 2) {
        throw DomainError("a bin grid needs at least two edges");
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (!std::isfinite(edges_[i]) || (i > 0 && !(edges_[i] > edges_[i - 1]))) {
            throw DomainError("bin edges must be finite and strictly increasing");
        }
    }
}

BinGrid BinGrid::uniform(double lo, double hi, std::size_t bins)
{
    if (bins == 0) {
        throw DomainError("a bin grid needs at least one bin");
    }
    return BinGrid(linspace(lo, hi, bins + 1));
}

std::vector<double> BinGrid::centres() const
{
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = centre(i);
    }
    return out;
}

std::optional<std::size_t> BinGrid::locate(double x) const
{
    if (!(x >= lo() && x <= hi())) {
        return std::nullopt;
    }
    if (x == hi()) {
        return size() - 1;
    }
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

RateFunction birth_rate(const kinetics::KineticParams& params, const kinetics::Intensity& intensity)
{
    return [gain = params.birth_gain(), at = intensity.at](double t, double r) {
        return gain * at(t, r);
    };
}

EventLog simulate(const kinetics::KineticParams& params, const RateFunction& rate, Interval region,
                  double t_end, std::uint64_t seed, const SimulationOptions& options)
{
    if (!std::isfinite(region.lo) || !std::isfinite(region.hi) || !(region.hi > region.lo)) {
        throw DomainError(fmt::format("region [{}, {}] must be a finite non-empty interval",
                                      region.lo, region.hi));
    }
    if (!std::isfinite(t_end) || !(t_end > 0.0)) {
        throw DomainError(fmt::format("t_end must be positive, got {}", t_end));
    }

    double bound = 0.0;
    if (options.rate_bound) {
        bound = *options.rate_bound;
        if (!std::isfinite(bound) || bound < 0.0) {
            throw DomainError(fmt::format("rate bound must be finite and >= 0, got {}", bound));
        }
    } else {
        const std::size_t n = std::max<std::size_t>(options.scan_points, 2);
        const auto xs = linspace(region.lo, region.hi, n);
        const auto ts = linspace(0.0, t_end, n);
        double peak = 0.0;
        for (double t : ts) {
            for (double x : xs) {
                peak = std::max(peak, checked_rate(rate, t, x));
            }
        }
        bound = peak * options.safety_factor;
    }

    EventLog log;
    log.seed = seed;
    log.generator = std::string(SplitMix64::name);
    log.region = region;
    log.t_end = t_end;
    log.params = params;
    log.rate_bound = bound;
    if (bound == 0.0) {
        return log;
    }

    SplitMix64 rng(seed);
    const double volume = region.length();
    const double candidate_mean_gap = 1.0 / (bound * volume);
    std::priority_queue<PendingDeath, std::vector<PendingDeath>, std::greater<>> pending;
    std::uint64_t next_id = 0;

    auto flush_until = [&](double t) {
        while (!pending.empty() && pending.top().time <= t) {
            const auto d = pending.top();
            pending.pop();
            log.events.push_back({EventKind::Death, d.id, d.position, d.time});
        }
    };

    double t = 0.0;
    for (;;) {
        t += rng.exponential(candidate_mean_gap);
        if (t > t_end) {
            break;
        }
        const double x = region.lo + volume * rng.uniform();
        const double r = checked_rate(rate, t, x);
        if (r > bound) {
            throw BoundExceededError(
                fmt::format("birth rate {} at (t = {}, r = {}) exceeds the thinning bound {}; "
                            "supply a larger rate_bound",
                            r, t, x, bound),
                r, bound);
        }
        if (rng.uniform() * bound >= r) {
            continue;
        }
        const double death = t + rng.exponential(params.tau());
        flush_until(t);
        log.events.push_back({EventKind::Birth, next_id, x, t});
        if (death <= t_end) {
            pending.push({death, next_id, x});
        }
        ++next_id;
    }
    flush_until(t_end);
    return log;
}

std::uint64_t population_at(const EventLog& log, double t)
{
    check_window(log, t, "population_at:");
    std::uint64_t alive = 0;
    for (const auto& e : log.events) {
        if (e.time > t) {
            break;
        }
        if (e.kind == EventKind::Birth) {
            ++alive;
        } else {
            --alive;
        }
    }
    return alive;
}

namespace {

std::vector<std::size_t> bins_of(const std::vector<Particle>& ps, const BinGrid& grid)
{
    std::vector<std::size_t> out(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto b = grid.locate(ps[i].position);
        if (!b) {
            throw AccountingError(fmt::format("particle {} at {} lies outside the bin grid [{}, {}]",
                                              ps[i].id, ps[i].position, grid.lo(), grid.hi()));
        }
        out[i] = *b;
    }
    return out;
}

void check_covers(const EventLog& log, const BinGrid& grid)
{
    if (grid.lo() > log.region.lo || grid.hi() < log.region.hi) {
        throw DomainError(fmt::format("bin grid [{}, {}] does not cover the region [{}, {}]",
                                      grid.lo(), grid.hi(), log.region.lo, log.region.hi));
    }
}

} // namespace

OccupancyField occupancy(const EventLog& log, const BinGrid& grid, std::span<const double> times)
{
    check_covers(log, grid);
    for (double t : times) {
        check_window(log, t, "occupancy:");
    }
    const auto ps = particles(log);
    const auto bins = bins_of(ps, grid);

    OccupancyField out{grid, {times.begin(), times.end()}, {}};
    out.counts.assign(times.size() * grid.size(), 0);

    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    std::vector<std::uint64_t> alive(grid.size(), 0);
    std::size_t next = 0;
    for (std::size_t ti : order) {
        const double t = times[ti];
        while (next < log.events.size() && log.events[next].time <= t) {
            const auto& e = log.events[next];
            const std::size_t b = bins[e.particle_id];
            if (e.kind == EventKind::Birth) {
                ++alive[b];
            } else {
                --alive[b];
            }
            ++next;
        }
        std::copy(alive.begin(), alive.end(), out.counts.begin() + ti * grid.size());
    }
    return out;
}

std::vector<double> mean_occupancy(const EventLog& log, const BinGrid& grid, double t0, double t1)
{
    check_covers(log, grid);
    check_window(log, t0, "mean_occupancy:");
    check_window(log, t1, "mean_occupancy:");
    if (!(t1 > t0)) {
        throw DomainError("mean_occupancy needs t1 > t0");
    }
    const auto ps = particles(log);
    const auto bins = bins_of(ps, grid);
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double overlap = std::min(ps[i].death, t1) - std::max(ps[i].birth, t0);
        if (overlap > 0.0) {
            out[bins[i]] += overlap;
        }
    }
    for (double& v : out) {
        v /= (t1 - t0);
    }
    return out;
}

double mean_population(const EventLog& log, double t0, double t1)
{
    check_window(log, t0, "mean_population:");
    check_window(log, t1, "mean_population:");
    if (!(t1 > t0)) {
        throw DomainError("mean_population needs t1 > t0");
    }
    double total = 0.0;
    for (const auto& p : particles(log)) {
        const double overlap = std::min(p.death, t1) - std::max(p.birth, t0);
        if (overlap > 0.0) {
            total += overlap;
        }
    }
    return total / (t1 - t0);
}

} // namespace wavekin::pointprocess

#include "wavekin/errors.hpp"
#include "wavekin/pointprocess.hpp"
#include "wavekin/random.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

using namespace wavekin;
using namespace wavekin::pointprocess;
using kinetics::KineticParams;
using kinetics::Mode;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const KineticParams kParams = KineticParams::from_tau(Mode::Matter, 1.0, 1.0);

RateFunction constant(double nu)
{
    return [nu](double, double) { return nu; };
}

} // namespace

TEST_CASE("splitmix64 reference outputs", "[random]")
{
    // First outputs for seed 0 of the reference implementation.
    SplitMix64 g(0);
    CHECK(g.next() == 0xe220a8397b1dcdafULL);
    CHECK(g.next() == 0x6e789e6aa1b965f4ULL);
    CHECK(g.next() == 0x06c45d188009454fULL);
    SplitMix64 a(7);
    SplitMix64 b(7);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("same seed gives the same event log", "[pointprocess]")
{
    const auto rate = [](double t, double r) { return 50.0 * (1.0 + std::sin(t + 3.0 * r)); };
    const Interval region{0.0, 2.0};
    const auto a = simulate(kParams, rate, region, 10.0, 99);
    const auto b = simulate(kParams, rate, region, 10.0, 99);
    const auto c = simulate(kParams, rate, region, 10.0, 100);
    CHECK(a == b);
    CHECK_FALSE(a.events == c.events);
    CHECK(a.generator == "splitmix64");
    CHECK(a.seed == 99);
    CHECK(a.rate_bound > 0.0);
}

TEST_CASE("event log is ordered and consistent", "[pointprocess]")
{
    const Interval region{-1.0, 1.0};
    const double t_end = 20.0;
    const auto log = simulate(kParams, constant(30.0), region, t_end, 5);
    std::set<std::uint64_t> born;
    std::set<std::uint64_t> dead;
    double last = 0.0;
    for (const auto& e : log.events) {
        CHECK(e.time >= last);
        last = e.time;
        CHECK(e.time <= t_end);
        CHECK(region.contains(e.position));
        if (e.kind == EventKind::Birth) {
            CHECK(born.insert(e.particle_id).second);
        } else {
            CHECK(born.count(e.particle_id) == 1);
            CHECK(dead.insert(e.particle_id).second);
        }
    }
    const auto ps = particles(log);
    CHECK(ps.size() == born.size());
    CHECK(log.birth_count() == born.size());
    for (const auto& p : ps) {
        CHECK(p.death > p.birth);
    }
    // Every particle alive at t_end is counted, none is lost.
    CHECK(population_at(log, t_end) == born.size() - dead.size());
}

TEST_CASE("occupancy sums to the population", "[pointprocess]")
{
    const Interval region{0.0, 1.0};
    const auto log = simulate(kParams, [](double, double r) { return 200.0 * r; }, region, 8.0, 3);
    const auto grid = BinGrid::uniform(0.0, 1.0, 10);
    const std::vector<double> times = {0.5, 2.0, 4.0, 7.99, 8.0};
    const auto occ = occupancy(log, grid, times);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        std::uint64_t sum = 0;
        for (std::size_t b = 0; b < grid.size(); ++b) {
            sum += occ.at(ti, b);
        }
        CHECK(sum == population_at(log, times[ti]));
    }
    const auto mean = mean_occupancy(log, grid, 2.0, 8.0);
    double total = 0.0;
    for (double m : mean) {
        total += m;
    }
    CHECK_THAT(total, WithinRel(mean_population(log, 2.0, 8.0), 1e-12));
}

TEST_CASE("mean population is the exact time average", "[pointprocess]")
{
    EventLog log;
    log.region = {0.0, 1.0};
    log.t_end = 10.0;
    log.events = {{EventKind::Birth, 0, 0.5, 1.0},
                  {EventKind::Birth, 1, 0.2, 2.0},
                  {EventKind::Death, 0, 0.5, 4.0},
                  {EventKind::Birth, 2, 0.9, 9.0}};
    // Particle 0 alive [1, 4), 1 alive [2, 10], 2 alive [9, 10].
    CHECK_THAT(mean_population(log, 0.0, 10.0), WithinRel((3.0 + 8.0 + 1.0) / 10.0, 1e-15));
    CHECK(population_at(log, 3.0) == 2);
    CHECK(population_at(log, 4.0) == 1);
    const auto m = mean_occupancy(log, BinGrid::uniform(0.0, 1.0, 2), 0.0, 10.0);
    CHECK_THAT(m[0], WithinRel(0.8, 1e-15));
    CHECK_THAT(m[1], WithinRel(0.4, 1e-15));
}

TEST_CASE("zero rate produces no events", "[pointprocess]")
{
    const auto log = simulate(kParams, constant(0.0), {0.0, 1.0}, 10.0, 1);
    CHECK(log.events.empty());
    CHECK(population_at(log, 5.0) == 0);
}

TEST_CASE("rates above the declared bound are reported", "[pointprocess]")
{
    SimulationOptions opts;
    opts.rate_bound = 10.0;
    CHECK_THROWS_AS(simulate(kParams, constant(20.0), {0.0, 1.0}, 10.0, 1, opts),
                    BoundExceededError);
    CHECK_THROWS_AS(simulate(kParams, constant(-1.0), {0.0, 1.0}, 10.0, 1), DomainError);
}

TEST_CASE("birth count of a constant rate is Poisson", "[pointprocess]")
{
    const double nu = 400.0;
    const double t_end = 50.0;
    const auto log = simulate(kParams, constant(nu), {0.0, 0.5}, t_end, 17);
    const double expect = nu * 0.5 * t_end;
    CHECK(std::abs(static_cast<double>(log.birth_count()) - expect) <= 4.0 * std::sqrt(expect));
}

TEST_CASE("bin grid lookup", "[pointprocess]")
{
    const auto g = BinGrid::uniform(0.0, 1.0, 4);
    CHECK(g.size() == 4);
    CHECK(g.locate(0.0) == 0u);
    CHECK(g.locate(0.25) == 1u);
    CHECK(g.locate(1.0) == 3u);
    CHECK_FALSE(g.locate(1.0001).has_value());
    CHECK_FALSE(g.locate(-0.1).has_value());
    CHECK_THAT(g.centre(2), WithinAbs(0.625, 1e-15));
    CHECK_THROWS(BinGrid(std::vector<double>{0.0, 1.0, 0.5}));
}

#include "wavekin/scenarios.hpp"

#include "wavekin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace wavekin::scenarios {

namespace wf = wavefield;
namespace kin = kinetics;
namespace pp = pointprocess;
namespace est = estimators;

namespace {

// Sample sizes of the exponentiality checks.
constexpr std::size_t kKsSamples = 10000;
constexpr double kKsAlpha = 0.001;

constexpr std::pair<Kind, std::string_view> kKindNames[] = {
    {Kind::Wiener, "wiener"},
    {Kind::DoubleSlit, "double_slit"},
    {Kind::PacketRelaxation, "packet_relaxation"},
    {Kind::EigenstateSteady, "eigenstate_steady"},
    {Kind::BornViolation, "born_violation"},
    {Kind::ConstantRate, "constant_rate"},
    {Kind::Relaxation, "relaxation"},
};

Threshold at_least(double v) { return {Threshold::Bound::Min, v}; }
Threshold at_most(double v) { return {Threshold::Bound::Max, v}; }

bool steady_state_kind(Kind k)
{
    return k == Kind::Wiener || k == Kind::DoubleSlit || k == Kind::EigenstateSteady ||
           k == Kind::ConstantRate;
}

const wf::FieldSpec* field_of(const Scenario& s) { return std::get_if<wf::FieldSpec>(&s.drive); }

double field_omega(const wf::FieldSpec& spec)
{
    return std::visit(
        [](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, wf::PlaneWave> ||
                          std::is_same_v<T, wf::StandingWaveNormal> ||
                          std::is_same_v<T, wf::ObliqueStanding>) {
                return f.angular_frequency;
            } else {
                return 0.0;
            }
        },
        spec.variant);
}

Scenario wiener(std::string name, std::string description, wf::FieldSpec field,
                std::map<std::string, Threshold> thresholds)
{
    Scenario s;
    s.name = std::move(name);
    s.description = std::move(description);
    s.kind = Kind::Wiener;
    const double omega = field_omega(field);
    s.drive = std::move(field);
    s.params = kin::KineticParams::from_tau(kin::Mode::Photon, omega, 1.0);
    s.region = {0.0, 5.0};
    s.grid_points = 201;
    s.bins = 200;
    s.occupancy_bins = 50;
    s.t_end = 50.0;
    // 25 steps per intensity period, one record per period.
    s.dt = kPi / omega / 25.0;
    s.record_every = 25;
    s.seed = 42;
    s.thresholds = std::move(thresholds);
    s.thresholds["chi_square_p"] = at_least(0.001);
    s.thresholds["occupancy_max_z"] = at_most(4.0);
    return s;
}

std::vector<Scenario> build_registry()
{
    std::vector<Scenario> out;
    const double k = 4.0 * kPi;  // wavelength 0.5
    const double e0 = 256.0;  // a little over 1e5 births over the run

    {
        wf::StandingWaveNormal f{e0, k, k};
        out.push_back(wiener("wiener_normal",
                             "Standing wave at normal incidence: fringes every half wavelength",
                             f,
                             {{"visibility", at_least(0.99)},
                              {"fringe_spacing_error", at_most(0.025)}}));
    }
    {
        wf::ObliqueStanding f{e0, k, k, kPi / 4.0, wf::Polarization::S};
        out.push_back(wiener("wiener_45_s",
                             "45 degree incidence, s-polarized: fringes at lambda / (2 cos 45)",
                             f,
                             {{"visibility", at_least(0.99)},
                              {"fringe_spacing_error", at_most(0.025)}}));
    }
    {
        wf::ObliqueStanding f{e0, k, k, kPi / 4.0, wf::Polarization::P};
        out.push_back(wiener("wiener_45_p",
                             "45 degree incidence, p-polarized: uniform blackening", f,
                             {{"visibility", at_most(0.01)}}));
    }
    {
        Scenario s;
        s.name = "double_slit_buildup";
        s.description = "Two-slit pattern assembled from about a million single births";
        s.kind = Kind::DoubleSlit;
        wf::DoubleSlitFarField f{1.0, 0.2, 1.0, 1.0};
        s.drive = wf::FieldSpec{f};
        s.params = kin::KineticParams::from_tau(kin::Mode::Photon, 2.0 * kPi / f.wavelength, 1.0);
        s.region = {-5.0, 5.0};
        s.grid_points = 201;
        s.bins = 200;
        s.t_end = 50.0;
        s.dt = 0.05;
        s.record_every = 20;
        s.seed = 7;
        s.ensemble = 714000.0;
        s.checkpoints = {1000, 10000, 100000, 1000000};
        s.thresholds = {{"l1_distance", at_most(0.02)}, {"l1_monotone_excess", at_most(0.0)}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "packet_relaxation";
        s.description = "Drifting, focusing Gaussian packet: tracked when T = 100 tau, lost when T = tau";
        s.kind = Kind::PacketRelaxation;
        // Spreading time 2 m sigma0^2 = 100 with tau = 1; the drift k0 / m covers
        // one initial width per spreading time.
        s.drive = wf::FieldSpec{wf::GaussianPacket{1.0, 0.5, 50.0, 1500.0}};
        s.params = kin::KineticParams::from_tau(kin::Mode::Matter, 1.0, 1.0);
        s.region = {-75.0, 75.0};
        s.grid_points = 601;
        s.bins = 100;
        s.t_end = 2500.0;
        s.dt = 0.05;
        s.record_every = 100;
        s.seed = 11;
        s.ensemble = 10.0;
        s.contrast_factor = 100.0;
        s.thresholds = {{"born_deviation", at_most(0.05)},
                        {"born_deviation_contrast", at_least(0.3)},
                        {"chi_square_p", at_least(0.001)}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "eigenstate_steady";
        s.description = "Ground state of a box: density relaxes onto |psi|^2";
        s.kind = Kind::EigenstateSteady;
        s.drive = wf::FieldSpec{wf::BoxEigenstate{1, 1.0, 1.0}};
        s.params = kin::KineticParams::from_tau(kin::Mode::Matter, 1.0, 1.0);
        s.region = {0.0, 1.0};
        s.grid_points = 101;
        s.bins = 50;
        s.t_end = 40.0;
        s.dt = 0.05;
        s.record_every = 4;
        s.seed = 3;
        s.ensemble = 1000.0;
        s.transient_lifetimes = 20.0;
        s.thresholds = {{"born_ratio_error", at_most(1e-6)},
                        {"norm_relaxation_excess", at_most(1e-6)},
                        {"chi_square_p", at_least(0.001)}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "born_violation";
        s.description = "Square-wave drive with half-period tau: the density cannot follow";
        s.kind = Kind::BornViolation;
        s.drive = SquareDrive{0.0, 1.0, 1.0};
        s.params = kin::KineticParams::from_tau(kin::Mode::Matter, 1.0, 1.0);
        s.region = {0.0, 1.0};
        s.grid_points = 5;
        s.bins = 10;
        s.t_end = 40.0;
        s.dt = 0.02;
        s.seed = 5;
        s.ensemble = 1000.0;
        s.contrast_factor = 100.0;
        s.thresholds = {{"born_deviation", at_least(0.3)},
                        {"born_deviation_contrast", at_most(0.05)},
                        {"oracle_error", at_most(1e-6)},
                        {"oracle_error_contrast", at_most(1e-6)}};
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "constant_rate_sanity";
        s.description = "Homogeneous births and exponential deaths: the infinite-server queue";
        s.kind = Kind::ConstantRate;
        s.drive = ConstantDrive{500.0};
        s.params = kin::KineticParams::from_tau(kin::Mode::Matter, 1.0, 1.0);
        s.region = {0.0, 1.0};
        s.grid_points = 3;
        s.bins = 20;
        s.t_end = 50.0;
        s.dt = 0.05;
        s.record_every = 10;
        s.seed = 1;
        const double ks = est::ks_critical(kKsSamples, kKsAlpha);
        s.thresholds = {{"population_z", at_most(4.0)},
                        {"births_z", at_most(4.0)},
                        {"lifetime_mean_z", at_most(4.0)},
                        {"ks_interbirth", at_most(ks)},
                        {"ks_lifetime", at_most(ks)}};
        out.push_back(std::move(s));
    }
    return out;
}

template <typename F>
auto stage(const char* name, const RunOptions& options, F&& f) -> decltype(f())
{
    if (options.progress) {
        options.progress(name);
    }
    try {
        return f();
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        std::throw_with_nested(PipelineError(name, e.what()));
    }
}

// Integral over each bin of the time average of I over [t0, t1].
std::vector<double> bin_masses(const kin::Intensity& intensity, const pp::BinGrid& grid, double t0,
                               double t1)
{
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = quadrature::integrate(
                     [&](double z) { return intensity.mean(z, t0, t1); }, grid.edges()[i],
                     grid.edges()[i + 1], {.rel_tol = 1e-10})
                     .value;
    }
    return out;
}

std::vector<double> normalize(std::vector<double> v)
{
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (!(total > 0.0)) {
        throw DomainError("reference density vanishes on the region");
    }
    for (double& x : v) {
        x /= total;
    }
    return v;
}

// Exact solution of dp/dt = g I - p / tau for a square wave starting from 0.
double square_wave_oracle(const kin::KineticParams& params, const SquareDrive& d, double t)
{
    const double tau = params.tau();
    const double gt = params.equilibrium_gain();
    const double h = d.half_period;
    double p = 0.0;
    std::size_t k = 0;
    // The drive starts high on [0, H).
    auto level = [&](std::size_t piece) { return (piece % 2 == 0) ? d.high : d.low; };
    while (static_cast<double>(k + 1) * h <= t) {
        const double target = gt * level(k);
        p = target + (p - target) * std::exp(-h / tau);
        ++k;
    }
    const double target = gt * level(k);
    return target + (p - target) * std::exp(-(t - static_cast<double>(k) * h) / tau);
}

double oracle_error(const kin::DensitySeries& series, const kin::KineticParams& params,
                    const SquareDrive& d)
{
    double worst = 0.0;
    for (std::size_t ti = 0; ti < series.rows(); ++ti) {
        const double exact = square_wave_oracle(params, d, series.times[ti]);
        for (std::size_t ri = 0; ri < series.cols(); ++ri) {
            worst = std::max(worst, std::abs(series.at(ti, ri) - exact));
        }
    }
    return worst / (params.equilibrium_gain() * std::max(d.high, d.low));
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

kin::DensitySeries integrate(const Scenario& s, const kin::KineticParams& params,
                             const kin::Intensity& intensity, double t_end, double dt,
                             std::size_t record_every = 0)
{
    const auto grid = linspace(s.region.lo, s.region.hi, s.grid_points);
    const std::vector<double> p0(grid.size(), 0.0);
    return kin::integrate_kinetics(
        params, intensity, p0, grid, t_end, dt,
        {.record_every = record_every > 0 ? record_every : s.record_every, .threads = s.threads});
}

} // namespace

std::string_view kind_name(Kind kind)
{
    for (const auto& [k, n] : kKindNames) {
        if (k == kind) {
            return n;
        }
    }
    return "unknown";
}

Kind parse_kind(std::string_view text)
{
    for (const auto& [k, n] : kKindNames) {
        if (n == text) {
            return k;
        }
    }
    std::vector<std::string_view> names;
    for (const auto& kn : kKindNames) {
        names.push_back(kn.second);
    }
    throw InvalidSpecError(
        fmt::format("unknown scenario kind '{}' (expected one of {})", text, fmt::join(names, ", ")));
}

bool Threshold::accepts(double x) const
{
    if (std::isnan(x)) {
        return false;
    }
    return bound == Bound::Min ? x >= value : x <= value;
}

void validate(const Scenario& s)
{
    auto fail = [&](const std::string& what) {
        throw InvalidSpecError(fmt::format("scenario '{}': {}", s.name, what));
    };
    if (s.name.empty() || !std::all_of(s.name.begin(), s.name.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
        })) {
        fail("name must be a non-empty identifier of [a-z0-9_-]");
    }
    if (!std::isfinite(s.region.lo) || !std::isfinite(s.region.hi) || !(s.region.hi > s.region.lo)) {
        fail("region must be a finite interval with lo < hi");
    }
    if (s.grid_points < 2) {
        fail("grid_points must be at least 2");
    }
    if (s.bins < 1) {
        fail("bins must be at least 1");
    }
    if (!std::isfinite(s.t_end) || !(s.t_end > 0.0)) {
        fail("t_end must be positive");
    }
    const double tau = s.params.tau();
    if (!(s.dt > 0.0) || s.dt > tau / 20.0 * (1.0 + 1e-12)) {
        fail(fmt::format("dt must lie in (0, tau / 20 = {}]", tau / 20.0));
    }
    if (s.record_every < 1 || s.threads < 1) {
        fail("record_every and threads must be at least 1");
    }
    if (!std::isfinite(s.ensemble) || !(s.ensemble > 0.0)) {
        fail("ensemble must be positive");
    }
    if (!(s.transient_lifetimes >= 0.0) || !std::isfinite(s.transient_lifetimes)) {
        fail("transient_lifetimes must be >= 0");
    }
    if (s.transient_lifetimes * tau >= s.t_end) {
        fail("the transient covers the whole run");
    }
    if (!(s.contrast_factor > 0.0) || !std::isfinite(s.contrast_factor)) {
        fail("contrast_factor must be positive");
    }
    if (!(s.critical_constant > 0.0) || !std::isfinite(s.critical_constant)) {
        fail("critical_constant must be positive");
    }
    if (steady_state_kind(s.kind) && s.t_end < 30.0 * tau) {
        fail(fmt::format("steady-state scenarios need t_end >= 30 tau = {}", 30.0 * tau));
    }

    const bool photon = s.params.mode() == kin::Mode::Photon;
    if (const auto* f = field_of(s)) {
        wf::validate(*f);
        const Interval dom = wf::domain(*f);
        if (s.region.lo < dom.lo || s.region.hi > dom.hi) {
            fail(fmt::format("region [{}, {}] leaves the field domain [{}, {}]", s.region.lo,
                             s.region.hi, dom.lo, dom.hi));
        }
        if (photon && !wf::is_optical(*f)) {
            fail("photon kinetics needs an optical field");
        }
        if (!photon && !wf::is_matter(*f)) {
            fail("matter kinetics needs a matter field");
        }
        const double w = field_omega(*f);
        if (photon && w > 0.0 && std::abs(w - s.params.omega()) > 1e-12 * w) {
            fail(fmt::format("kinetic omega {} differs from the field frequency {}",
                             s.params.omega(), w));
        }
    } else if (const auto* c = std::get_if<ConstantDrive>(&s.drive)) {
        if (!std::isfinite(c->level) || c->level < 0.0) {
            fail("constant drive level must be finite and >= 0");
        }
    } else if (const auto* q = std::get_if<SquareDrive>(&s.drive)) {
        if (!(q->low >= 0.0) || !(q->high >= 0.0) || !std::isfinite(q->low) ||
            !std::isfinite(q->high) || !(q->half_period > 0.0) || !std::isfinite(q->half_period)) {
            fail("square drive needs low, high >= 0 and half_period > 0");
        }
    } else if (const auto* n = std::get_if<SinusoidDrive>(&s.drive)) {
        if (!std::isfinite(n->mean) || !std::isfinite(n->amplitude) || !std::isfinite(n->phase) ||
            n->mean < std::abs(n->amplitude) || !(n->angular_frequency > 0.0) ||
            !std::isfinite(n->angular_frequency)) {
            fail("sinusoid drive needs mean >= |amplitude| and angular_frequency > 0");
        }
    }

    const auto* f = field_of(s);
    switch (s.kind) {
    case Kind::Wiener:
        if (!f || !(std::holds_alternative<wf::StandingWaveNormal>(f->variant) ||
                    std::holds_alternative<wf::ObliqueStanding>(f->variant))) {
            fail("wiener scenarios need a standing-wave field");
        }
        break;
    case Kind::DoubleSlit:
        if (!f || !std::holds_alternative<wf::DoubleSlitFarField>(f->variant)) {
            fail("double_slit scenarios need a double_slit field");
        }
        if (s.checkpoints.empty() || s.checkpoints.front() == 0 ||
            !std::is_sorted(s.checkpoints.begin(), s.checkpoints.end()) ||
            std::adjacent_find(s.checkpoints.begin(), s.checkpoints.end()) !=
                s.checkpoints.end()) {
            fail("checkpoints must be positive and strictly increasing");
        }
        break;
    case Kind::PacketRelaxation:
        if (!f || !wf::is_matter(*f)) {
            fail("packet_relaxation needs a matter field");
        }
        break;
    case Kind::EigenstateSteady:
        if (!f || !wf::is_matter(*f) || wf::intensity_period(*f) != 0.0) {
            fail("eigenstate_steady needs a matter field with stationary density");
        }
        break;
    case Kind::BornViolation:
        if (!std::holds_alternative<SquareDrive>(s.drive)) {
            fail("born_violation needs a square drive");
        }
        break;
    case Kind::ConstantRate:
        if (!std::holds_alternative<ConstantDrive>(s.drive)) {
            fail("constant_rate needs a constant drive");
        }
        break;
    case Kind::Relaxation:
        break;
    }
}

const std::vector<Scenario>& registry()
{
    static const std::vector<Scenario> reg = build_registry();
    return reg;
}

std::vector<std::string> scenario_names()
{
    std::vector<std::string> out;
    for (const auto& s : registry()) {
        out.push_back(s.name);
    }
    return out;
}

const Scenario& find_scenario(std::string_view name)
{
    for (const auto& s : registry()) {
        if (s.name == name) {
            return s;
        }
    }
    throw InvalidSpecError(fmt::format("unknown scenario '{}'; valid names: {}", name,
                                       fmt::join(scenario_names(), ", ")));
}

kin::Intensity drive_intensity(const Scenario& s)
{
    return std::visit(
        [](const auto& d) -> kin::Intensity {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, wf::FieldSpec>) {
                return kin::field_intensity(d);
            } else if constexpr (std::is_same_v<T, ConstantDrive>) {
                return kin::constant_intensity(d.level);
            } else if constexpr (std::is_same_v<T, SquareDrive>) {
                return kin::square_wave_intensity(d.low, d.high, d.half_period);
            } else {
                return kin::sinusoidal_intensity(d.mean, d.amplitude, d.angular_frequency,
                                                 d.phase);
            }
        },
        s.drive);
}

bool ResultBundle::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ResultBundle run_scenario(const Scenario& s, const RunOptions& options)
{
    stage("validate", options, [&] { validate(s); });

    ResultBundle out;
    out.scenario = s.name;
    out.kind = s.kind;
    out.seed = s.seed;
    out.params = s.params;
    auto& stats = out.statistics;

    const double tau = s.params.tau();
    const double transient = s.transient_lifetimes * tau;
    const kin::Intensity intensity = drive_intensity(s);
    const kin::Intensity reference = kin::scaled(intensity, s.params.equilibrium_gain());
    const auto* field = field_of(s);

    out.density = stage("kinetics", options,
                        [&] { return integrate(s, s.params, intensity, s.t_end, s.dt); });

    out.events = stage("simulate", options, [&] {
        const auto rate = pp::birth_rate(s.params, kin::scaled(intensity, s.ensemble));
        return pp::simulate(s.params, rate, s.region, s.t_end, s.seed);
    });
    const std::size_t births = out.events.birth_count();
    stats["births"] = static_cast<double>(births);
    stats["rate_bound"] = out.events.rate_bound;

    const pp::BinGrid bins = pp::BinGrid::uniform(s.region.lo, s.region.hi, s.bins);
    stage("reference", options, [&] {
        out.expected_pmf = normalize(bin_masses(intensity, bins, 0.0, s.t_end));
        out.profile_grid = out.density.grid;
        out.profile.resize(out.profile_grid.size());
        for (std::size_t i = 0; i < out.profile.size(); ++i) {
            out.profile[i] = reference.mean(out.profile_grid[i], 0.0, s.t_end);
        }
    });

    stage("histogram", options, [&] {
        out.histogram = est::birth_histogram(out.events, bins);
        if (births > 0) {
            const auto chi = est::chi_square(out.histogram, out.expected_pmf);
            stats["chi_square"] = chi.statistic;
            stats["chi_square_dof"] = static_cast<double>(chi.dof);
            stats["chi_square_p"] = chi.p_value;
            stats["l1_distance"] = est::l1_distance(
                out.histogram, est::BinnedDistribution::from_counts(bins, out.expected_pmf));
        }
    });

    stage("estimate", options, [&] {
        switch (s.kind) {
        case Kind::Wiener: {
            // Visibility of the analytic time-averaged profile on a fine grid.
            const double period = wf::intensity_period(*field);
            const auto fine = linspace(s.region.lo, s.region.hi, 100 * s.bins + 1);
            stats["visibility"] =
                est::visibility(wf::transverse_profile(*field, fine, {0.0, period}));
            if (births > 0) {
                stats["visibility_histogram"] = est::visibility(out.histogram.counts);
            }
            const bool fringes =
                !std::holds_alternative<wf::ObliqueStanding>(field->variant) ||
                std::get<wf::ObliqueStanding>(field->variant).polarization ==
                    wf::Polarization::S;
            if (fringes) {
                const double expected = wf::fringe_spacing(*field);
                const double found = est::dominant_period(out.histogram, 2.0 * bins.width(0),
                                                          0.5 * s.region.length());
                stats["fringe_spacing_expected"] = expected;
                stats["fringe_spacing"] = found;
                stats["fringe_spacing_error"] = std::abs(found - expected);
                stats["fringe_spacing_bin_width"] = bins.width(0);
            }
            stats["born_deviation"] =
                est::born_deviation(out.density, reference, {transient, period});

            // Long-time occupancy against g tau <I> integrated per bin.
            const pp::BinGrid occ = pp::BinGrid::uniform(
                s.region.lo, s.region.hi, s.occupancy_bins > 0 ? s.occupancy_bins : s.bins);
            const auto observed = pp::mean_occupancy(out.events, occ, transient, s.t_end);
            const auto mass = bin_masses(intensity, occ, transient, s.t_end);
            const double gain = s.params.equilibrium_gain() * s.ensemble;
            double worst = 0.0;
            for (std::size_t i = 0; i < occ.size(); ++i) {
                const double expect = gain * mass[i];
                if (expect <= 0.0) {
                    continue;
                }
                const double sigma = est::time_average_sigma(expect, tau, s.t_end - transient);
                worst = std::max(worst, std::abs(observed[i] - expect) / sigma);
            }
            stats["occupancy_max_z"] = worst;

            double mean_i = 0.0;
            for (double m : mass) {
                mean_i += m;
            }
            mean_i /= s.region.length();
            stats["mean_intensity"] = mean_i;
            stats["critical_scale"] =
                kin::critical_scale(mean_i, s.params.omega(), s.critical_constant);
            break;
        }
        case Kind::DoubleSlit: {
            const auto ref = est::BinnedDistribution::from_counts(bins, out.expected_pmf);
            double excess = -std::numeric_limits<double>::infinity();
            double prev_l1 = 0.0;
            double prev_sigma = 0.0;
            for (std::size_t c = 0; c < s.checkpoints.size(); ++c) {
                const std::size_t n = s.checkpoints[c];
                if (n > births) {
                    throw DomainError(fmt::format(
                        "checkpoint {} exceeds the {} births of the run", n, births));
                }
                const auto h = est::birth_histogram(out.events, bins, n);
                const double l1 = est::l1_distance(h, ref);
                const double sigma =
                    est::l1_noise_sigma(out.expected_pmf, static_cast<double>(n));
                stats[fmt::format("l1_at_{}", n)] = l1;
                stats[fmt::format("l1_sigma_at_{}", n)] = sigma;
                if (c > 0) {
                    excess = std::max(excess,
                                      l1 - prev_l1 - 2.0 * std::hypot(sigma, prev_sigma));
                }
                prev_l1 = l1;
                prev_sigma = sigma;
                if (c + 1 == s.checkpoints.size()) {
                    stats["l1_distance"] = l1;
                }
            }
            if (s.checkpoints.size() > 1) {
                stats["l1_monotone_excess"] = excess;
            }
            std::vector<double> centres = bins.centres();
            stats["visibility"] =
                est::visibility(wf::transverse_profile(*field, centres, {0.0, 1.0}));
            stats["born_deviation"] = est::born_deviation(out.density, reference, {transient, 0.0});
            break;
        }
        case Kind::PacketRelaxation: {
            stats["born_deviation"] = est::born_deviation(out.density, reference, {transient, 0.0});
            const double t_spread = wf::characteristic_time(*field);
            stats["spreading_time"] = t_spread;
            stats["spreading_over_tau"] = t_spread / tau;

            const auto slow = kin::KineticParams::from_tau(s.params.mode(), s.params.omega(),
                                                           tau * s.contrast_factor);
            // Same recording interval in time as the main run.
            const auto stride = static_cast<std::size_t>(std::max(
                1.0, std::round(static_cast<double>(s.record_every) / s.contrast_factor)));
            const auto contrast =
                integrate(s, slow, intensity, s.t_end, s.dt * s.contrast_factor, stride);
            stats["born_deviation_contrast"] = est::born_deviation(
                contrast, kin::scaled(intensity, slow.equilibrium_gain()),
                {s.transient_lifetimes * slow.tau(), 0.0});
            stats["spreading_over_tau_contrast"] = t_spread / slow.tau();
            break;
        }
        case Kind::EigenstateSteady: {
            double worst = 0.0;
            const auto& d = out.density;
            for (std::size_t ti = 0; ti < d.rows(); ++ti) {
                if (d.times[ti] < transient) {
                    continue;
                }
                for (std::size_t ri = 0; ri < d.cols(); ++ri) {
                    const double ref = wf::instantaneous_intensity(*field, d.grid[ri], d.times[ti]) *
                                       s.params.equilibrium_gain();
                    // Interior points only: the ratio is undefined at nodes.
                    if (ref <= 1e-12) {
                        continue;
                    }
                    worst = std::max(worst, std::abs(d.at(ti, ri) / ref - 1.0));
                }
            }
            stats["born_ratio_error"] = worst;
            stats["born_deviation"] =
                est::born_deviation(out.density, reference, {10.0 * tau, 0.0});

            // Total probability relaxes toward the norm of |psi|^2 over the
            // region: |N(t) - N_inf| <= exp(-t / tau) |N(0) - N_inf|.
            const double h = (s.region.hi - s.region.lo) / static_cast<double>(d.cols() - 1);
            auto trapezoid = [&](auto value) {
                double sum = 0.0;
                for (std::size_t ri = 0; ri < d.cols(); ++ri) {
                    const double w = (ri == 0 || ri + 1 == d.cols()) ? 0.5 : 1.0;
                    sum += w * value(ri);
                }
                return sum * h;
            };
            const double n_inf = trapezoid([&](std::size_t ri) {
                return reference(0.0, d.grid[ri]);
            });
            const double n0 = trapezoid([&](std::size_t ri) { return d.at(0, ri); });
            double excess = -std::numeric_limits<double>::infinity();
            for (std::size_t ti = 0; ti < d.rows(); ++ti) {
                const double nt = trapezoid([&](std::size_t ri) { return d.at(ti, ri); });
                excess = std::max(excess, std::abs(nt - n_inf) -
                                              std::exp(-d.times[ti] / tau) * std::abs(n0 - n_inf));
            }
            stats["norm_limit"] = n_inf;
            stats["norm_relaxation_excess"] = excess;
            break;
        }
        case Kind::BornViolation: {
            const auto& sq = std::get<SquareDrive>(s.drive);
            const double h = sq.half_period;
            stats["born_deviation"] = est::born_deviation(out.density, reference, {transient, h});
            stats["born_deviation_pointwise"] =
                est::born_deviation(out.density, reference, {transient, 0.0});
            stats["born_deviation_expected"] = tau / h * std::tanh(h / (2.0 * tau));
            stats["oracle_error"] = oracle_error(out.density, s.params, sq);
            stats["half_period_over_tau"] = h / tau;

            SquareDrive slow = sq;
            slow.half_period = h * s.contrast_factor;
            const auto slow_i = kin::square_wave_intensity(slow.low, slow.high, slow.half_period);
            const auto contrast =
                integrate(s, s.params, slow_i, s.t_end * s.contrast_factor, s.dt);
            stats["born_deviation_contrast"] = est::born_deviation(
                contrast, kin::scaled(slow_i, s.params.equilibrium_gain()),
                {transient, slow.half_period});
            stats["born_deviation_contrast_expected"] =
                tau / slow.half_period * std::tanh(slow.half_period / (2.0 * tau));
            stats["oracle_error_contrast"] = oracle_error(contrast, s.params, slow);
            break;
        }
        case Kind::ConstantRate: {
            const double level = std::get<ConstantDrive>(s.drive).level;
            const double nu_v = s.params.birth_gain() * level * s.ensemble * s.region.length();
            const double expect_pop = nu_v * tau;
            const double duration = s.t_end - transient;
            const double pop = pp::mean_population(out.events, transient, s.t_end);
            stats["mean_population"] = pop;
            stats["expected_population"] = expect_pop;
            stats["population_z"] =
                std::abs(pop - expect_pop) / est::time_average_sigma(expect_pop, tau, duration);
            const double expect_births = nu_v * s.t_end;
            stats["expected_births"] = expect_births;
            stats["births_z"] =
                std::abs(static_cast<double>(births) - expect_births) / std::sqrt(expect_births);

            std::vector<double> gaps;
            double last = 0.0;
            for (const auto& e : out.events.events) {
                if (e.kind != pp::EventKind::Birth) {
                    continue;
                }
                gaps.push_back(e.time - last);
                last = e.time;
                if (gaps.size() == kKsSamples) {
                    break;
                }
            }
            std::vector<double> lifetimes;
            // Deaths past t_end are censored; 20 tau of headroom makes the
            // censored fraction e^-20.
            for (const auto& p : pp::particles(out.events)) {
                if (p.birth < s.t_end - 20.0 * tau && std::isfinite(p.death)) {
                    lifetimes.push_back(p.death - p.birth);
                    if (lifetimes.size() == kKsSamples) {
                        break;
                    }
                }
            }
            if (gaps.size() < kKsSamples || lifetimes.size() < kKsSamples) {
                throw DomainError(fmt::format(
                    "need {} gaps and lifetimes, have {} and {}", kKsSamples, gaps.size(),
                    lifetimes.size()));
            }
            stats["ks_interbirth"] = est::ks_exponential(gaps, 1.0 / nu_v);
            stats["ks_lifetime"] = est::ks_exponential(lifetimes, tau);
            stats["ks_critical"] = est::ks_critical(kKsSamples, kKsAlpha);
            const double mean_life =
                std::accumulate(lifetimes.begin(), lifetimes.end(), 0.0) /
                static_cast<double>(lifetimes.size());
            stats["lifetime_mean"] = mean_life;
            stats["lifetime_mean_z"] = std::abs(mean_life - tau) /
                                       (tau / std::sqrt(static_cast<double>(lifetimes.size())));
            break;
        }
        case Kind::Relaxation: {
            stats["born_deviation"] = est::born_deviation(out.density, reference, {transient, 0.0});
            if (const auto* sin = std::get_if<SinusoidDrive>(&s.drive)) {
                const double w = sin->angular_frequency;
                std::vector<double> column(out.density.rows());
                for (std::size_t ti = 0; ti < column.size(); ++ti) {
                    column[ti] = out.density.at(ti, 0);
                }
                const auto fit = est::fit_harmonic(out.density.times, column, w, transient);
                const double ratio = fit.amplitude / (s.params.equilibrium_gain() * sin->amplitude);
                const double lag = wrap_angle(fit.phase + sin->phase);
                stats["omega_tau"] = w * tau;
                stats["amplitude_ratio"] = ratio;
                stats["amplitude_ratio_expected"] = 1.0 / std::sqrt(1.0 + w * w * tau * tau);
                stats["amplitude_ratio_error"] =
                    std::abs(ratio - stats["amplitude_ratio_expected"]);
                stats["phase_lag"] = lag;
                stats["phase_lag_expected"] = std::atan(w * tau);
                stats["phase_lag_error"] = std::abs(lag - stats["phase_lag_expected"]);
            } else if (const auto* sq = std::get_if<SquareDrive>(&s.drive)) {
                stats["oracle_error"] = oracle_error(out.density, s.params, *sq);
            }
            break;
        }
        }
    });

    stage("checks", options, [&] {
        for (const auto& [name, threshold] : s.thresholds) {
            const auto it = stats.find(name);
            if (it == stats.end()) {
                throw InvalidSpecError(
                    fmt::format("threshold on '{}', which this scenario does not compute", name));
            }
            out.checks.push_back({name, threshold, it->second, threshold.accepts(it->second)});
        }
    });
    return out;
}

} // namespace wavekin::scenarios

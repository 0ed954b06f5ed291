#include "wavekin/kinetics.hpp"

#include "wavekin/errors.hpp"
#include "wavekin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>
#include <utility>

#include <fmt/format.h>

namespace wavekin::kinetics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double product(Mode mode, double gamma, double tau, double omega)
{
    const double t = tau * omega;
    if (mode == Mode::Photon) {
        return (4.0 * kPi * gamma) * t;
    }
    return gamma * t;
}

// Walks outwards from start one ulp at a time until the identity evaluates
// to exactly 1.
template <typename F>
std::optional<double> nudge_to_identity(double start, int max_ulps, F&& eval)
{
    if (eval(start) == 1.0) {
        return start;
    }
    double up = start;
    double down = start;
    for (int i = 0; i < max_ulps; ++i) {
        up = std::nextafter(up, kInf);
        if (eval(up) == 1.0) {
            return up;
        }
        down = std::nextafter(down, 0.0);
        if (eval(down) == 1.0) {
            return down;
        }
    }
    return std::nullopt;
}

// Some products skip over 1.0 for every value of the derived quantity; the
// given one is then moved by the fewest ulps that admit an exact pair.
// Returns {given, derived}.
template <typename F>
std::pair<double, double> solve_identity(double given, double scale, double omega, F&& eval)
{
    double up = given;
    double down = given;
    for (int k = 0; k <= 64; ++k) {
        for (double x : {up, down}) {
            const double guess = 1.0 / (scale * x * omega);
            if (!(guess > 0.0) || !std::isfinite(guess)) {
                continue;
            }
            if (const auto d = nudge_to_identity(guess, 8, [&](double v) { return eval(x, v); })) {
                return {x, *d};
            }
            if (k == 0) {
                break;
            }
        }
        up = std::nextafter(up, kInf);
        down = std::nextafter(down, 0.0);
    }
    throw InvalidSpecError("calibration identity is not representable for these inputs");
}

void require_positive(double x, std::string_view name)
{
    if (!std::isfinite(x) || !(x > 0.0)) {
        throw InvalidSpecError(fmt::format("{} must be finite and strictly positive, got {}", name, x));
    }
}

double identity_scale(Mode mode) { return mode == Mode::Photon ? 4.0 * kPi : 1.0; }

} // namespace

std::string_view mode_name(Mode mode) { return mode == Mode::Photon ? "photon" : "matter"; }

Mode parse_mode(std::string_view text)
{
    if (text == "photon") {
        return Mode::Photon;
    }
    if (text == "matter") {
        return Mode::Matter;
    }
    throw InvalidSpecError(fmt::format("unknown mode '{}' (expected photon or matter)", text));
}

KineticParams KineticParams::from_tau(Mode mode, double omega, double tau)
{
    require_positive(omega, "omega");
    require_positive(tau, "tau");
    const auto [t, gamma] = solve_identity(tau, identity_scale(mode), omega, [&](double x, double g) {
        return product(mode, g, x, omega);
    });
    return KineticParams(mode, omega, gamma, t);
}

KineticParams KineticParams::from_gamma(Mode mode, double omega, double gamma)
{
    require_positive(omega, "omega");
    require_positive(gamma, "gamma");
    const auto [g, tau] = solve_identity(gamma, identity_scale(mode), omega, [&](double x, double t) {
        return product(mode, x, t, omega);
    });
    return KineticParams(mode, omega, g, tau);
}

KineticParams KineticParams::calibrate(Mode mode, double omega, std::optional<double> tau,
                                       std::optional<double> gamma)
{
    if (tau && gamma) {
        require_positive(omega, "omega");
        require_positive(*tau, "tau");
        require_positive(*gamma, "gamma");
        const double p = product(mode, *gamma, *tau, omega);
        if (std::abs(p - 1.0) > 1e-12) {
            throw InvalidSpecError(fmt::format(
                "tau = {} and gamma = {} violate the {} identity {} = 1 (got {})", *tau, *gamma,
                mode_name(mode), mode == Mode::Photon ? "4 pi gamma tau omega" : "gamma tau omega",
                p));
        }
        return from_tau(mode, omega, *tau);
    }
    if (tau) {
        return from_tau(mode, omega, *tau);
    }
    if (gamma) {
        return from_gamma(mode, omega, *gamma);
    }
    throw InvalidSpecError("calibration needs tau or gamma");
}

KineticParams KineticParams::restore(Mode mode, double omega, double gamma, double tau)
{
    require_positive(omega, "omega");
    require_positive(gamma, "gamma");
    require_positive(tau, "tau");
    if (product(mode, gamma, tau, omega) != 1.0) {
        throw InvalidSpecError("serialized kinetic parameters do not satisfy the calibration identity");
    }
    return KineticParams(mode, omega, gamma, tau);
}

double KineticParams::calibration_product() const { return product(mode_, gamma_, tau_, omega_); }

double KineticParams::birth_gain() const
{
    return mode_ == Mode::Photon ? gamma_ : gamma_ * beta();
}

double KineticParams::equilibrium_gain() const
{
    // Matter: gamma * beta * tau / hbar == gamma * tau * omega, exactly 1.
    return mode_ == Mode::Photon ? gamma_ * tau_ : gamma_ * tau_ * omega_;
}

// ---------------------------------------------------------------------------
// Intensity

std::vector<double> Intensity::jumps_in(double t0, double t1) const
{
    std::vector<double> out;
    if (!(jump_period > 0.0) || !(t1 > t0)) {
        return out;
    }
    auto k = static_cast<long long>(std::floor(t0 / jump_period)) + 1;
    for (;; ++k) {
        const double t = static_cast<double>(k) * jump_period;
        if (t <= t0) {
            continue;
        }
        if (t >= t1) {
            break;
        }
        out.push_back(t);
    }
    return out;
}

double Intensity::mean(double r, double t0, double t1) const
{
    if (window_mean) {
        return window_mean(r, t0, t1);
    }
    return integral(r, t0, t1, nullptr, 1e-12) / (t1 - t0);
}

double Intensity::integral(double r, double t0, double t1,
                           const std::function<double(double)>& weight, double rel_tol) const
{
    const auto jumps = jumps_in(t0, t1);
    quadrature::Options opts;
    opts.rel_tol = rel_tol;
    opts.breakpoints = jumps;
    opts.max_piece = variation_time;
    if (weight) {
        return quadrature::integrate([&](double t) { return at(t, r) * weight(t); }, t0, t1, opts)
            .value;
    }
    return quadrature::integrate([&](double t) { return at(t, r); }, t0, t1, opts).value;
}

Intensity field_intensity(const wavefield::FieldSpec& spec)
{
    wavefield::validate(spec);
    Intensity out;
    out.at = [spec](double t, double r) { return wavefield::instantaneous_intensity(spec, r, t); };
    out.variation_time = wavefield::characteristic_time(spec);
    out.window_mean = [spec](double r, double t0, double t1) {
        return wavefield::mean_intensity(spec, r, {t0, t1});
    };
    return out;
}

Intensity constant_intensity(double level)
{
    if (!std::isfinite(level) || level < 0.0) {
        throw DomainError(fmt::format("intensity level must be finite and >= 0, got {}", level));
    }
    Intensity out;
    out.at = [level](double, double) { return level; };
    out.window_mean = [level](double, double, double) { return level; };
    return out;
}

Intensity square_wave_intensity(double low, double high, double half_period, bool starts_high)
{
    if (!std::isfinite(low) || !std::isfinite(high) || low < 0.0 || high < 0.0) {
        throw DomainError("square-wave levels must be finite and >= 0");
    }
    if (!std::isfinite(half_period) || !(half_period > 0.0)) {
        throw DomainError("square-wave half period must be positive");
    }
    Intensity out;
    out.at = [=](double t, double) {
        auto k = static_cast<long long>(std::floor(t / half_period));
        // Keep the piece index consistent with the jump times k * half_period.
        if (static_cast<double>(k + 1) * half_period <= t) {
            ++k;
        } else if (static_cast<double>(k) * half_period > t) {
            --k;
        }
        const bool even = (k % 2 + 2) % 2 == 0;
        return even == starts_high ? high : low;
    };
    out.jump_period = half_period;
    out.variation_time = half_period;
    return out;
}

Intensity sinusoidal_intensity(double mean, double amplitude, double angular_frequency,
                               double phase)
{
    if (!(angular_frequency > 0.0) || !std::isfinite(angular_frequency)) {
        throw DomainError("sinusoid angular frequency must be positive");
    }
    if (!std::isfinite(mean) || !std::isfinite(amplitude) || mean < std::abs(amplitude)) {
        throw DomainError("sinusoidal intensity must stay non-negative (mean >= |amplitude|)");
    }
    Intensity out;
    out.at = [=](double t, double) { return mean + amplitude * std::cos(angular_frequency * t + phase); };
    out.variation_time = kPi / angular_frequency;
    out.window_mean = [=](double, double t0, double t1) {
        const double w = angular_frequency;
        return mean + amplitude * (std::sin(w * t1 + phase) - std::sin(w * t0 + phase)) /
                          (w * (t1 - t0));
    };
    return out;
}

Intensity scaled(Intensity base, double factor)
{
    Intensity out = base;
    out.at = [f = base.at, factor](double t, double r) { return factor * f(t, r); };
    if (base.window_mean) {
        out.window_mean = [m = base.window_mean, factor](double r, double t0, double t1) {
            return factor * m(r, t0, t1);
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// DensitySeries

double DensitySeries::running_mean(std::size_t ti, std::size_t ri) const
{
    if (cumulative.empty()) {
        throw PreconditionError("series carries no running integral");
    }
    if (times[ti] <= 0.0) {
        return at(ti, ri);
    }
    return cumulative[ti * grid.size() + ri] / times[ti];
}

std::optional<std::size_t> DensitySeries::find_time(double t) const
{
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    const double tol = 1e-12 * std::max(1.0, std::abs(t));
    std::optional<std::size_t> best;
    for (auto cand : {it, it == times.begin() ? it : std::prev(it)}) {
        if (cand != times.end() && std::abs(*cand - t) <= tol) {
            best = static_cast<std::size_t>(cand - times.begin());
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Integrator

namespace {

struct Step {
    double t0;
    double t1;
    bool ends_on_jump;
};

std::vector<Step> plan_steps(const Intensity& intensity, double t_end, double dt)
{
    std::vector<double> cuts{0.0};
    for (double j : intensity.jumps_in(0.0, t_end)) {
        cuts.push_back(j);
    }
    cuts.push_back(t_end);
    // t_end itself may be a jump; the last step then also needs the left limit.
    const double p = intensity.jump_period;
    const bool final_jump =
        p > 0.0 && static_cast<double>(std::llround(t_end / p)) * p == t_end;

    std::vector<Step> steps;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s];
        const double hi = cuts[s + 1];
        const double len = hi - lo;
        auto n = static_cast<std::size_t>(std::ceil(len / dt * (1.0 - 1e-12)));
        n = std::max<std::size_t>(n, 1);
        const double h = len / static_cast<double>(n);
        const bool jump = s + 2 < cuts.size() || (s + 2 == cuts.size() && final_jump);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = lo + h * static_cast<double>(i);
            const double b = (i + 1 == n) ? hi : lo + h * static_cast<double>(i + 1);
            steps.push_back({a, b, jump && i + 1 == n});
        }
    }
    return steps;
}

} // namespace

DensitySeries integrate_kinetics(const KineticParams& params, const Intensity& intensity,
                                 std::span<const double> p0, std::span<const double> grid,
                                 double t_end, double dt, const IntegrationOptions& options)
{
    const double tau = params.tau();
    if (!std::isfinite(t_end) || !(t_end > 0.0)) {
        throw DomainError(fmt::format("t_end must be positive, got {}", t_end));
    }
    if (!std::isfinite(dt) || !(dt > 0.0)) {
        throw StepSizeError(fmt::format("dt must be positive, got {}", dt));
    }
    if (dt > tau / 20.0 * (1.0 + 1e-12)) {
        throw StepSizeError(fmt::format(
            "dt = {} does not resolve the relaxation time; need dt <= tau / 20 = {}", dt,
            tau / 20.0));
    }
    if (grid.empty() || p0.size() != grid.size()) {
        throw DomainError("initial density must have one value per grid point");
    }
    for (double v : p0) {
        if (!std::isfinite(v) || v < 0.0) {
            throw DomainError(fmt::format("initial density must be finite and >= 0, got {}", v));
        }
    }
    const std::size_t record_every = std::max<std::size_t>(options.record_every, 1);

    const auto steps = plan_steps(intensity, t_end, dt);
    std::vector<std::size_t> recorded;  // step counts after which a row is stored
    for (std::size_t j = 1; j <= steps.size(); ++j) {
        if (j % record_every == 0 || j == steps.size()) {
            recorded.push_back(j);
        }
    }

    DensitySeries out;
    out.mode = params.mode();
    out.grid.assign(grid.begin(), grid.end());
    out.times.reserve(recorded.size() + 1);
    out.times.push_back(0.0);
    for (std::size_t j : recorded) {
        out.times.push_back(steps[j - 1].t1);
    }
    const std::size_t cols = grid.size();
    out.values.assign(out.times.size() * cols, 0.0);
    out.cumulative.assign(out.times.size() * cols, 0.0);

    const double gain = params.birth_gain();
    const double inv_tau = 1.0 / tau;

    auto solve_column = [&](std::size_t ri) {
        const double r = grid[ri];
        double p = p0[ri];
        double c = 0.0;
        out.values[ri] = p;
        std::size_t next_row = 1;
        for (std::size_t j = 0; j < steps.size(); ++j) {
            const Step& s = steps[j];
            const double h = s.t1 - s.t0;
            const double tm = s.t0 + 0.5 * h;
            const double te = s.ends_on_jump ? std::nextafter(s.t1, s.t0) : s.t1;
            const double f0 = gain * intensity.at(s.t0, r);
            const double fm = gain * intensity.at(tm, r);
            const double fe = gain * intensity.at(te, r);

            const double k1 = f0 - p * inv_tau;
            const double p2 = p + 0.5 * h * k1;
            const double k2 = fm - p2 * inv_tau;
            const double p3 = p + 0.5 * h * k2;
            const double k3 = fm - p3 * inv_tau;
            const double p4 = p + h * k3;
            const double k4 = fe - p4 * inv_tau;

            c += h / 6.0 * (p + 2.0 * p2 + 2.0 * p3 + p4);
            p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

            if (next_row < out.times.size() && recorded[next_row - 1] == j + 1) {
                out.values[next_row * cols + ri] = p;
                out.cumulative[next_row * cols + ri] = c;
                ++next_row;
            }
        }
    };

    const unsigned threads = std::clamp<unsigned>(options.threads, 1, static_cast<unsigned>(cols));
    if (threads == 1) {
        for (std::size_t ri = 0; ri < cols; ++ri) {
            solve_column(ri);
        }
        return out;
    }

    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = cols * w / threads;
        const std::size_t end = cols * (w + 1) / threads;
        workers.emplace_back([&, begin, end, w] {
            try {
                for (std::size_t ri = begin; ri < end; ++ri) {
                    solve_column(ri);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

double closed_form_density(const KineticParams& params, const Intensity& intensity, double t,
                           double r, double rel_tol)
{
    if (!std::isfinite(t) || t < 0.0) {
        throw DomainError(fmt::format("time must be finite and >= 0, got {}", t));
    }
    if (t == 0.0) {
        return 0.0;
    }
    const double tau = params.tau();
    // Older history is damped by at least exp(-60).
    const double start = std::max(0.0, t - 60.0 * tau);
    Intensity pieces = intensity;
    pieces.variation_time = std::min(intensity.variation_time, tau);
    const double integral =
        pieces.integral(r, start, t, [t, tau](double s) { return std::exp((s - t) / tau); }, rel_tol);
    return params.birth_gain() * integral;
}

double time_average_identity_residual(const DensitySeries& series, const Intensity& intensity,
                                      const KineticParams& params, double t)
{
    if (series.times.empty() || series.times.front() != 0.0) {
        throw PreconditionError("series must start at t = 0");
    }
    for (double v : series.row(0)) {
        if (v != 0.0) {
            throw PreconditionError("averaging identity assumes p(0) = 0");
        }
    }
    if (series.cumulative.empty()) {
        throw PreconditionError("series carries no running integral of p");
    }
    if (!(t > 0.0)) {
        throw DomainError("identity needs t > 0");
    }
    const auto ti = series.find_time(t);
    if (!ti) {
        throw DomainError(fmt::format("t = {} is not a sample time of the series", t));
    }
    const double tau = params.tau();
    const double ts = series.times[*ti];
    double worst = 0.0;
    for (std::size_t ri = 0; ri < series.cols(); ++ri) {
        const double lhs = series.running_mean(*ti, ri);
        const double mean_i = intensity.mean(series.grid[ri], 0.0, ts);
        const double rhs = params.equilibrium_gain() * mean_i - tau / ts * series.at(*ti, ri);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double born_limit_density(const KineticParams& params, const wavefield::FieldSpec& spec, double r,
                          double t)
{
    if (params.mode() == Mode::Matter) {
        if (!wavefield::is_matter(spec)) {
            throw InvalidSpecError("matter kinetics needs a matter field");
        }
        return params.equilibrium_gain() * wavefield::instantaneous_intensity(spec, r, t);
    }
    if (!wavefield::is_optical(spec)) {
        throw InvalidSpecError("photon kinetics needs an optical field");
    }
    const double period = wavefield::intensity_period(spec);
    if (period > 0.0) {
        return params.equilibrium_gain() * wavefield::mean_intensity(spec, r, {t, t + period});
    }
    return params.equilibrium_gain() * wavefield::instantaneous_intensity(spec, r, t);
}

double critical_scale(double mean_intensity, double omega, double constant)
{
    if (!std::isfinite(mean_intensity) || !(mean_intensity > 0.0)) {
        throw DomainError(fmt::format("mean intensity must be positive, got {}", mean_intensity));
    }
    if (!std::isfinite(omega) || !(omega > 0.0) || !std::isfinite(constant) || !(constant > 0.0)) {
        throw DomainError("omega and the scale constant must be positive");
    }
    return std::cbrt(constant * omega / mean_intensity);
}

} // namespace wavekin::kinetics

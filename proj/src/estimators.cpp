#include "wavekin/estimators.hpp"

#include "wavekin/errors.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

namespace wavekin::estimators {

BinnedDistribution BinnedDistribution::from_counts(BinGrid grid, std::vector<double> counts)
{
    if (counts.size() != grid.size()) {
        throw DomainError(fmt::format("{} counts for {} bins", counts.size(), grid.size()));
    }
    double total = 0.0;
    for (double c : counts) {
        if (!std::isfinite(c) || c < 0.0) {
            throw DomainError("bin weights must be finite and non-negative");
        }
        total += c;
    }
    return {std::move(grid), std::move(counts), total};
}

std::vector<double> BinnedDistribution::pmf() const
{
    if (!(total > 0.0)) {
        throw DomainError("cannot normalize an empty distribution");
    }
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out[i] = counts[i] / total;
    }
    return out;
}

BinnedDistribution BinnedDistribution::normalized() const
{
    auto w = pmf();
    return {grid, std::move(w), 1.0};
}

BinnedDistribution birth_histogram(const pointprocess::EventLog& log, const BinGrid& grid,
                                   std::optional<std::size_t> max_births)
{
    std::vector<double> counts(grid.size(), 0.0);
    std::size_t seen = 0;
    for (const auto& e : log.events) {
        if (e.kind != pointprocess::EventKind::Birth) {
            continue;
        }
        if (max_births && seen >= *max_births) {
            break;
        }
        const auto b = grid.locate(e.position);
        if (!b) {
            throw AccountingError(fmt::format("birth of particle {} at {} lies outside [{}, {}]",
                                              e.particle_id, e.position, grid.lo(), grid.hi()));
        }
        counts[*b] += 1.0;
        ++seen;
    }
    return {grid, std::move(counts), static_cast<double>(seen)};
}

double l1_distance(const BinnedDistribution& a, const BinnedDistribution& b)
{
    if (!(a.grid == b.grid)) {
        throw DomainError("l1_distance needs distributions on the same grid");
    }
    const auto pa = a.pmf();
    const auto pb = b.pmf();
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        sum += std::abs(pa[i] - pb[i]);
    }
    return sum;
}

double visibility(std::span<const double> profile)
{
    if (profile.empty()) {
        throw DomainError("visibility of an empty profile");
    }
    const auto [mn, mx] = std::minmax_element(profile.begin(), profile.end());
    if (!std::isfinite(*mx) || *mn < 0.0) {
        throw DomainError("visibility needs a finite non-negative profile");
    }
    if (*mx == 0.0) {
        throw DomainError("visibility of an all-zero profile is undefined");
    }
    return (*mx - *mn) / (*mx + *mn);
}

Interval poisson_band(double expected, double nsigma)
{
    if (!(expected >= 0.0) || !(nsigma > 0.0)) {
        throw DomainError("poisson_band needs expected >= 0 and nsigma > 0");
    }
    const double half = nsigma * std::sqrt(expected);
    return {std::max(0.0, expected - half), expected + half};
}

double time_average_sigma(double mean, double tau, double duration)
{
    if (!(duration > 0.0) || !(tau > 0.0) || mean < 0.0) {
        throw DomainError("time_average_sigma needs positive tau and duration");
    }
    const double x = tau / duration;
    const double var = 2.0 * mean * x * (1.0 - x * (1.0 - std::exp(-1.0 / x)));
    return std::sqrt(var);
}

double l1_noise_sigma(std::span<const double> pmf, double n)
{
    if (!(n > 0.0)) {
        throw DomainError("l1_noise_sigma needs n > 0");
    }
    double s = 0.0;
    for (double p : pmf) {
        s += p * (1.0 - p);
    }
    return std::sqrt((1.0 - 2.0 / kPi) * s / n);
}

namespace {

// Time integral of p over [t0, t1] for one grid column.
double series_integral(const kinetics::DensitySeries& s, std::size_t ri, double t0, double t1)
{
    const auto& ts = s.times;
    auto cumulative_at = [&](double t) {
        if (const auto exact = s.find_time(t)) {
            return s.cumulative[*exact * s.cols() + ri];
        }
        const auto it = std::lower_bound(ts.begin(), ts.end(), t);
        const auto hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
            it - ts.begin(), static_cast<std::ptrdiff_t>(ts.size()) - 1));
        if (hi == 0) {
            return s.cumulative[ri];
        }
        const std::size_t lo = hi - 1;
        // The running integral has derivative p; integrate the linear
        // interpolant of p from the left sample.
        const double dt = t - ts[lo];
        const double slope = (s.at(hi, ri) - s.at(lo, ri)) / (ts[hi] - ts[lo]);
        return s.cumulative[lo * s.cols() + ri] + s.at(lo, ri) * dt + 0.5 * slope * dt * dt;
    };
    if (!s.cumulative.empty()) {
        return cumulative_at(t1) - cumulative_at(t0);
    }
    // Trapezoid over samples, linear interpolation at the ends.
    auto value_at = [&](double t) {
        const auto it = std::lower_bound(ts.begin(), ts.end(), t);
        if (it == ts.begin()) {
            return s.at(0, ri);
        }
        const auto hi = static_cast<std::size_t>(it - ts.begin());
        if (hi >= ts.size()) {
            return s.at(ts.size() - 1, ri);
        }
        const std::size_t lo = hi - 1;
        const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
        return (1.0 - w) * s.at(lo, ri) + w * s.at(hi, ri);
    };
    double sum = 0.0;
    double prev_t = t0;
    double prev_v = value_at(t0);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] <= t0 || ts[i] >= t1) {
            continue;
        }
        sum += 0.5 * (prev_v + s.at(i, ri)) * (ts[i] - prev_t);
        prev_t = ts[i];
        prev_v = s.at(i, ri);
    }
    sum += 0.5 * (prev_v + value_at(t1)) * (t1 - prev_t);
    return sum;
}

} // namespace

double born_deviation(const kinetics::DensitySeries& series, const kinetics::Intensity& reference,
                      const BornDeviationOptions& options)
{
    const double w = options.window;
    if (w < 0.0 || !std::isfinite(w)) {
        throw DomainError("deviation window must be finite and >= 0");
    }
    double worst = 0.0;
    double ref_max = 0.0;
    std::size_t used = 0;
    for (std::size_t ti = 0; ti < series.rows(); ++ti) {
        const double t = series.times[ti];
        if (t < options.transient || t - w < options.transient) {
            continue;
        }
        ++used;
        for (std::size_t ri = 0; ri < series.cols(); ++ri) {
            const double r = series.grid[ri];
            double p = 0.0;
            double ref = 0.0;
            if (w > 0.0) {
                p = series_integral(series, ri, t - w, t) / w;
                ref = reference.mean(r, t - w, t);
            } else {
                p = series.at(ti, ri);
                ref = reference(t, r);
            }
            worst = std::max(worst, std::abs(p - ref));
            ref_max = std::max(ref_max, ref);
        }
    }
    if (used == 0) {
        throw DomainError("no samples remain after the transient");
    }
    if (!(ref_max > 0.0)) {
        throw DomainError("reference density is zero everywhere");
    }
    return worst / ref_max;
}

ChiSquare chi_square(const BinnedDistribution& observed, std::span<const double> expected_pmf)
{
    if (expected_pmf.size() != observed.counts.size()) {
        throw DomainError("expected pmf and histogram sizes differ");
    }
    const double n = observed.total;
    if (!(n > 0.0)) {
        throw DomainError("chi-square of an empty histogram");
    }
    ChiSquare out;
    std::size_t used = 0;
    for (std::size_t i = 0; i < expected_pmf.size(); ++i) {
        const double e = n * expected_pmf[i];
        const double o = observed.counts[i];
        if (e <= 0.0) {
            if (o > 0.0) {
                return {std::numeric_limits<double>::infinity(), 0, 0.0};
            }
            continue;
        }
        out.statistic += (o - e) * (o - e) / e;
        ++used;
    }
    if (used < 2) {
        throw DomainError("chi-square needs at least two populated bins");
    }
    out.dof = used - 1;
    out.p_value = boost::math::gamma_q(0.5 * static_cast<double>(out.dof), 0.5 * out.statistic);
    return out;
}

double ks_exponential(std::vector<double> samples, double mean)
{
    if (samples.empty() || !(mean > 0.0)) {
        throw DomainError("ks_exponential needs samples and a positive mean");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = -std::expm1(-samples[i] / mean);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

double ks_critical(std::size_t n, double alpha)
{
    if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("ks_critical needs n > 0 and alpha in (0, 1)");
    }
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double rn = std::sqrt(static_cast<double>(n));
    return c / (rn + 0.12 + 0.11 / rn);
}

namespace {

// Least-squares fit of values ~ c0 + c1 cos(omega x) + c2 sin(omega x) over
// samples with x >= from. Empty when the samples do not determine it.
struct LinearFit {
    std::array<double, 3> coef{};
    double explained = 0.0;  // sum of squares explained beyond the mean
};

std::optional<LinearFit> fit_cos_sin(std::span<const double> xs, std::span<const double> values,
                                     double omega, double from)
{
    double m[3][3] = {};
    double rhs[3] = {};
    std::size_t used = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < from) {
            continue;
        }
        const double b[3] = {1.0, std::cos(omega * xs[i]), std::sin(omega * xs[i])};
        for (int r = 0; r < 3; ++r) {
            for (int k = 0; k < 3; ++k) {
                m[r][k] += b[r] * b[k];
            }
            rhs[r] += b[r] * values[i];
        }
        ++used;
    }
    if (used < 3) {
        return std::nullopt;
    }
    const double sum = rhs[0];
    const double rhs0[3] = {rhs[0], rhs[1], rhs[2]};
    // Gaussian elimination with partial pivoting.
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[perm[r]][col]) > std::abs(m[perm[piv]][col])) {
                piv = r;
            }
        }
        std::swap(perm[col], perm[piv]);
        const int pr = perm[col];
        if (m[pr][col] == 0.0) {
            return std::nullopt;
        }
        for (int r = col + 1; r < 3; ++r) {
            const int rr = perm[r];
            const double f = m[rr][col] / m[pr][col];
            for (int k = col; k < 3; ++k) {
                m[rr][k] -= f * m[pr][k];
            }
            rhs[rr] -= f * rhs[pr];
        }
    }
    LinearFit fit;
    for (int col = 2; col >= 0; --col) {
        const int pr = perm[col];
        double s = rhs[pr];
        for (int k = col + 1; k < 3; ++k) {
            s -= m[pr][k] * fit.coef[k];
        }
        fit.coef[col] = s / m[pr][col];
    }
    fit.explained = fit.coef[0] * rhs0[0] + fit.coef[1] * rhs0[1] + fit.coef[2] * rhs0[2] -
                    sum * sum / static_cast<double>(used);
    return fit;
}

} // namespace

double dominant_period(const BinnedDistribution& histogram, double min_period, double max_period)
{
    if (!(min_period > 0.0) || !(max_period > min_period)) {
        throw DomainError("dominant_period needs 0 < min_period < max_period");
    }
    const auto x = histogram.grid.centres();
    const auto& c = histogram.counts;
    // Explained variance of a single sinusoid; unlike the plain periodogram it
    // has no leakage from the mean or the mirrored frequency.
    auto power = [&](double f) {
        const auto fit = fit_cos_sin(x, c, 2.0 * kPi * f, -std::numeric_limits<double>::infinity());
        return fit ? fit->explained : 0.0;
    };
    const double f_lo = 1.0 / max_period;
    const double f_hi = 1.0 / min_period;
    constexpr int kScan = 4000;
    const double df = (f_hi - f_lo) / kScan;
    double best_f = f_lo;
    double best_p = -1.0;
    for (int i = 0; i <= kScan; ++i) {
        const double f = f_lo + df * i;
        const double p = power(f);
        if (p > best_p) {
            best_p = p;
            best_f = f;
        }
    }
    // Golden-section refinement around the best scan point.
    double a = std::max(f_lo, best_f - df);
    double b = std::min(f_hi, best_f + df);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
        const double m1 = b - g * (b - a);
        const double m2 = a + g * (b - a);
        if (power(m1) < power(m2)) {
            a = m1;
        } else {
            b = m2;
        }
    }
    return 2.0 / (a + b);
}

Harmonic fit_harmonic(std::span<const double> times, std::span<const double> values, double omega,
                      double t_from)
{
    if (times.size() != values.size()) {
        throw DomainError("fit_harmonic: times and values differ in length");
    }
    const auto fit = fit_cos_sin(times, values, omega, t_from);
    if (!fit) {
        throw DomainError("fit_harmonic: samples do not determine the harmonic");
    }
    const auto& k = fit->coef;
    return {k[0], std::hypot(k[1], k[2]), std::atan2(k[2], k[1])};
}

} // namespace wavekin::estimators

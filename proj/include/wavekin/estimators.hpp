#pragma once

// Statistics over event logs and density series.

#include "wavekin/common.hpp"
#include "wavekin/kinetics.hpp"
#include "wavekin/pointprocess.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wavekin::estimators {

using pointprocess::BinGrid;

// Per-bin counts (or weights) on a grid.
struct BinnedDistribution {
    BinGrid grid;
    std::vector<double> counts;
    double total = 0.0;

    static BinnedDistribution from_counts(BinGrid grid, std::vector<double> counts);
    // Weights summing to one. Throws DomainError when total is zero.
    std::vector<double> pmf() const;
    BinnedDistribution normalized() const;
};

// Counts of Birth events per bin, optionally over the first max_births only.
// Births outside the grid raise AccountingError.
BinnedDistribution birth_histogram(const pointprocess::EventLog& log, const BinGrid& grid,
                                   std::optional<std::size_t> max_births = std::nullopt);

// Sum of |a_i - b_i| between the normalized forms of a and b.
double l1_distance(const BinnedDistribution& a, const BinnedDistribution& b);

// (max - min) / (max + min).
double visibility(std::span<const double> profile);

// [e - n sqrt(e), e + n sqrt(e)], floored at zero.
Interval poisson_band(double expected, double nsigma);

// Standard deviation of the time average over a window of length duration of
// a stationary count process with mean `mean` and exponential
// autocorrelation of time constant tau (the infinite-server queue).
double time_average_sigma(double mean, double tau, double duration);

// Approximate standard deviation of the L1 distance between an empirical
// histogram of n samples and its exact pmf.
double l1_noise_sigma(std::span<const double> pmf, double n);

struct BornDeviationOptions {
    double transient = 0.0;  // samples with t < transient are ignored
    // When positive, p and the reference are averaged over [t - window, t]
    // before comparison, as a detector with that integration time would.
    double window = 0.0;
};

// sup over sampled (t, r) of |p - reference| divided by the largest reference
// value over the same samples.
double born_deviation(const kinetics::DensitySeries& series, const kinetics::Intensity& reference,
                      const BornDeviationOptions& options);

struct ChiSquare {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

// Pearson goodness of fit of observed counts against an expected pmf.
ChiSquare chi_square(const BinnedDistribution& observed, std::span<const double> expected_pmf);

// Kolmogorov-Smirnov distance between the empirical distribution of the
// samples and an exponential law of the given mean.
double ks_exponential(std::vector<double> samples, double mean);
// Critical value of the one-sample KS statistic at significance alpha
// (Stephens' finite-n correction of the asymptotic law).
double ks_critical(std::size_t n, double alpha);

// Dominant spatial period of a binned profile, found by maximizing the
// periodogram over periods in [min_period, max_period].
double dominant_period(const BinnedDistribution& histogram, double min_period, double max_period);

// Least-squares fit value ~ offset + amplitude * cos(omega t - phase) over
// samples with t >= t_from.
struct Harmonic {
    double offset = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
};
Harmonic fit_harmonic(std::span<const double> times, std::span<const double> values,
                      double omega, double t_from);

} // namespace wavekin::estimators

#pragma once

// Deterministic relaxation kinetics of the particle density.
//
// Both photon and matter modes reduce to the pointwise ODE
//
//     dp/dt = g * I(t, r) - p / tau,
//
// where g is the birth gain (particles created per unit time per unit
// intensity) and tau the mean particle lifetime. The equilibrium density for
// a constant intensity is g * tau * I.

#include "wavekin/common.hpp"
#include "wavekin/wavefield.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wavekin::kinetics {

enum class Mode { Photon, Matter };

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view text);

// Rate constants of the birth-death kinetics in natural units (hbar = c = 1).
//
// The constructors enforce the calibration identities
//   photon: 4 pi gamma tau omega = 1
//   matter: gamma tau omega = 1 and beta = omega
// exactly in double precision, evaluated as gamma * (tau * omega) and
// (4 pi gamma) * (tau * omega). The derived quantity is nudged by a few ulp
// until calibration_product() is 1.0; when no value of it works, the supplied
// tau (or gamma) is also moved by a few ulp.
class KineticParams {
public:
    static KineticParams from_tau(Mode mode, double omega, double tau);
    static KineticParams from_gamma(Mode mode, double omega, double gamma);
    // Accepts tau, gamma or both. Both must then satisfy the identity to a
    // relative 1e-12, otherwise InvalidSpecError.
    static KineticParams calibrate(Mode mode, double omega, std::optional<double> tau,
                                   std::optional<double> gamma);
    // Rebuilds a parameter set from serialized values; the identity must
    // hold exactly.
    static KineticParams restore(Mode mode, double omega, double gamma, double tau);

    Mode mode() const { return mode_; }
    double omega() const { return omega_; }
    double gamma() const { return gamma_; }
    double tau() const { return tau_; }
    // Energy constant; equals hbar * omega for both modes.
    double beta() const { return omega_; }

    // (4 pi gamma) * (tau * omega) (photon) or gamma * (tau * omega) (matter).
    double calibration_product() const;
    // Birth rate per unit intensity: gamma (photon) or gamma beta / hbar (matter).
    double birth_gain() const;
    // Equilibrium density per unit intensity, birth_gain() * tau.
    double equilibrium_gain() const;

    bool operator==(const KineticParams&) const = default;

private:
    KineticParams(Mode mode, double omega, double gamma, double tau)
        : mode_(mode), omega_(omega), gamma_(gamma), tau_(tau) {}

    Mode mode_;
    double omega_;
    double gamma_;
    double tau_;
};

// Space-time intensity I(t, r) >= 0 driving the kinetics.
//
// Signals with jumps are right-continuous and declare the jump times as the
// multiples of jump_period; integrators align their steps with them.
struct Intensity {
    std::function<double(double t, double r)> at;
    double jump_period = 0.0;  // 0: continuous
    // Shortest time scale of variation; bounds quadrature pieces.
    double variation_time = std::numeric_limits<double>::infinity();
    // Optional closed-form time average over [t0, t1]; quadrature otherwise.
    std::function<double(double r, double t0, double t1)> window_mean;

    double operator()(double t, double r) const { return at(t, r); }
    std::vector<double> jumps_in(double t0, double t1) const;
    double mean(double r, double t0, double t1) const;
    // Integral over [t0, t1] of at(t, r) * weight(t).
    double integral(double r, double t0, double t1, const std::function<double(double)>& weight,
                    double rel_tol) const;
};

Intensity field_intensity(const wavefield::FieldSpec& spec);
Intensity constant_intensity(double level);
// low on [2kH, (2k+1)H), high on [(2k+1)H, (2k+2)H) when starts_high is
// false; swapped otherwise.
Intensity square_wave_intensity(double low, double high, double half_period,
                                bool starts_high = true);
// mean + amplitude * cos(angular_frequency * t + phase)
Intensity sinusoidal_intensity(double mean, double amplitude, double angular_frequency,
                               double phase = 0.0);
// Multiplies an intensity by a constant factor.
Intensity scaled(Intensity base, double factor);

// Density p(t, r) sampled on a time x space grid.
struct DensitySeries {
    Mode mode = Mode::Matter;
    std::vector<double> grid;
    std::vector<double> times;
    std::vector<double> values;      // times.size() x grid.size(), row-major in time
    std::vector<double> cumulative;  // running integral of p from 0, same shape; may be empty

    std::size_t rows() const { return times.size(); }
    std::size_t cols() const { return grid.size(); }
    double at(std::size_t ti, std::size_t ri) const { return values[ti * grid.size() + ri]; }
    std::span<const double> row(std::size_t ti) const
    {
        return {values.data() + ti * grid.size(), grid.size()};
    }
    // Running time average of p up to sample ti (rho of the kinetic theory).
    double running_mean(std::size_t ti, std::size_t ri) const;
    // Index of the sample at time t (within a relative 1e-12), or nullopt.
    std::optional<std::size_t> find_time(double t) const;
};

struct IntegrationOptions {
    std::size_t record_every = 1;  // keep every n-th step (the final step is always kept)
    unsigned threads = 1;
};

// Classical fourth-order Runge-Kutta on every grid point, fixed step <= dt
// (steps are shortened to land on t_end and on intensity jumps).
// Throws StepSizeError if dt > tau / 20 and DomainError on negative p0.
DensitySeries integrate_kinetics(const KineticParams& params, const Intensity& intensity,
                                 std::span<const double> p0, std::span<const double> grid,
                                 double t_end, double dt, const IntegrationOptions& options = {});

// g * exp(-t/tau) * integral_0^t I(t', r) exp(t'/tau) dt' by adaptive
// quadrature; the solution starting from p(0) = 0.
double closed_form_density(const KineticParams& params, const Intensity& intensity, double t,
                           double r, double rel_tol = 1e-10);

// Largest absolute residual over the grid of the exact averaging identity
//   <p>_t = g tau <I>_t - (tau / t) p(t)
// evaluated at sample time t. The series must start from p(0) = 0.
double time_average_identity_residual(const DensitySeries& series, const Intensity& intensity,
                                      const KineticParams& params, double t);

// Born-limit prediction: |psi(r, t)|^2 (matter) or gamma tau <E^2> over one
// period (photon).
double born_limit_density(const KineticParams& params, const wavefield::FieldSpec& spec,
                          double r, double t);

// Size of the critical field disturbance, (constant * omega / <E^2>)^(1/3).
double critical_scale(double mean_intensity, double omega, double constant = 1.0);

} // namespace wavekin::kinetics

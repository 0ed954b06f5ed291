#pragma once

// Closed-form wave fields driving the particle kinetics.
//
// Optical variants describe a real electric field E(z, t) (three components,
// reduced to the single coordinate z measured from the mirror, or the screen
// coordinate x for the double slit). Matter variants describe a complex
// scalar amplitude psi(x, t) in natural units (hbar = 1).
//
// Intensity means E.E for optical fields and |psi|^2 for matter fields.

#include "wavekin/common.hpp"

#include <array>
#include <complex>
#include <span>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace wavekin::wavefield {

enum class Polarization { S, P };

// E = E0 cos(k z - w t), polarized along x.
struct PlaneWave {
    double amplitude = 1.0;
    double wavenumber = 1.0;
    double angular_frequency = 1.0;
};

// Plane wave at normal incidence on a perfect mirror in the z = 0 plane.
// Reflection coefficient -1, so E has a node at the mirror.
struct StandingWaveNormal {
    double amplitude = 1.0;
    double wavenumber = 1.0;
    double angular_frequency = 1.0;
};

// Plane wave incident at an angle on the same mirror, evaluated along the
// mirror normal (x = 0).
struct ObliqueStanding {
    double amplitude = 1.0;
    double wavenumber = 1.0;
    double angular_frequency = 1.0;
    double incidence_angle = kPi / 4.0;  // radians, in (0, pi/2)
    Polarization polarization = Polarization::S;
};

// Fraunhofer two-slit pattern on a distant screen. Stationary in time;
// intensity is cos^2(pi d x / (lambda L)) sinc^2(pi a x / (lambda L)), peak 1.
struct DoubleSlitFarField {
    double slit_separation = 1.0;
    double slit_width = 0.2;
    double wavelength = 1.0;
    double screen_distance = 1.0;
};

// Free Gaussian wave packet. The packet has its minimal width sigma0 at
// t = focus_time, so a packet with focus_time > 0 converges first.
struct GaussianPacket {
    double initial_width = 1.0;
    double mean_wavenumber = 0.0;
    double mass = 1.0;
    double focus_time = 0.0;
};

// Stationary state q of the infinite well [0, box_length].
struct BoxEigenstate {
    int quantum_number = 1;
    double box_length = 1.0;
    double mass = 1.0;  // only enters the phase exp(-i E_q t)
};

struct FieldSpec;
struct SuperpositionTerm;

// Coherent sum of matter fields: psi = sum_j w_j psi_j.
struct Superposition {
    std::vector<SuperpositionTerm> terms;
};

using FieldVariant = std::variant<PlaneWave, StandingWaveNormal, ObliqueStanding,
                                  DoubleSlitFarField, GaussianPacket, BoxEigenstate,
                                  Superposition>;

struct FieldSpec {
    FieldVariant variant;

    FieldSpec() = default;
    template <typename T>
        requires(!std::is_same_v<std::decay_t<T>, FieldSpec> &&
                 std::is_constructible_v<FieldVariant, T>)
    FieldSpec(T&& v) : variant(std::forward<T>(v)) {}  // NOLINT(google-explicit-constructor)
};

struct SuperpositionTerm {
    std::complex<double> weight;
    FieldSpec field;
};

// Time window [start, end] used for averages.
struct TimeWindow {
    double start = 0.0;
    double end = 0.0;
    double length() const { return end - start; }
};

std::string_view variant_name(const FieldSpec& spec);
bool is_optical(const FieldSpec& spec);
bool is_matter(const FieldSpec& spec);
// True for optical fields whose intensity is periodic in time with nonzero
// period (plane and standing waves).
bool is_periodic(const FieldSpec& spec);
// Period of the intensity (pi / omega) for periodic variants, 0 for fields
// with a stationary intensity, and +inf otherwise.
double intensity_period(const FieldSpec& spec);

// Shortest time over which the intensity changes appreciably: the period for
// periodic optical fields, +inf for stationary ones, the spreading or beat
// time for matter fields.
double characteristic_time(const FieldSpec& spec);

// Throws InvalidSpecError on any violated parameter invariant.
void validate(const FieldSpec& spec);

// Spatial support of the field.
Interval domain(const FieldSpec& spec);

// Field vector at (r, t) for optical variants.
std::array<double, 3> electric_field(const FieldSpec& spec, double r, double t);
// Complex amplitude at (r, t) for matter variants.
std::complex<double> amplitude(const FieldSpec& spec, double r, double t);

double instantaneous_intensity(const FieldSpec& spec, double r, double t);

// (1/T) times the integral of the instantaneous intensity over the window.
// Closed form for optical variants, adaptive quadrature (relative tolerance
// 1e-9) for time-dependent matter fields.
double mean_intensity(const FieldSpec& spec, double r, TimeWindow window);

// mean_intensity at every grid point. DoubleSlitFarField profiles are
// normalized to unit integral over [grid.front(), grid.back()].
std::vector<double> transverse_profile(const FieldSpec& spec, std::span<const double> grid,
                                       TimeWindow window);

// Period along z of the time-averaged intensity of standing-wave fringes.
double fringe_spacing(const FieldSpec& spec);

} // namespace wavekin::wavefield

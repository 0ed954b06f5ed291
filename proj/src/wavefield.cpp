#include "wavekin/wavefield.hpp"

#include "wavekin/errors.hpp"
#include "wavekin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace wavekin::wavefield {

namespace {

using Vec3 = std::array<double, 3>;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// One travelling plane-wave component evaluated along z:
// E = amplitude * polarization * cos(slope * z - omega * t).
struct Component {
    double amplitude;
    Vec3 polarization;
    double slope;
};

struct OpticalModel {
    std::vector<Component> components;
    double omega;
};

OpticalModel optical_model(const FieldSpec& spec)
{
    return std::visit(
        Overloaded{
            [](const PlaneWave& f) {
                return OpticalModel{{{f.amplitude, {1, 0, 0}, f.wavenumber}}, f.angular_frequency};
            },
            [](const StandingWaveNormal& f) {
                // Incident towards the mirror, reflected with coefficient -1.
                return OpticalModel{{{f.amplitude, {1, 0, 0}, -f.wavenumber},
                                     {-f.amplitude, {1, 0, 0}, f.wavenumber}},
                                    f.angular_frequency};
            },
            [](const ObliqueStanding& f) {
                const double c = std::cos(f.incidence_angle);
                const double s = std::sin(f.incidence_angle);
                const double kz = f.wavenumber * c;
                if (f.polarization == Polarization::S) {
                    return OpticalModel{{{f.amplitude, {0, 1, 0}, -kz},
                                         {-f.amplitude, {0, 1, 0}, kz}},
                                        f.angular_frequency};
                }
                // In-plane polarization; tangential component cancels at z = 0.
                return OpticalModel{{{f.amplitude, {c, 0, s}, -kz}, {f.amplitude, {-c, 0, s}, kz}},
                                    f.angular_frequency};
            },
            [](const auto&) -> OpticalModel {
                throw InvalidSpecError("field has no travelling-wave decomposition");
            },
        },
        spec.variant);
}

// E(t) = u cos(wt) + v sin(wt) at a fixed position.
struct Phasor {
    Vec3 u{};
    Vec3 v{};
};

Phasor phasor(const OpticalModel& model, double z)
{
    Phasor p;
    for (const auto& c : model.components) {
        const double phase = c.slope * z;
        const double cu = c.amplitude * std::cos(phase);
        const double cv = c.amplitude * std::sin(phase);
        for (int i = 0; i < 3; ++i) {
            p.u[i] += cu * c.polarization[i];
            p.v[i] += cv * c.polarization[i];
        }
    }
    return p;
}

double sinc(double u)
{
    if (std::abs(u) < 1e-8) {
        return 1.0 - u * u / 6.0;
    }
    return std::sin(u) / u;
}

double double_slit_intensity(const DoubleSlitFarField& f, double x)
{
    const double scale = kPi * x / (f.wavelength * f.screen_distance);
    const double interference = std::cos(scale * f.slit_separation);
    const double envelope = sinc(scale * f.slit_width);
    return interference * interference * envelope * envelope;
}

double packet_spreading_time(const GaussianPacket& f)
{
    return 2.0 * f.mass * f.initial_width * f.initial_width;
}

double packet_density(const GaussianPacket& f, double x, double t)
{
    const double s = t - f.focus_time;
    const double a = s / packet_spreading_time(f);
    const double sigma2 = f.initial_width * f.initial_width * (1.0 + a * a);
    const double d = x - f.mean_wavenumber / f.mass * s;
    return std::exp(-d * d / (2.0 * sigma2)) / std::sqrt(2.0 * kPi * sigma2);
}

std::complex<double> packet_amplitude(const GaussianPacket& f, double x, double t)
{
    using namespace std::complex_literals;
    const double s = t - f.focus_time;
    const double sigma0 = f.initial_width;
    const std::complex<double> c = 1.0 + 1i * (s / packet_spreading_time(f));
    const double v = f.mean_wavenumber / f.mass;
    const double d = x - v * s;
    const std::complex<double> exponent =
        -d * d / (4.0 * sigma0 * sigma0 * c) +
        1i * (f.mean_wavenumber * x - f.mean_wavenumber * f.mean_wavenumber * s / (2.0 * f.mass));
    return std::pow(2.0 * kPi * sigma0 * sigma0, -0.25) / std::sqrt(c) * std::exp(exponent);
}

double box_energy(const BoxEigenstate& f)
{
    const double kq = f.quantum_number * kPi / f.box_length;
    return kq * kq / (2.0 * f.mass);
}

std::complex<double> box_amplitude(const BoxEigenstate& f, double x, double t)
{
    const double shape = std::sqrt(2.0 / f.box_length) *
                         std::sin(f.quantum_number * kPi * x / f.box_length);
    return shape * std::polar(1.0, -box_energy(f) * t);
}

double box_density(const BoxEigenstate& f, double x)
{
    const double s = std::sin(f.quantum_number * kPi * x / f.box_length);
    return 2.0 / f.box_length * s * s;
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void require_positive(double x, std::string_view name, std::string_view variant)
{
    if (!positive(x)) {
        throw InvalidSpecError(
            fmt::format("{}: {} must be finite and strictly positive, got {}", variant, name, x));
    }
}

// Shortest time over which a matter intensity changes appreciably; used to
// bound quadrature pieces.
double matter_variation_time(const FieldSpec& spec)
{
    return std::visit(
        Overloaded{
            [](const GaussianPacket& f) {
                double T = packet_spreading_time(f);
                const double v = std::abs(f.mean_wavenumber / f.mass);
                if (v > 0.0) {
                    T = std::min(T, f.initial_width / v);
                }
                return T;
            },
            [](const BoxEigenstate&) { return std::numeric_limits<double>::infinity(); },
            [](const Superposition& s) {
                double T = std::numeric_limits<double>::infinity();
                std::vector<double> energies;
                for (const auto& term : s.terms) {
                    T = std::min(T, matter_variation_time(term.field));
                    if (const auto* b = std::get_if<BoxEigenstate>(&term.field.variant)) {
                        energies.push_back(box_energy(*b));
                    }
                }
                for (std::size_t i = 0; i < energies.size(); ++i) {
                    for (std::size_t j = i + 1; j < energies.size(); ++j) {
                        const double gap = std::abs(energies[i] - energies[j]);
                        if (gap > 0.0) {
                            T = std::min(T, 2.0 * kPi / gap / 4.0);
                        }
                    }
                }
                return T;
            },
            [](const auto&) { return std::numeric_limits<double>::infinity(); },
        },
        spec.variant);
}

void check_position(const FieldSpec& spec, double r)
{
    const Interval d = domain(spec);
    if (!std::isfinite(r) || r < d.lo || r > d.hi) {
        throw DomainError(fmt::format("position {} outside the {} domain [{}, {}]", r,
                                      variant_name(spec), d.lo, d.hi));
    }
}

} // namespace

std::string_view variant_name(const FieldSpec& spec)
{
    return std::visit(Overloaded{
                          [](const PlaneWave&) { return std::string_view("plane_wave"); },
                          [](const StandingWaveNormal&) {
                              return std::string_view("standing_wave_normal");
                          },
                          [](const ObliqueStanding&) { return std::string_view("oblique_standing"); },
                          [](const DoubleSlitFarField&) {
                              return std::string_view("double_slit_far_field");
                          },
                          [](const GaussianPacket&) { return std::string_view("gaussian_packet"); },
                          [](const BoxEigenstate&) { return std::string_view("box_eigenstate"); },
                          [](const Superposition&) { return std::string_view("superposition"); },
                      },
                      spec.variant);
}

bool is_optical(const FieldSpec& spec)
{
    return std::holds_alternative<PlaneWave>(spec.variant) ||
           std::holds_alternative<StandingWaveNormal>(spec.variant) ||
           std::holds_alternative<ObliqueStanding>(spec.variant) ||
           std::holds_alternative<DoubleSlitFarField>(spec.variant);
}

bool is_matter(const FieldSpec& spec) { return !is_optical(spec); }

bool is_periodic(const FieldSpec& spec)
{
    return std::holds_alternative<PlaneWave>(spec.variant) ||
           std::holds_alternative<StandingWaveNormal>(spec.variant) ||
           std::holds_alternative<ObliqueStanding>(spec.variant);
}

double intensity_period(const FieldSpec& spec)
{
    if (is_periodic(spec)) {
        return kPi / optical_model(spec).omega;
    }
    if (std::holds_alternative<DoubleSlitFarField>(spec.variant) ||
        std::holds_alternative<BoxEigenstate>(spec.variant)) {
        return 0.0;
    }
    return std::numeric_limits<double>::infinity();
}

double characteristic_time(const FieldSpec& spec)
{
    if (is_periodic(spec)) {
        return intensity_period(spec);
    }
    return matter_variation_time(spec);
}

void validate(const FieldSpec& spec)
{
    std::visit(
        Overloaded{
            [](const PlaneWave& f) {
                require_positive(f.amplitude, "amplitude", "plane_wave");
                require_positive(f.wavenumber, "wavenumber", "plane_wave");
                require_positive(f.angular_frequency, "angular_frequency", "plane_wave");
            },
            [](const StandingWaveNormal& f) {
                require_positive(f.amplitude, "amplitude", "standing_wave_normal");
                require_positive(f.wavenumber, "wavenumber", "standing_wave_normal");
                require_positive(f.angular_frequency, "angular_frequency", "standing_wave_normal");
            },
            [](const ObliqueStanding& f) {
                require_positive(f.amplitude, "amplitude", "oblique_standing");
                require_positive(f.wavenumber, "wavenumber", "oblique_standing");
                require_positive(f.angular_frequency, "angular_frequency", "oblique_standing");
                if (!(f.incidence_angle > 0.0 && f.incidence_angle < kPi / 2.0)) {
                    throw InvalidSpecError(fmt::format(
                        "oblique_standing: incidence_angle must lie in (0, pi/2), got {}",
                        f.incidence_angle));
                }
            },
            [](const DoubleSlitFarField& f) {
                require_positive(f.slit_separation, "slit_separation", "double_slit_far_field");
                require_positive(f.slit_width, "slit_width", "double_slit_far_field");
                require_positive(f.wavelength, "wavelength", "double_slit_far_field");
                require_positive(f.screen_distance, "screen_distance", "double_slit_far_field");
            },
            [](const GaussianPacket& f) {
                require_positive(f.initial_width, "initial_width", "gaussian_packet");
                require_positive(f.mass, "mass", "gaussian_packet");
                if (!std::isfinite(f.mean_wavenumber) || !std::isfinite(f.focus_time)) {
                    throw InvalidSpecError(
                        "gaussian_packet: mean_wavenumber and focus_time must be finite");
                }
            },
            [](const BoxEigenstate& f) {
                if (f.quantum_number < 1) {
                    throw InvalidSpecError(fmt::format(
                        "box_eigenstate: quantum_number must be >= 1, got {}", f.quantum_number));
                }
                require_positive(f.box_length, "box_length", "box_eigenstate");
                require_positive(f.mass, "mass", "box_eigenstate");
            },
            [&spec](const Superposition& s) {
                if (s.terms.empty()) {
                    throw InvalidSpecError("superposition: needs at least one term");
                }
                for (const auto& term : s.terms) {
                    if (is_optical(term.field)) {
                        throw InvalidSpecError(fmt::format(
                            "superposition: optical field '{}' cannot be superposed with "
                            "matter fields",
                            variant_name(term.field)));
                    }
                    if (!std::isfinite(term.weight.real()) || !std::isfinite(term.weight.imag())) {
                        throw InvalidSpecError("superposition: weights must be finite");
                    }
                    validate(term.field);
                }
                const Interval d = domain(spec);
                if (!(d.lo < d.hi)) {
                    throw InvalidSpecError("superposition: component domains do not overlap");
                }
            },
        },
        spec.variant);
}

Interval domain(const FieldSpec& spec)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(Overloaded{
                          [](const StandingWaveNormal&) { return Interval{0.0, inf}; },
                          [](const ObliqueStanding&) { return Interval{0.0, inf}; },
                          [](const BoxEigenstate& f) { return Interval{0.0, f.box_length}; },
                          [](const Superposition& s) {
                              Interval d{-inf, inf};
                              for (const auto& term : s.terms) {
                                  const Interval c = domain(term.field);
                                  d.lo = std::max(d.lo, c.lo);
                                  d.hi = std::min(d.hi, c.hi);
                              }
                              return d;
                          },
                          [](const auto&) { return Interval{-inf, inf}; },
                      },
                      spec.variant);
}

std::array<double, 3> electric_field(const FieldSpec& spec, double r, double t)
{
    if (std::holds_alternative<DoubleSlitFarField>(spec.variant)) {
        throw InvalidSpecError("double_slit_far_field only defines a stationary intensity");
    }
    check_position(spec, r);
    const OpticalModel model = optical_model(spec);
    Vec3 e{};
    for (const auto& c : model.components) {
        const double a = c.amplitude * std::cos(c.slope * r - model.omega * t);
        for (int i = 0; i < 3; ++i) {
            e[i] += a * c.polarization[i];
        }
    }
    return e;
}

std::complex<double> amplitude(const FieldSpec& spec, double r, double t)
{
    if (is_optical(spec)) {
        throw InvalidSpecError(
            fmt::format("{} is an optical field; it has no complex amplitude", variant_name(spec)));
    }
    check_position(spec, r);
    return std::visit(Overloaded{
                          [&](const GaussianPacket& f) { return packet_amplitude(f, r, t); },
                          [&](const BoxEigenstate& f) { return box_amplitude(f, r, t); },
                          [&](const Superposition& s) {
                              std::complex<double> sum{};
                              for (const auto& term : s.terms) {
                                  sum += term.weight * amplitude(term.field, r, t);
                              }
                              return sum;
                          },
                          [](const auto&) -> std::complex<double> {
                              throw InvalidSpecError("not a matter field");
                          },
                      },
                      spec.variant);
}

double instantaneous_intensity(const FieldSpec& spec, double r, double t)
{
    check_position(spec, r);
    if (const auto* f = std::get_if<DoubleSlitFarField>(&spec.variant)) {
        return double_slit_intensity(*f, r);
    }
    if (const auto* f = std::get_if<GaussianPacket>(&spec.variant)) {
        return packet_density(*f, r, t);
    }
    if (const auto* f = std::get_if<BoxEigenstate>(&spec.variant)) {
        return box_density(*f, r);
    }
    if (std::holds_alternative<Superposition>(spec.variant)) {
        return std::norm(amplitude(spec, r, t));
    }
    const Vec3 e = electric_field(spec, r, t);
    return dot(e, e);
}

double mean_intensity(const FieldSpec& spec, double r, TimeWindow window)
{
    if (!(window.length() > 0.0) || !std::isfinite(window.start) || !std::isfinite(window.end)) {
        throw DomainError(fmt::format("averaging window [{}, {}] must have positive length",
                                      window.start, window.end));
    }
    check_position(spec, r);

    if (is_periodic(spec)) {
        const OpticalModel model = optical_model(spec);
        const Phasor p = phasor(model, r);
        const double uu = dot(p.u, p.u);
        const double vv = dot(p.v, p.v);
        const double uv = dot(p.u, p.v);
        // E^2 = (uu + vv)/2 + (uu - vv)/2 cos(2wt) + uv sin(2wt)
        const double w = model.omega;
        const double half_span = w * window.length();
        const double centre = w * (window.start + window.end);
        const double osc = ((uu - vv) / 2.0 * std::cos(centre) + uv * std::sin(centre)) *
                           (std::sin(half_span) / half_span);
        return std::max(0.0, (uu + vv) / 2.0 + osc);
    }
    if (const auto* f = std::get_if<DoubleSlitFarField>(&spec.variant)) {
        return double_slit_intensity(*f, r);
    }
    if (const auto* f = std::get_if<BoxEigenstate>(&spec.variant)) {
        return box_density(*f, r);
    }

    quadrature::Options opts;
    opts.rel_tol = 1e-9;
    opts.max_piece = matter_variation_time(spec);
    const auto res = quadrature::integrate(
        [&](double t) { return instantaneous_intensity(spec, r, t); }, window.start, window.end,
        opts);
    return res.value / window.length();
}

std::vector<double> transverse_profile(const FieldSpec& spec, std::span<const double> grid,
                                       TimeWindow window)
{
    if (grid.empty()) {
        throw DomainError("profile grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw DomainError("profile grid must be strictly increasing");
        }
    }
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = mean_intensity(spec, grid[i], window);
    }
    if (const auto* f = std::get_if<DoubleSlitFarField>(&spec.variant)) {
        if (grid.size() < 2) {
            throw DomainError("a normalized double-slit profile needs at least two grid points");
        }
        quadrature::Options opts;
        opts.rel_tol = 1e-12;
        opts.max_piece = f->wavelength * f->screen_distance / f->slit_separation / 2.0;
        const double total =
            quadrature::integrate([&](double x) { return double_slit_intensity(*f, x); },
                                  grid.front(), grid.back(), opts)
                .value;
        for (double& v : out) {
            v /= total;
        }
    }
    return out;
}

double fringe_spacing(const FieldSpec& spec)
{
    if (const auto* f = std::get_if<StandingWaveNormal>(&spec.variant)) {
        return kPi / f->wavenumber;
    }
    if (const auto* f = std::get_if<ObliqueStanding>(&spec.variant)) {
        if (f->polarization == Polarization::S) {
            return kPi / (f->wavenumber * std::cos(f->incidence_angle));
        }
        throw InvalidSpecError("oblique_standing with P polarization has no fringes to space");
    }
    throw InvalidSpecError(
        fmt::format("fringe spacing is undefined for {}", variant_name(spec)));
}

} // namespace wavekin::wavefield

#include "wavekin/errors.hpp"
#include "wavekin/quadrature.hpp"
#include "wavekin/wavefield.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

using namespace wavekin;
using namespace wavekin::wavefield;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Reference formulas, written out independently of the library.

double standing_oracle(double e0, double k, double w, double z, double t)
{
    const double e = 2.0 * e0 * std::sin(k * z) * std::sin(w * t);
    return e * e;
}

// Incident wave travelling towards the mirror at angle theta, reflected with
// the tangential field reversed; components along the normal x = 0.
double oblique_oracle(const ObliqueStanding& f, double z, double t)
{
    const double c = std::cos(f.incidence_angle);
    const double s = std::sin(f.incidence_angle);
    const double phi_i = -f.wavenumber * c * z - f.angular_frequency * t;
    const double phi_r = f.wavenumber * c * z - f.angular_frequency * t;
    if (f.polarization == Polarization::S) {
        const double ey = f.amplitude * (std::cos(phi_i) - std::cos(phi_r));
        return ey * ey;
    }
    const double ex = f.amplitude * c * (std::cos(phi_i) - std::cos(phi_r));
    const double ez = f.amplitude * s * (std::cos(phi_i) + std::cos(phi_r));
    return ex * ex + ez * ez;
}

double oblique_mean_oracle(const ObliqueStanding& f, double z)
{
    const double c = std::cos(f.incidence_angle);
    const double s = std::sin(f.incidence_angle);
    const double kz = f.wavenumber * c * z;
    const double e2 = f.amplitude * f.amplitude;
    if (f.polarization == Polarization::S) {
        return 2.0 * e2 * std::sin(kz) * std::sin(kz);
    }
    return 2.0 * e2 * (c * c * std::sin(kz) * std::sin(kz) + s * s * std::cos(kz) * std::cos(kz));
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

double packet_oracle(const GaussianPacket& g, double x, double t)
{
    const double s = t - g.focus_time;
    const double spread = s / (2.0 * g.mass * g.initial_width * g.initial_width);
    const double sigma2 = g.initial_width * g.initial_width * (1.0 + spread * spread);
    const double d = x - g.mean_wavenumber / g.mass * s;
    return std::exp(-d * d / (2.0 * sigma2)) / std::sqrt(2.0 * kPi * sigma2);
}

double integrate(const std::function<double(double)>& f, double a, double b)
{
    return quadrature::integrate(f, a, b, {.rel_tol = 1e-12}).value;
}

} // namespace

TEST_CASE("plane wave intensity at phase zero is the squared amplitude", "[wavefield]")
{
    const FieldSpec f = PlaneWave{3.0, 2.0, 5.0};
    CHECK(instantaneous_intensity(f, 0.0, 0.0) == 9.0);
    CHECK_THAT(mean_intensity(f, 0.7, {0.0, 2.0 * kPi / 5.0}), WithinRel(4.5, 1e-12));
}

TEST_CASE("standing wave matches the explicit superposition", "[wavefield]")
{
    const double e0 = 1.7;
    const double k = 3.0;
    const double w = 2.0;
    const FieldSpec f = StandingWaveNormal{e0, k, w};
    CHECK_THAT(instantaneous_intensity(f, kPi / (2.0 * k), kPi / (2.0 * w)),
               WithinRel(4.0 * e0 * e0, 1e-14));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double z = u(rng);
        const double t = u(rng);
        CHECK_THAT(instantaneous_intensity(f, z, t),
                   WithinAbs(standing_oracle(e0, k, w, z, t), 1e-12));
    }
}

TEST_CASE("standing wave has a node at the mirror at all times", "[wavefield]")
{
    const FieldSpec f = StandingWaveNormal{2.0, 4.0 * kPi, 4.0 * kPi};
    for (double t = 0.0; t < 3.0; t += 0.0137) {
        CHECK(instantaneous_intensity(f, 0.0, t) == 0.0);
    }
}

TEST_CASE("oblique standing waves match the two-beam construction", "[wavefield]")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (auto pol : {Polarization::S, Polarization::P}) {
        for (double theta : {0.3, kPi / 4.0, 1.2}) {
            const ObliqueStanding o{1.3, 2.0 * kPi, 2.0 * kPi, theta, pol};
            const FieldSpec f = o;
            for (int i = 0; i < 50; ++i) {
                const double z = u(rng);
                const double t = u(rng);
                CHECK_THAT(instantaneous_intensity(f, z, t),
                           WithinAbs(oblique_oracle(o, z, t), 1e-12));
                CHECK_THAT(mean_intensity(f, z, {t, t + kPi / o.angular_frequency}),
                           WithinAbs(oblique_mean_oracle(o, z), 1e-12));
            }
        }
    }
}

TEST_CASE("p polarization is uniform at 45 degrees only", "[wavefield]")
{
    const auto spread = [](double theta) {
        const FieldSpec f = ObliqueStanding{1.0, 2.0 * kPi, 2.0 * kPi, theta, Polarization::P};
        const auto grid = linspace(0.0, 3.0, 601);
        const auto prof = transverse_profile(f, grid, {0.0, 0.5});
        const auto [lo, hi] = std::minmax_element(prof.begin(), prof.end());
        double mean = 0.0;
        for (double v : prof) {
            mean += v;
        }
        mean /= static_cast<double>(prof.size());
        return (*hi - *lo) / mean;
    };
    CHECK(spread(kPi / 4.0) <= 1e-12);
    CHECK(spread(kPi / 6.0) > 0.1);
}

TEST_CASE("fringe spacing is half the projected wavelength", "[wavefield]")
{
    const double k = 2.0 * kPi;  // wavelength 1
    CHECK_THAT(fringe_spacing(StandingWaveNormal{1.0, k, k}), WithinRel(0.5, 1e-14));
    CHECK_THAT(fringe_spacing(ObliqueStanding{1.0, k, k, kPi / 4.0, Polarization::S}),
               WithinRel(1.0 / (2.0 * std::cos(kPi / 4.0)), 1e-14));
}

TEST_CASE("analytic time averages agree with quadrature", "[wavefield]")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double e0 = u(rng);
        const double k = u(rng);
        const double w = u(rng);
        const double theta = 0.05 + 0.45 * u(rng);
        const double z = u(rng);
        const double t0 = u(rng);
        const double t1 = t0 + 2.0 * u(rng);
        FieldSpec f;
        switch (i % 4) {
        case 0: f = PlaneWave{e0, k, w}; break;
        case 1: f = StandingWaveNormal{e0, k, w}; break;
        case 2: f = ObliqueStanding{e0, k, w, theta, Polarization::S}; break;
        default: f = ObliqueStanding{e0, k, w, theta, Polarization::P}; break;
        }
        const double exact =
            integrate([&](double t) { return instantaneous_intensity(f, z, t); }, t0, t1) /
            (t1 - t0);
        CHECK_THAT(mean_intensity(f, z, {t0, t1}), WithinRel(exact, 1e-8));
    }
}

TEST_CASE("double slit follows the Fraunhofer two-slit law", "[wavefield]")
{
    const DoubleSlitFarField d{1.0, 0.2, 0.5, 2.0};
    const FieldSpec f = d;
    for (double x = -3.0; x <= 3.0; x += 0.173) {
        const double u = kPi * x / (d.wavelength * d.screen_distance);
        const double c = std::cos(u * d.slit_separation);
        const double s = sinc(u * d.slit_width);
        CHECK_THAT(instantaneous_intensity(f, x, 1.3), WithinAbs(c * c * s * s, 1e-14));
    }
    CHECK(instantaneous_intensity(f, 0.0, 0.0) == 1.0);
}

TEST_CASE("normalized double slit profile integrates to one", "[wavefield]")
{
    const FieldSpec f = DoubleSlitFarField{1.0, 0.2, 1.0, 1.0};
    const auto grid = linspace(-5.0, 5.0, 2001);
    const auto prof = transverse_profile(f, grid, {0.0, 1.0});
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        sum += 0.5 * (prof[i] + prof[i + 1]) * (grid[i + 1] - grid[i]);
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-5));
}

TEST_CASE("Gaussian packet peak and free spreading", "[wavefield]")
{
    const GaussianPacket g{0.8, 1.5, 2.0, 0.0};
    const FieldSpec f = g;
    CHECK_THAT(instantaneous_intensity(f, 0.0, 0.0),
               WithinRel(1.0 / std::sqrt(2.0 * kPi * 0.64), 1e-14));

    const double t_spread = 2.0 * g.mass * g.initial_width * g.initial_width;
    const double t_drift = g.initial_width * g.mass / g.mean_wavenumber;
    CHECK_THAT(characteristic_time(f), WithinRel(std::min(t_spread, t_drift), 1e-14));
    CHECK_THAT(characteristic_time(GaussianPacket{0.8, 0.0, 2.0, 0.0}), WithinRel(t_spread, 1e-14));
    double invariant = 0.0;
    for (double t = 0.0; t <= 20.0; t += 0.5) {
        const double sigma = g.initial_width * std::sqrt(1.0 + (t / t_spread) * (t / t_spread));
        const double centre = g.mean_wavenumber / g.mass * t;
        const double v = instantaneous_intensity(f, centre, t) * sigma;
        if (t == 0.0) {
            invariant = v;
        }
        CHECK_THAT(v, WithinRel(invariant, 1e-10));
        for (double x : {-2.0, -0.3, 0.0, 1.1, 4.0}) {
            CHECK_THAT(instantaneous_intensity(f, centre + x, t),
                       WithinAbs(packet_oracle(g, centre + x, t), 1e-13));
        }
    }
}

TEST_CASE("focused packet narrows before the focus time", "[wavefield]")
{
    const GaussianPacket g{1.0, 0.0, 5.0, 30.0};
    const FieldSpec f = g;
    CHECK(instantaneous_intensity(f, 0.0, 0.0) < instantaneous_intensity(f, 0.0, 15.0));
    CHECK(instantaneous_intensity(f, 0.0, 15.0) < instantaneous_intensity(f, 0.0, 30.0));
    CHECK_THAT(instantaneous_intensity(f, 0.2, 7.0), WithinAbs(packet_oracle(g, 0.2, 7.0), 1e-14));
}

TEST_CASE("matter densities are normalized", "[wavefield]")
{
    const FieldSpec packet = GaussianPacket{1.0, 0.7, 3.0, 0.0};
    for (double t : {0.0, 4.0, 25.0}) {
        const double n = integrate(
            [&](double x) { return instantaneous_intensity(packet, x, t); }, -200.0, 200.0);
        CHECK_THAT(n, WithinAbs(1.0, 1e-9));
    }
    for (int q : {1, 2, 5}) {
        const FieldSpec box = BoxEigenstate{q, 2.5, 1.0};
        const double n =
            integrate([&](double x) { return instantaneous_intensity(box, x, 0.3); }, 0.0, 2.5);
        CHECK_THAT(n, WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("box eigenstate density is stationary", "[wavefield]")
{
    const FieldSpec box = BoxEigenstate{1, 2.0, 1.0};
    CHECK_THAT(instantaneous_intensity(box, 1.0, 0.0), WithinRel(1.0, 1e-14));  // 2 / L
    for (double t : {0.0, 0.7, 13.0}) {
        for (double x : {0.1, 0.6, 1.9}) {
            const double s = std::sin(kPi * x / 2.0);
            CHECK_THAT(instantaneous_intensity(box, x, t), WithinAbs(s * s, 1e-14));
        }
    }
    CHECK(std::isinf(characteristic_time(box)));
}

TEST_CASE("superposition of box states beats at the level spacing", "[wavefield]")
{
    const double l = 1.0;
    const double m = 1.0;
    const double w = 1.0 / std::sqrt(2.0);
    Superposition sup;
    sup.terms.push_back({{w, 0.0}, BoxEigenstate{1, l, m}});
    sup.terms.push_back({{w, 0.0}, BoxEigenstate{2, l, m}});
    const FieldSpec f = sup;
    const double e1 = kPi * kPi / (2.0 * m * l * l);
    const double e2 = 4.0 * e1;
    for (double t : {0.0, 0.1, 0.37}) {
        for (double x : {0.2, 0.5, 0.8}) {
            const std::complex<double> psi =
                w * std::sqrt(2.0 / l) *
                (std::sin(kPi * x / l) * std::exp(std::complex<double>(0.0, -e1 * t)) +
                 std::sin(2.0 * kPi * x / l) * std::exp(std::complex<double>(0.0, -e2 * t)));
            CHECK_THAT(instantaneous_intensity(f, x, t), WithinAbs(std::norm(psi), 1e-13));
        }
    }
    const double beat = 2.0 * kPi / (e2 - e1);
    CHECK_THAT(instantaneous_intensity(f, 0.3, beat), WithinAbs(instantaneous_intensity(f, 0.3, 0.0), 1e-12));
}

TEST_CASE("intensity is never negative", "[wavefield]")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    const std::vector<FieldSpec> fields = {
        PlaneWave{1.0, 1.0, 1.0},
        StandingWaveNormal{1.0, 2.0, 2.0},
        ObliqueStanding{1.0, 2.0, 2.0, 0.4, Polarization::P},
        DoubleSlitFarField{},
        GaussianPacket{1.0, 1.0, 1.0, 0.0},
        BoxEigenstate{3, 5.0, 1.0},
    };
    for (const auto& f : fields) {
        for (int i = 0; i < 500; ++i) {
            CHECK(instantaneous_intensity(f, u(rng), u(rng)) >= 0.0);
        }
    }
}

TEST_CASE("invalid parameters are rejected", "[wavefield]")
{
    CHECK_THROWS_AS(validate(PlaneWave{-1.0, 1.0, 1.0}), InvalidSpecError);
    CHECK_THROWS_AS(validate(StandingWaveNormal{1.0, 0.0, 1.0}), InvalidSpecError);
    CHECK_THROWS_AS(validate(ObliqueStanding{1.0, 1.0, 1.0, kPi / 2.0, Polarization::S}),
                    InvalidSpecError);
    CHECK_THROWS_AS(validate(ObliqueStanding{1.0, 1.0, 1.0, 0.0, Polarization::S}),
                    InvalidSpecError);
    CHECK_THROWS_AS(validate(BoxEigenstate{0, 1.0, 1.0}), InvalidSpecError);
    CHECK_THROWS_AS(validate(GaussianPacket{0.0, 0.0, 1.0, 0.0}), InvalidSpecError);
    CHECK_THROWS_AS(validate(DoubleSlitFarField{1.0, -0.2, 1.0, 1.0}), InvalidSpecError);
    Superposition optical;
    optical.terms.push_back({{1.0, 0.0}, PlaneWave{}});
    CHECK_THROWS_AS(validate(optical), InvalidSpecError);
    CHECK_THROWS_AS(instantaneous_intensity(BoxEigenstate{1, 1.0, 1.0}, 1.5, 0.0), DomainError);
    CHECK_THROWS(mean_intensity(PlaneWave{}, 0.0, {1.0, 1.0}));
}

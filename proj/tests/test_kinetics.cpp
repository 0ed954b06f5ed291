#include "wavekin/errors.hpp"
#include "wavekin/estimators.hpp"
#include "wavekin/kinetics.hpp"

#include <catch_amalgamated.hpp>

#include <cfloat>
#include <cmath>
#include <complex>
#include <random>

using namespace wavekin;
using namespace wavekin::kinetics;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// I(t) = c + sum_j a_j cos(w_j t + phi_j), solved in closed form from p(0) = 0.
struct Trig {
    double c = 0.0;
    std::vector<double> a, w, phi;

    double operator()(double t) const
    {
        double v = c;
        for (std::size_t j = 0; j < a.size(); ++j) {
            v += a[j] * std::cos(w[j] * t + phi[j]);
        }
        return v;
    }

    double solution(double g, double tau, double t) const
    {
        using C = std::complex<double>;
        const double decay = std::exp(-t / tau);
        double p = g * tau * c * (1.0 - decay);
        for (std::size_t j = 0; j < a.size(); ++j) {
            const C num = std::exp(C(0.0, phi[j])) * (std::exp(C(0.0, w[j] * t)) - decay);
            p += g * a[j] * (num / C(1.0 / tau, w[j])).real();
        }
        return p;
    }
};

Trig random_trig(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Trig f;
    const int terms = 1 + static_cast<int>(3.0 * u(rng));
    f.c = 1.0 + 2.0 * u(rng);
    for (int j = 0; j < terms; ++j) {
        f.a.push_back(f.c / terms * u(rng));  // keeps I >= 0
        f.w.push_back(0.05 + 5.0 * u(rng));
        f.phi.push_back(2.0 * kPi * u(rng));
    }
    return f;
}

Intensity trig_intensity(const Trig& f, double spatial_slope)
{
    Intensity i;
    i.at = [f, spatial_slope](double t, double r) { return f(t) * (1.0 + spatial_slope * r); };
    double fastest = 0.0;
    for (double w : f.w) {
        fastest = std::max(fastest, w);
    }
    i.variation_time = 1.0 / fastest;
    return i;
}

// Piecewise exponential relaxation through a square wave that starts high.
double square_oracle(double g, double tau, double low, double high, double h, double t)
{
    double p = 0.0;
    double t0 = 0.0;
    bool is_high = true;
    while (t0 < t) {
        const double t1 = std::min(t0 + h, t);
        const double target = g * tau * (is_high ? high : low);
        p = target + (p - target) * std::exp(-(t1 - t0) / tau);
        t0 = t1;
        is_high = !is_high;
    }
    return p;
}

} // namespace

TEST_CASE("calibration identities hold exactly", "[kinetics]")
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (int i = 0; i < 500; ++i) {
        const double omega = std::exp(u(rng));
        const double x = std::exp(u(rng));
        const auto m = KineticParams::from_tau(Mode::Matter, omega, x);
        CHECK(m.gamma() * (m.tau() * m.omega()) == 1.0);
        CHECK(std::abs(m.tau() - x) <= 64.0 * DBL_EPSILON * x);
        CHECK(m.beta() == m.omega());
        const auto p = KineticParams::from_tau(Mode::Photon, omega, x);
        CHECK((4.0 * kPi * p.gamma()) * (p.tau() * p.omega()) == 1.0);
        CHECK(std::abs(p.tau() - x) <= 64.0 * DBL_EPSILON * x);
        const auto mg = KineticParams::from_gamma(Mode::Matter, omega, x);
        CHECK(mg.gamma() * (mg.tau() * mg.omega()) == 1.0);
        const auto pg = KineticParams::from_gamma(Mode::Photon, omega, x);
        CHECK(pg.calibration_product() == 1.0);
    }
}

TEST_CASE("calibration examples", "[kinetics]")
{
    const auto photon = KineticParams::from_tau(Mode::Photon, 1.0, 1.0);
    CHECK_THAT(photon.gamma(), WithinRel(1.0 / (4.0 * kPi), 1e-15));
    CHECK_THAT(photon.gamma(), WithinAbs(0.0795775, 1e-7));

    const auto matter = KineticParams::from_gamma(Mode::Matter, 2.0, 0.1);
    CHECK_THAT(matter.tau(), WithinRel(5.0, 1e-15));
    CHECK(matter.beta() == 2.0);

    CHECK_THROWS_AS(KineticParams::calibrate(Mode::Matter, 2.0, 3.0, 0.1), InvalidSpecError);
    CHECK_NOTHROW(KineticParams::calibrate(Mode::Matter, 2.0, 5.0, 0.1));
    CHECK_THROWS_AS(KineticParams::calibrate(Mode::Matter, 2.0, std::nullopt, std::nullopt),
                    InvalidSpecError);
    CHECK_THROWS_AS(KineticParams::from_tau(Mode::Matter, 0.0, 1.0), InvalidSpecError);
    CHECK_THROWS_AS(KineticParams::from_tau(Mode::Matter, 1.0, -1.0), InvalidSpecError);
    CHECK_THROWS_AS(KineticParams::restore(Mode::Matter, 2.0, 0.1, 3.0), InvalidSpecError);
    CHECK(KineticParams::restore(Mode::Photon, 1.0, photon.gamma(), 1.0) == photon);
}

TEST_CASE("gains per mode", "[kinetics]")
{
    const auto photon = KineticParams::from_tau(Mode::Photon, 3.0, 2.0);
    CHECK(photon.birth_gain() == photon.gamma());
    const auto matter = KineticParams::from_tau(Mode::Matter, 3.0, 2.0);
    CHECK_THAT(matter.birth_gain(), WithinRel(0.5, 1e-15));
    CHECK_THAT(matter.equilibrium_gain(), WithinRel(1.0, 1e-15));
    CHECK_THAT(photon.equilibrium_gain(), WithinRel(1.0 / (4.0 * kPi * 3.0), 1e-15));
}

TEST_CASE("integrator matches the analytic solution for trigonometric drives", "[kinetics]")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Trig f = random_trig(rng);
        const Mode mode = trial % 2 == 0 ? Mode::Matter : Mode::Photon;
        const double tau = 0.2 + 2.0 * u(rng);
        const auto params = KineticParams::from_tau(mode, 1.0 + u(rng), tau);
        const Intensity in = trig_intensity(f, 0.5);
        const std::vector<double> grid = {0.0, 1.0};
        const std::vector<double> p0(grid.size(), 0.0);
        const double t_end = 10.0 * tau;
        const auto s = integrate_kinetics(params, in, p0, grid, t_end, tau / 200.0);
        const double g = params.birth_gain();
        for (std::size_t ti = 1; ti < s.rows(); ti += s.rows() / 10) {
            const double t = s.times[ti];
            for (std::size_t ri = 0; ri < grid.size(); ++ri) {
                const double exact = f.solution(g, tau, t) * (1.0 + 0.5 * grid[ri]);
                CHECK_THAT(s.at(ti, ri), WithinRel(exact, 1e-8));
                CHECK_THAT(closed_form_density(params, in, t, grid[ri]), WithinRel(exact, 1e-9));
            }
        }
    }
}

TEST_CASE("integrator follows square waves exactly at the jumps", "[kinetics]")
{
    const auto params = KineticParams::from_tau(Mode::Matter, 1.0, 1.0);
    const double h = 0.7;
    const Intensity in = square_wave_intensity(0.5, 2.0, h);
    const std::vector<double> grid = {0.0};
    const std::vector<double> p0 = {0.0};
    const auto s = integrate_kinetics(params, in, p0, grid, 7.0, 0.01);
    for (std::size_t ti = 0; ti < s.rows(); ++ti) {
        CHECK_THAT(s.at(ti, 0), WithinAbs(square_oracle(1.0, 1.0, 0.5, 2.0, h, s.times[ti]), 1e-9));
    }
    CHECK(s.times.back() == 7.0);
}

TEST_CASE("averaging identity holds for p(0) = 0", "[kinetics]")
{
    const auto params = KineticParams::from_tau(Mode::Matter, 1.0, 1.0);
    const std::vector<double> grid = {0.0, 0.5};
    const std::vector<double> p0(grid.size(), 0.0);
    const std::vector<Intensity> drives = {constant_intensity(2.0),
                                           sinusoidal_intensity(1.0, 0.8, 3.0, 0.4),
                                           square_wave_intensity(0.0, 1.0, 1.0)};
    for (const auto& in : drives) {
        const auto s = integrate_kinetics(params, in, p0, grid, 20.0, 1.0 / 400.0,
                                          {.record_every = 400});
        for (double t : {1.0, 5.0, 12.0, 20.0}) {
            CHECK(time_average_identity_residual(s, in, params, t) <= 1e-9);
        }
    }
}

TEST_CASE("averaging identity requires p(0) = 0", "[kinetics]")
{
    const auto params = KineticParams::from_tau(Mode::Matter, 1.0, 1.0);
    const std::vector<double> grid = {0.0};
    const std::vector<double> p0 = {1.0};
    const auto in = constant_intensity(1.0);
    const auto s = integrate_kinetics(params, in, p0, grid, 2.0, 0.01);
    CHECK_THROWS_AS(time_average_identity_residual(s, in, params, 2.0), PreconditionError);
}

TEST_CASE("results do not depend on the thread count", "[kinetics]")
{
    const auto params = KineticParams::from_tau(Mode::Matter, 1.0, 0.5);
    const Intensity in = field_intensity(wavefield::GaussianPacket{1.0, 0.3, 2.0, 3.0});
    const auto grid = linspace(-10.0, 10.0, 203);
    const std::vector<double> p0(grid.size(), 0.0);
    const auto one = integrate_kinetics(params, in, p0, grid, 5.0, 0.02, {.record_every = 5});
    for (unsigned threads : {2u, 3u, 8u}) {
        const auto many = integrate_kinetics(params, in, p0, grid, 5.0, 0.02,
                                             {.record_every = 5, .threads = threads});
        CHECK(many.values == one.values);
        CHECK(many.cumulative == one.cumulative);
        CHECK(many.times == one.times);
    }
}

TEST_CASE("density stays non-negative", "[kinetics]")
{
    const auto params = KineticParams::from_tau(Mode::Photon, 2.0 * kPi, 1.0);
    const Intensity in = field_intensity(wavefield::StandingWaveNormal{1.0, 2.0 * kPi, 2.0 * kPi});
    const auto grid = linspace(0.0, 1.0, 41);
    const std::vector<double> p0(grid.size(), 0.0);
    const auto s = integrate_kinetics(params, in, p0, grid, 5.0, 0.01);
    for (double v : s.values) {
        CHECK(v >= 0.0);
    }
}

TEST_CASE("photon and matter densities differ by the gain ratio", "[kinetics]")
{
    const double omega = 3.0;
    const double tau = 0.8;
    const auto photon = KineticParams::from_tau(Mode::Photon, omega, tau);
    const auto matter = KineticParams::from_tau(Mode::Matter, omega, tau);
    const auto in = sinusoidal_intensity(1.0, 0.5, 2.0);
    const std::vector<double> grid = {0.0};
    const std::vector<double> p0 = {0.0};
    const auto a = integrate_kinetics(photon, in, p0, grid, 4.0, 0.01);
    const auto b = integrate_kinetics(matter, in, p0, grid, 4.0, 0.01);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        CHECK_THAT(a.at(i, 0) * 4.0 * kPi * omega, WithinRel(b.at(i, 0), 1e-12));
    }
}

TEST_CASE("integrator input errors", "[kinetics]")
{
    const auto params = KineticParams::from_tau(Mode::Matter, 1.0, 1.0);
    const auto in = constant_intensity(1.0);
    const std::vector<double> grid = {0.0};
    CHECK_THROWS_AS(integrate_kinetics(params, in, std::vector<double>{0.0}, grid, 1.0, 0.051),
                    StepSizeError);
    CHECK_THROWS_AS(integrate_kinetics(params, in, std::vector<double>{-1.0}, grid, 1.0, 0.01),
                    DomainError);
}

TEST_CASE("Born limit of stationary fields", "[kinetics]")
{
    const auto params = KineticParams::from_tau(Mode::Matter, 1.0, 1.0);
    const wavefield::FieldSpec box = wavefield::BoxEigenstate{1, 2.0, 1.0};
    CHECK_THAT(born_limit_density(params, box, 1.0, 0.0), WithinRel(1.0, 1e-14));
    const Intensity in = field_intensity(box);
    for (double r : {0.2, 1.0, 1.7}) {
        CHECK_THAT(closed_form_density(params, in, 30.0, r),
                   WithinRel(born_limit_density(params, box, r, 30.0), 1e-6));
    }
}

TEST_CASE("slowly spreading packet is tracked to first order", "[kinetics]")
{
    const double tau = 1.0;
    const double t_spread = 100.0;
    const auto params = KineticParams::from_tau(Mode::Matter, 1.0, tau);
    // 2 m sigma0^2 = T with sigma0 = 1.
    const wavefield::FieldSpec packet = wavefield::GaussianPacket{1.0, 0.0, t_spread / 2.0, 0.0};
    const Intensity in = field_intensity(packet);
    const auto grid = linspace(-20.0, 20.0, 161);
    std::vector<double> p0;
    for (double r : grid) {
        p0.push_back(born_limit_density(params, packet, r, 0.0));
    }
    const auto s = integrate_kinetics(params, in, p0, grid, 500.0, 0.05, {.record_every = 20});
    const double gap = estimators::born_deviation(s, scaled(in, params.equilibrium_gain()), {});
    CHECK(gap <= 3.0 * tau / t_spread);
    CHECK(gap > 0.0);
}

TEST_CASE("critical scale", "[kinetics]")
{
    CHECK_THAT(critical_scale(2.0, 2.0), WithinRel(1.0, 1e-15));
    CHECK_THAT(critical_scale(1.0, 8.0), WithinRel(2.0, 1e-15));
    CHECK_THAT(critical_scale(1.0, 1.0, 27.0), WithinRel(3.0, 1e-15));
    CHECK_THROWS_AS(critical_scale(0.0, 1.0), DomainError);
}

TEST_CASE("running mean and sample lookup", "[kinetics]")
{
    const auto params = KineticParams::from_tau(Mode::Matter, 1.0, 1.0);
    const auto in = constant_intensity(1.0);
    const std::vector<double> grid = {0.0};
    const std::vector<double> p0 = {0.0};
    const auto s = integrate_kinetics(params, in, p0, grid, 3.0, 0.01, {.record_every = 10});
    const auto i = s.find_time(2.0);
    REQUIRE(i.has_value());
    // (1/t) * integral of (1 - e^-s) over [0, t]
    const double exact = 1.0 - (1.0 - std::exp(-2.0)) / 2.0;
    CHECK_THAT(s.running_mean(*i, 0), WithinRel(exact, 1e-9));
    CHECK_FALSE(s.find_time(2.005).has_value());
}

#include "doctest.h"

#include <cmath>

#include "thz/analysis.hpp"
#include "thz/multipath.hpp"

using namespace thz;

TEST_SUITE("analysis") {

TEST_CASE("pure delay: constant group delay, zero GDD") {
    const auto grid = make_grid(100.0, 120.0, 0.01);
    const auto prof = phase_profile(delay_channel(grid, 100.0));
    for (std::size_t i = 0; i < grid.n; i += 101) {
        CHECK(!prof.amplitude_floor_mask[i]);
        CHECK(prof.group_delay_ps[i] == doctest::Approx(100.0).epsilon(1e-9));
        CHECK(std::abs(prof.gdd_ps2[i]) < 1e-4);  // second-difference rounding noise
    }
}

TEST_CASE("quadratic phase: constant GDD equal to the curvature constant") {
    const auto grid = make_grid(375.0, 385.0, 0.01);
    const auto prof = phase_profile(quadratic_phase_channel(grid, 380.0, 2533.0));
    for (std::size_t i = 1; i + 1 < grid.n; i += 53)
        CHECK(prof.gdd_ps2[i] == doctest::Approx(2533.0).epsilon(1e-6));
}

TEST_CASE("grid too short") {
    const auto grid = make_grid(100.0, 100.03, 0.01);
    CHECK_THROWS_AS(phase_profile(identity_channel(grid)), ValidationError);
}

TEST_CASE("two-path GDD matches the closed-form derivative oracle") {
    const double a = 0.9, dtau_ps = 50.0;
    PathSet paths{{Path{0.0, cplx{1.0, 0.0}, "p0"}, Path{dtau_ps, cplx{a, 0.0}, "p1"}}};
    const auto grid = make_grid(100.0, 140.0, 0.01);
    const auto prof = phase_profile(multipath_transfer(paths, grid));

    // oracle: d2/dw2 arg(1 + a e^{-j w dtau}) = dtau^2 a (1-a^2) sin(th) / D^2
    const double dtau = dtau_ps * 1e-12;
    int checked = 0;
    for (std::size_t i = 100; i + 100 < grid.n && checked < 10; i += 151) {
        const double th = 2.0 * M_PI * grid.freq_ghz(i) * 1e9 * dtau;
        const double th_mod = th - 2.0 * M_PI * std::floor(th / (2.0 * M_PI));
        if (std::abs(th_mod - M_PI) < 0.6) continue;  // keep away from the fade null
        const double den = 1.0 + 2.0 * a * std::cos(th) + a * a;
        // d2 arg(1 + a e^{-j th})/dth2 = a (1-a^2) sin(th)/den^2; GDD negates it
        const double oracle_ps2 =
            -dtau * dtau * a * (1.0 - a * a) * std::sin(th) / (den * den) * 1e24;
        CHECK(prof.gdd_ps2[i] == doctest::Approx(oracle_ps2).epsilon(2e-3));
        ++checked;
    }
    CHECK(checked == 10);

    // GDD alternates sign between adjacent fade nulls
    const double null1 = 1.0 / (2.0 * dtau) / 1e9;   // 10 GHz
    const double mid_lo = null1 * 10.5, mid_hi = null1 * 11.5;  // inside [105,115] GHz
    CHECK(prof.gdd_ps2[grid.nearest(mid_lo)] * prof.gdd_ps2[grid.nearest(mid_hi)] < 0.0);
}

TEST_CASE("exact null is masked, neighbors stay finite") {
    PathSet paths{{Path{0.0, cplx{1.0, 0.0}, ""}, Path{50.0, cplx{1.0, 0.0}, ""}}};
    const auto grid = make_grid(5.0, 15.0, 0.01);  // null at exactly 10 GHz
    const auto ch = multipath_transfer(paths, grid);
    const auto prof = phase_profile(ch);
    CHECK(prof.amplitude_floor_mask[grid.nearest(10.0)]);
    const std::size_t off = grid.nearest(10.1);
    CHECK(!prof.amplitude_floor_mask[off]);
    CHECK(std::isfinite(prof.gdd_ps2[off]));
}

TEST_CASE("unwrap recovers large synthetic excursions up to a 2 pi offset") {
    // grid fine enough that per-bin phase steps stay below pi
    const auto grid = make_grid(200.0, 220.0, 0.002);
    const double w0 = grid.omega(grid.n / 2);
    const double span = grid.omega(grid.n - 1) - grid.omega(0);
    std::vector<double> truth(grid.n);
    ChannelResponse ch = identity_channel(grid);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = (grid.omega(i) - w0) / span;
        truth[i] = 1e4 * (x * x * x) + 7000.0 * x + 1.0;  // ~1e4 rad excursion
        ch.h[i] = std::polar(1.0, truth[i]);
    }
    const auto prof = phase_profile(ch);
    const double offset = prof.phase_unwrapped_rad[0] - truth[0];
    CHECK(std::abs(offset / (2.0 * M_PI) - std::round(offset / (2.0 * M_PI))) < 1e-9);
    for (std::size_t i = 0; i < grid.n; i += 211)
        CHECK(prof.phase_unwrapped_rad[i] - truth[i] == doctest::Approx(offset).epsilon(1e-12));
}

TEST_CASE("second derivative of a sampled cubic is exact at interior points") {
    const auto grid = make_grid(100.0, 101.0, 0.001);
    const double w0 = grid.omega(grid.n / 2);
    ChannelResponse ch = identity_channel(grid);
    const double c3 = 1e-30;  // cubic coefficient in s^3
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double dw = grid.omega(i) - w0;
        ch.h[i] = std::polar(1.0, -c3 * dw * dw * dw);  // propagation phase lag
    }
    const auto prof = phase_profile(ch);
    for (std::size_t i = 5; i + 5 < grid.n; i += 97) {
        const double dw = grid.omega(i) - w0;
        const double analytic_ps2 = 6.0 * c3 * dw * 1e24;
        if (std::abs(analytic_ps2) < 1e-3) continue;
        CHECK(prof.gdd_ps2[i] == doctest::Approx(analytic_ps2).epsilon(1e-4));
    }
}

TEST_CASE("integrated GDD metric identity and linearity") {
    const auto grid = make_grid(375.0, 385.0, 0.01);
    const auto prof = phase_profile(quadratic_phase_channel(grid, 380.0, 2533.0));
    // 2 pi x 9 GHz x 2533 ps^2 = 143 ps
    const double m9 = integrated_gdd_metric_ps(prof, 380.0 - 4.5, 380.0 + 4.5);
    CHECK(m9 == doctest::Approx(143.2377).epsilon(0.01));
    const double m45 = integrated_gdd_metric_ps(prof, 380.0 - 2.25, 380.0 + 2.25);
    CHECK(m45 == doctest::Approx(m9 / 2.0).epsilon(1e-6));

    const auto zero = phase_profile(delay_channel(grid, 25.0));
    CHECK(integrated_gdd_metric_ps(zero, 376.0, 384.0) < 1e-4);

    CHECK_THROWS_AS(integrated_gdd_metric_ps(prof, 384.0, 376.0), ValidationError);
    CHECK_THROWS_AS(integrated_gdd_metric_ps(prof, 370.0, 390.0), ValidationError);
}

TEST_CASE("required mean GDD follows the inverse-square bandwidth law") {
    for (double b : {1e9, 5e9, 2e10, 3.33e11}) {
        CHECK(required_mean_abs_gdd_s2(2.0 * b) ==
              doctest::Approx(required_mean_abs_gdd_s2(b) / 4.0).epsilon(1e-14));
        // metric at the required GDD equals the symbol duration
        CHECK(2.0 * M_PI * b * required_mean_abs_gdd_s2(b) == doctest::Approx(1.0 / b).epsilon(1e-14));
    }
}

TEST_CASE("coherence time values and scaling") {
    CHECK(coherence_time_s(28.0, 108.0) == doctest::Approx(1.784479e-4).epsilon(1e-5));
    CHECK(coherence_time_s(250.0, 325.0) == doctest::Approx(6.641556e-6).epsilon(1e-5));
    // paper-rounded values within 1%
    CHECK(std::abs(coherence_time_s(28.0, 108.0) - 0.18e-3) / 0.18e-3 < 0.01);
    CHECK(std::abs(coherence_time_s(250.0, 325.0) - 6.65e-6) / 6.65e-6 < 0.01);
    CHECK(coherence_time_s(56.0, 108.0) == doctest::Approx(coherence_time_s(28.0, 108.0) / 2.0));
    CHECK_THROWS_AS(coherence_time_s(-1.0, 10.0), ValidationError);
    CHECK_THROWS_AS(coherence_time_s(10.0, 0.0), ValidationError);
}

TEST_CASE("PAPR: constant envelope, impulse, and error cases") {
    Waveform cw;
    cw.sample_rate_gsps = 10.0;
    cw.carrier_ghz = 100.0;
    cw.samples_per_symbol = 2;
    for (int i = 0; i < 256; ++i)
        cw.samples.push_back(std::polar(1.0, 0.1 * i));
    CHECK(papr_db(cw) == doctest::Approx(0.0).epsilon(1e-12));

    Waveform impulse = cw;
    impulse.samples.assign(256, cplx{0.0, 0.0});
    impulse.samples[17] = cplx{2.0, 0.0};
    CHECK(papr_db(impulse) == doctest::Approx(10.0 * std::log10(256.0)));

    Waveform zero = cw;
    zero.samples.assign(16, cplx{0.0, 0.0});
    CHECK_THROWS_AS(papr_db(zero), ValidationError);
    Waveform empty;
    CHECK_THROWS_AS(papr_db(empty), ValidationError);
}

}  // TEST_SUITE

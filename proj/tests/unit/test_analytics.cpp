#include <catch_amalgamated.hpp>

#include "wpt/analytics.hpp"
#include "wpt/design.hpp"
#include "wpt/error.hpp"
#include "wpt/simulator.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace wpt;
using namespace wpt::analytics;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ReceiverParams designed_at(double k) {
    ReceiverParams p = prototype_params();
    p.k = k;
    const auto split = design::split_capacitance(design::resonant_capacitance(p.l, k, p.fs));
    p.c_ac = split.c_ac;
    p.c_f = split.c_f;
    return p;
}

std::vector<double> sampled(double (*f)(double), std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = f(static_cast<double>(i) / static_cast<double>(n));
    }
    return xs;
}

} // namespace

TEST_CASE("closed-form capacitor voltages", "[analytics][oracle]") {
    const ReceiverParams p = designed_at(0.71);
    const double ts = p.period();
    const AnalyticWaveforms quarter = analytic_waveforms(p, 0.25 * ts);
    CHECK(quarter.v_c1 == Approx(vm(p) + (1 - p.k) * p.v_o_ref));
    CHECK(quarter.v_c2 == 0.0);
    for (double frac : {0.5, 0.6, 0.8, 0.99}) {
        CHECK(analytic_waveforms(p, frac * ts).v_c1 == 0.0);
    }
    // Mirror: v_c2 a half period later equals v_c1.
    for (double frac : {0.05, 0.2, 0.4}) {
        const auto a = analytic_waveforms(p, frac * ts);
        const auto b = analytic_waveforms(p, (frac + 0.5) * ts);
        CHECK(b.v_c2 == Approx(a.v_c1).epsilon(1e-12));
        CHECK(b.v_ac == Approx(-a.v_ac).epsilon(1e-12));
    }
    // A designed tank returns to zero at the mode boundary.
    CHECK(analytic_waveforms(p, 0.0).v_c1 == Approx(0.0).margin(1e-9 * vm(p)));
}

TEST_CASE("resonant amplitude", "[analytics][oracle]") {
    const ReceiverParams p0 = designed_at(0.0);
    const double alpha = design::solve_alpha(0.0);
    CHECK(vm(p0) == Approx(std::abs(1.0 / std::cos(kPi * alpha / 2)) * p0.v_o_ref).epsilon(1e-9));
    // 2.24 with alpha rounded to 1.29; the exact root gives 2.26.
    CHECK(vm(p0) / p0.v_o_ref == Approx(2.24).margin(0.03));

    // Holding the resonant angle, V_m scales with (1 - k).
    ReceiverParams a = p0;
    ReceiverParams b = p0;
    a.k = 0.9;
    b.k = 0.99;
    a.c_f = p0.c_res() / (1 - a.k * a.k) - a.c_ac;
    b.c_f = p0.c_res() / (1 - b.k * b.k) - b.c_ac;
    CHECK(vm(b) / vm(a) == Approx(0.01 / 0.1).epsilon(1e-9));
}

TEST_CASE("secant pole is a degenerate design", "[analytics][errors]") {
    ReceiverParams p = prototype_params();
    const double w = kTwoPi * p.fs;
    p.c_f = 1.0 / (w * w * p.l_eff()) - p.c_ac;
    CHECK_THROWS_AS(vm(p), DegenerateDesignError);
    CHECK_THROWS_AS(gamma(p), DegenerateDesignError);
}

TEST_CASE("gamma of designed circuits", "[analytics][oracle]") {
    const double a0 = design::solve_alpha(0.0);
    CHECK(gamma(designed_at(0.0)) == Approx(2 * a0 * a0 / (kPi * (a0 * a0 - 1))).epsilon(1e-9));
    CHECK(gamma(designed_at(0.0)) == Approx(1.59).margin(0.01));
    CHECK(gamma(designed_at(0.5)) == Approx(1.57).margin(0.01));

    // Synthetic: 4 pi^2 fs^2 L C' (1 - k^2) = 0.5 gives 4 (1 - k) / pi.
    ReceiverParams p = prototype_params();
    p.k = 0.3;
    const double w = kTwoPi * p.fs;
    p.c_ac = 0.0;
    p.c_f = 0.5 / (w * w * p.l * (1 - p.k * p.k));
    CHECK(gamma(p) == Approx(4 * (1 - p.k) / kPi).epsilon(1e-12));
}

TEST_CASE("gamma identity holds at every designed coupling", "[analytics][property]") {
    const double k = GENERATE(0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95);
    const double a = design::solve_alpha(k);
    const double expected = 2 * (1 - k) * a * a / (kPi * (a * a - 1));
    CHECK(gamma(designed_at(k)) == Approx(expected).epsilon(1e-9));
}

TEST_CASE("real power", "[analytics][oracle]") {
    ReceiverParams p = designed_at(0.71);
    CHECK(real_power(p, PhaseShift(0.0)).p == 0.0);
    const RealPower full = real_power(p, PhaseShift(0.25));
    CHECK(full.p == Approx(full.p_max));
    CHECK(full.p_max == Approx(gamma(p) * p.i_ls_amp * p.v_o_ref));

    p.i_ls_amp = 1.27;
    CHECK(real_power(p, PhaseShift(0.25)).p == Approx(24.0).epsilon(0.01));
}

TEST_CASE("output law operating points", "[analytics][oracle]") {
    ReceiverParams p = prototype_params();
    const OperatingPoint zero = output_operating_point(p, PhaseShift(0.0));
    CHECK(zero.i_o == 0.0);
    CHECK(zero.v_o == 0.0);

    p.i_ls_amp = 1.27;
    CHECK(output_operating_point(p, PhaseShift(0.25)).i_o == Approx(2.0).epsilon(0.005));
    const OperatingPoint mid = output_operating_point(p, PhaseShift(0.125));
    CHECK(mid.i_o == Approx(1.58 * 1.27 * std::sin(kPi / 4)).epsilon(1e-12));
    CHECK(mid.i_o == Approx(1.42).margin(0.005));
    CHECK(mid.v_o == Approx(8.5).margin(0.05));
    CHECK(mid.v_o == Approx(mid.i_o * p.r_load));
    CHECK(mid.p == Approx(mid.p_max * std::sin(kPi / 4)));

    // Cross-check against the simulator within 10%.
    const sim::SteadyState ss = sim::periodic_steady_state(designed_at(0.71), PhaseShift(0.125));
    const double law = output_operating_point(designed_at(0.71), PhaseShift(0.125)).v_o;
    CHECK(std::abs(ss.x0.v_o - law) < 0.1 * law);
}

TEST_CASE("output law is strictly increasing in D", "[analytics][property]") {
    const ReceiverParams p = prototype_params();
    double prev = -1.0;
    for (int i = 0; i <= 250; ++i) {
        const double i_o = output_operating_point(p, PhaseShift(i * 0.001)).i_o;
        REQUIRE(i_o > prev);
        prev = i_o;
    }
}

TEST_CASE("inverse output law", "[analytics]") {
    const ReceiverParams p = prototype_params();
    const double d = GENERATE(0.0, 0.03, 0.125, 0.2, 0.25);
    const double i_o = output_operating_point(p, PhaseShift(d)).i_o;
    CHECK(phase_for_current(p, i_o) == Approx(d).margin(1e-12));
    CHECK(std::isnan(phase_for_current(p, 1.01 * 1.58 * p.i_ls_amp)));
    CHECK(std::isnan(phase_for_current(p, -0.1)));
}

TEST_CASE("spectrum of a pure sine", "[analytics][oracle]") {
    const auto xs = sampled([](double u) { return 3.0 * std::sin(kTwoPi * u + 0.3); }, 512);
    const Spectrum s = spectrum(xs, 1.0 / 512, 1.0);
    CHECK(s.mags[1] == Approx(3.0).epsilon(1e-12));
    CHECK(s.mags[0] == Approx(0.0).margin(1e-12));
    for (std::size_t h = 2; h < s.mags.size(); ++h) {
        REQUIRE(s.mags[h] < 1e-12);
    }
    CHECK(s.thd < 1e-12);
}

TEST_CASE("spectrum of a square wave", "[analytics][oracle]") {
    const std::size_t n = 1 << 16;
    const auto xs = sampled(
        [](double u) {
            if (u == 0.0 || u == 0.5) {
                return 0.0;
            }
            return u < 0.5 ? 1.0 : -1.0;
        },
        n);
    const Spectrum wide = spectrum(xs, 1.0 / n, 1.0, 2000);
    CHECK(wide.mags[1] == Approx(4.0 / kPi).epsilon(1e-3));
    CHECK(wide.thd == Approx(std::sqrt(kPi * kPi / 8 - 1)).epsilon(5e-3));

    // Default harmonic count: compare with the truncated series.
    const Spectrum s = spectrum(xs, 1.0 / n, 1.0);
    double acc = 0.0;
    for (int h = 3; h <= kDefaultHarmonics; h += 2) {
        acc += 1.0 / (h * h);
    }
    CHECK(s.thd == Approx(std::sqrt(acc)).epsilon(1e-3));
    CHECK(s.max_even_ratio() < 1e-9);
}

TEST_CASE("spectrum rejects partial periods and aliasing", "[analytics][errors]") {
    const std::vector<double> xs(100, 1.0);
    CHECK_THROWS_AS(spectrum(xs, 0.013, 1.0), ValidationError);
    CHECK_THROWS_AS(spectrum(xs, 0.01, 1.0, 50), ValidationError);
    CHECK_NOTHROW(spectrum(xs, 0.01, 1.0, 49));
    CHECK_THROWS_AS(spectrum(xs, 0.0, 1.0), ValidationError);
}

TEST_CASE("spectrum over several periods", "[analytics]") {
    const std::size_t n = 3 * 256;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / 256.0;
        xs[i] = 1.5 + 2.0 * std::cos(kTwoPi * t) + 0.5 * std::cos(3 * kTwoPi * t);
    }
    const Spectrum s = spectrum(xs, 1.0 / 256.0, 1.0, 10);
    CHECK(s.mags[0] == Approx(1.5));
    CHECK(s.mags[1] == Approx(2.0));
    CHECK(s.mags[3] == Approx(0.5));
    CHECK(s.thd == Approx(0.25));
    CHECK(thd_from_mags(s.mags) == Approx(s.thd));
}

TEST_CASE("simulated v_ac against the closed form", "[analytics][oracle]") {
    ReceiverParams p = designed_at(0.71);
    const sim::SteadyState ss = sim::periodic_steady_state(p, PhaseShift(0.25));
    p.v_o_ref = ss.x0.v_o;

    const Spectrum sim_s = spectrum(ss.waveform, "v_ac", p.fs);
    const std::size_t n = ss.waveform.size();
    std::vector<double> closed(n);
    for (std::size_t i = 0; i < n; ++i) {
        closed[i] = analytic_waveforms(p, ss.waveform.time(i)).v_ac;
    }
    const Spectrum an_s = spectrum(closed, ss.waveform.dt, p.fs);
    CHECK(std::abs(an_s.mags[1] - sim_s.mags[1]) < 0.1 * sim_s.mags[1]);
    CHECK(an_s.mags[1] == Approx(2 * gamma(p) * p.v_o_ref).epsilon(0.1));

    // V_m against the simulated peak.
    double peak = 0.0;
    for (double v : ss.waveform.v_c1) {
        peak = std::max(peak, v);
    }
    CHECK(std::abs((peak - (1 - p.k) * p.v_o_ref) - vm(p)) < 0.1 * vm(p));
}

TEST_CASE("simulated v_ac has no even harmonics", "[analytics][property]") {
    ReceiverParams p = designed_at(0.71);
    p.r_load = GENERATE(3.0, 6.0, 9.0);
    const PhaseShift d(GENERATE(0.05, 0.15, 0.25));
    const sim::SteadyState ss = sim::periodic_steady_state(p, d);
    const Spectrum s = spectrum(ss.waveform, "v_ac", p.fs);
    CHECK(s.mags[2] / s.mags[1] < 0.01);
    CHECK(s.max_even_ratio() < 0.01);
}

TEST_CASE("delivered power tracks the real-power law", "[analytics][property]") {
    ReceiverParams p = designed_at(0.71);
    const PhaseShift d(GENERATE(0.05, 0.1, 0.15, 0.2, 0.25));
    const sim::SteadyState ss = sim::periodic_steady_state(p, d);
    p.v_o_ref = ss.x0.v_o;
    const double law = real_power(p, d).p;
    const sim::PowerBalance pb = sim::power_balance(ss, p);
    CHECK(std::abs(pb.load - law) < 0.1 * law);
    // Below full phase shift the switch clamp dumps the rest of the input.
    CHECK(pb.input == Approx(pb.load + pb.clamp).epsilon(1e-3));
    if (d.value() == 0.25) {
        CHECK(std::abs(pb.input - law) < 0.1 * law);
    }
}

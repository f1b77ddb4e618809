#include <catch_amalgamated.hpp>

#include "wpt/analytics.hpp"
#include "wpt/control.hpp"
#include "wpt/design.hpp"
#include "wpt/error.hpp"
#include "wpt/parallel.hpp"
#include "wpt/sweeps.hpp"

#include <atomic>
#include <cmath>
#include <vector>

using namespace wpt;
using namespace wpt::sweep;
using Catch::Approx;

namespace {

ReceiverParams designed() {
    ReceiverParams p = prototype_params();
    const auto split = design::split_capacitance(design::resonant_capacitance(p.l, p.k, p.fs));
    p.c_ac = split.c_ac;
    p.c_f = split.c_f;
    return p;
}

double wrap_deg(double x) { return std::remainder(x, 360.0); }

} // namespace

TEST_CASE("index loop visits every index once", "[parallel]") {
    const auto exec = GENERATE(Execution::kSerial, Execution::kParallel);
    std::vector<std::atomic<int>> hits(1000);
    for_each_index(hits.size(), exec, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) {
        REQUIRE(h.load() == 1);
    }
    for_each_index(0, exec, [](std::size_t) { FAIL("empty range must not call"); });
}

TEST_CASE("phase sweep is identical serial and parallel", "[sweep][property]") {
    const ReceiverParams p = designed();
    const std::vector<double> ds{0.0, 0.05, 0.1, 0.15, 0.2, 0.25};
    const auto a = sweep_phase(p, ds, Execution::kSerial);
    const auto b = sweep_phase(p, ds, Execution::kParallel);
    REQUIRE(a.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(a[i].v_o_sim == b[i].v_o_sim);
        CHECK(a[i].p_in_sim == b[i].p_in_sim);
        CHECK(a[i].zvs_residual == b[i].zvs_residual);
        CHECK(a[i].d == ds[i]);
    }
    CHECK(a[0].i_o_law == 0.0);
    CHECK(a[0].v_o_sim == Approx(0.0).margin(1e-4));
}

TEST_CASE("phase sweep tracks the output law", "[sweep]") {
    const ReceiverParams p = designed();
    const std::vector<double> ds{0.05, 0.1, 0.15, 0.2, 0.25};
    const auto pts = sweep_phase(p, ds);
    CHECK(pts.back().p_in_sim == Approx(pts.back().v_o_sim * pts.back().i_o_sim).epsilon(1e-3));
    for (const PhaseSweepPoint& pt : pts) {
        CAPTURE(pt.d);
        CHECK(std::abs(pt.i_o_sim - pt.i_o_law) < 0.1 * pt.i_o_law);
        // The input also covers clamp losses, so it never falls below the load.
        CHECK(pt.p_in_sim >= pt.v_o_sim * pt.i_o_sim * (1 - 1e-4));
    }
}

TEST_CASE("ZVS grid is identical serial and parallel", "[sweep][property]") {
    const ReceiverParams p = designed();
    const std::vector<double> loads{3.0, 6.0, 9.0};
    const std::vector<double> ds{0.05, 0.25};
    const auto a = zvs_grid(p, loads, ds, Execution::kSerial);
    const auto b = zvs_grid(p, loads, ds, Execution::kParallel);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].residual == b[i].residual);
        CHECK(a[i].r_load == loads[i / ds.size()]);
        CHECK(a[i].d == ds[i % ds.size()]);
    }
    // The designed tank is ZVS at full phase shift for every load.
    for (std::size_t il = 0; il < loads.size(); ++il) {
        CHECK(a[il * ds.size() + 1].residual < 0.02);
    }
}

TEST_CASE("simulated small-signal response matches the first-order model", "[sweep][oracle][slow]") {
    const ReceiverParams p = designed();
    const auto kind = GENERATE(control::LoopKind::kVoltage, control::LoopKind::kCurrent);
    const PhaseShift d_op(0.1);
    const std::vector<double> fs{3.0, 100.0};
    const auto sim_pts = frequency_response(p, kind, d_op, fs);
    REQUIRE(sim_pts.size() == fs.size());
    for (const FrequencyResponsePoint& s : sim_pts) {
        const std::vector<double> f{s.f};
        const control::BodePoint m = control::bode_points(control::plant_tf(kind, p, d_op), f).front();
        CHECK(std::abs(s.mag_db - m.mag_db) < 3.0);
        CHECK(std::abs(wrap_deg(s.phase_deg - m.phase_deg)) < 10.0);
    }
}

TEST_CASE("frequency response is identical serial and parallel", "[sweep][property][slow]") {
    const ReceiverParams p = designed();
    const std::vector<double> fs{30.0, 300.0};
    FrequencyResponseOptions o;
    o.settle_time_constants = 3.0;
    const auto a = frequency_response(p, control::LoopKind::kVoltage, PhaseShift(0.05), fs, o, Execution::kSerial);
    const auto b = frequency_response(p, control::LoopKind::kVoltage, PhaseShift(0.05), fs, o, Execution::kParallel);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        CHECK(a[i].h == b[i].h);
        CHECK(a[i].f == Approx(fs[i]).epsilon(0.05));
    }
}

TEST_CASE("frequency response rejects perturbations outside the D range", "[sweep][errors]") {
    const ReceiverParams p = designed();
    const std::vector<double> fs{10.0};
    FrequencyResponseOptions o;
    o.amplitude = 0.01;
    CHECK_THROWS_AS(frequency_response(p, control::LoopKind::kVoltage, PhaseShift(0.005), fs, o), ValidationError);
    CHECK_THROWS_AS(frequency_response(p, control::LoopKind::kVoltage, PhaseShift(0.245), fs, o), ValidationError);
}

#include <catch_amalgamated.hpp>

#include "wpt/circuit_model.hpp"
#include "wpt/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>

using namespace wpt;
using namespace wpt::state_index;
using Catch::Approx;

namespace {

Vec5 state(double i1, double i2, double v1, double v2, double vo) { return Vec5{i1, i2, v1, v2, vo}; }

// Swaps leg 1 and leg 2 in a state-indexed matrix or vector.
Mat5 leg_swap() {
    Mat5 p = Mat5::Zero();
    p(kIL1, kIL2) = p(kIL2, kIL1) = 1.0;
    p(kVC1, kVC2) = p(kVC2, kVC1) = 1.0;
    p(kVO, kVO) = 1.0;
    return p;
}

} // namespace

TEST_CASE("source current follows the phase-shifted cosine", "[circuit][oracle]") {
    ReceiverParams p;
    p.i_ls_amp = 1.0;
    p.fs = 200e3;
    CHECK(source_current(p, PhaseShift(0.0), 0.0) == Approx(1.0));
    CHECK(source_current(p, PhaseShift(0.25), 0.0) == Approx(0.0).margin(1e-15));

    p.i_ls_amp = 1.27;
    const double expected = 1.27 * std::cos(std::numbers::pi / 2 - 0.2 * std::numbers::pi);
    CHECK(source_current(p, PhaseShift(0.1), 1.25e-6) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("phase shift range is enforced", "[circuit][errors]") {
    CHECK_NOTHROW(PhaseShift(0.0));
    CHECK_NOTHROW(PhaseShift(0.25));
    CHECK_THROWS_AS(PhaseShift(-1e-9), ValidationError);
    CHECK_THROWS_AS(PhaseShift(0.2500001), ValidationError);
    CHECK_THROWS_AS(PhaseShift(std::nan("")), ValidationError);
    CHECK(PhaseShift(0.125).angle() == Approx(std::numbers::pi / 4));
}

TEST_CASE("receiver parameters are validated", "[circuit][errors]") {
    const ReceiverParams good = prototype_params();
    CHECK_NOTHROW(good.validate());

    auto broken = [&](auto mutate) {
        ReceiverParams p = good;
        mutate(p);
        return p;
    };
    CHECK_THROWS_AS(broken([](auto& p) { p.k = 1.0; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](auto& p) { p.k = -0.1; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](auto& p) { p.l = 0.0; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](auto& p) { p.fs = -1.0; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](auto& p) { p.c_f = 0.0; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](auto& p) { p.c_o = 0.0; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](auto& p) { p.r_load = 0.0; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](auto& p) { p.i_ls_amp = -1.0; }).validate(), ValidationError);
    CHECK_NOTHROW(broken([](auto& p) { p.c_ac = 0.0; }).validate());
    CHECK_NOTHROW(broken([](auto& p) { p.r_load = std::numeric_limits<double>::infinity(); }).validate());
    CHECK_THROWS_AS(assemble_mode_dynamics(broken([](auto& p) { p.k = 1.0; }), Mode::kModeI), ValidationError);
}

TEST_CASE("prototype receiver carries the rated components", "[circuit]") {
    const ReceiverParams p = prototype_params();
    CHECK(p.l == Approx(22.25e-6));
    CHECK(p.k == Approx(0.71));
    CHECK(p.c_res() == Approx(49e-9));
    CHECK(p.c_o == Approx(6800e-6));
    CHECK(1.58 * p.i_ls_amp == Approx(2.0));
    CHECK(p.period() == Approx(5e-6));
    CHECK(p.l_eff() == Approx(22.25e-6 * (1 - 0.71 * 0.71)));
}

TEST_CASE("mode boundaries sit at half periods", "[circuit]") {
    const ReceiverParams p = prototype_params();
    const double ts = p.period();
    CHECK(mode_at(p, 0.0) == Mode::kModeI);
    CHECK(mode_at(p, 0.49 * ts) == Mode::kModeI);
    CHECK(mode_at(p, 0.5 * ts) == Mode::kModeII);
    CHECK(mode_at(p, 0.99 * ts) == Mode::kModeII);
    CHECK(mode_at(p, 7.0 * ts + 1e-9) == Mode::kModeI);
}

TEST_CASE("decoupled inductors at k = 0", "[circuit][oracle]") {
    ReceiverParams p = prototype_params();
    p.k = 0.0;
    const LinearDynamics dyn = assemble_mode_dynamics(p, Mode::kModeI);
    const Vec5 x = state(0.3, -0.2, 40.0, 0.0, 12.0);
    const Vec5 r = dyn.rates(x, 0.0);
    CHECK(r[kIL1] == Approx((40.0 - 12.0) / p.l));
    CHECK(r[kIL2] == Approx(-12.0 / p.l));
}

TEST_CASE("clamped capacitor row is identically zero", "[circuit]") {
    const ReceiverParams p = prototype_params();
    const LinearDynamics one = assemble_mode_dynamics(p, Mode::kModeI);
    const LinearDynamics two = assemble_mode_dynamics(p, Mode::kModeII);
    CHECK(one.a.row(kVC2).isZero(0.0));
    CHECK(one.b[kVC2] == 0.0);
    CHECK(two.a.row(kVC1).isZero(0.0));
    CHECK(two.b[kVC1] == 0.0);
}

TEST_CASE("mode I rates match the coupled-inductor linear solve", "[circuit][oracle]") {
    const ReceiverParams p = prototype_params();
    const double v1 = 50.0;
    const double vo = 12.0;
    const double i1 = 0.7;
    const double i2 = 1.1;
    const double ils = 0.4;

    // L [1 k; k 1] d/dt [i1; i2] = [v1 - vo; -vo]
    Eigen::Matrix2d lm;
    lm << p.l, p.k * p.l, p.k * p.l, p.l;
    const Eigen::Vector2d di = lm.fullPivLu().solve(Eigen::Vector2d{v1 - vo, -vo});

    const Vec5 r = assemble_mode_dynamics(p, Mode::kModeI).rates(state(i1, i2, v1, 0.0, vo), ils);
    CHECK(r[kIL1] == Approx(di[0]).epsilon(1e-12));
    CHECK(r[kIL2] == Approx(di[1]).epsilon(1e-12));
    CHECK(r[kVC1] == Approx((ils - i1) / p.c_res()).epsilon(1e-12));
    CHECK(r[kVC2] == 0.0);
    CHECK(r[kVO] == Approx((i1 + i2 - vo / p.r_load) / p.c_o).epsilon(1e-12));
}

TEST_CASE("mode II is the leg-swapped mode I", "[circuit][property]") {
    ReceiverParams p = prototype_params();
    p.k = GENERATE(0.0, 0.3, 0.71, 0.95);
    p.r_load = GENERATE(3.0, 60.0);
    const LinearDynamics one = assemble_mode_dynamics(p, Mode::kModeI);
    const LinearDynamics two = assemble_mode_dynamics(p, Mode::kModeII);
    const Mat5 s = leg_swap();
    CHECK((s * one.a * s - two.a).norm() <= 1e-12 * one.a.norm());
    // The source returns through the opposite node in mode II.
    CHECK((s * one.b + two.b).norm() <= 1e-12 * one.b.norm());
}

TEST_CASE("positive output voltage discharges the active inductors", "[circuit][property]") {
    ReceiverParams p = prototype_params();
    p.k = GENERATE(0.0, 0.2, 0.5, 0.71, 0.9);
    const double vo = GENERATE(0.1, 5.0, 24.0);
    for (Mode m : {Mode::kModeI, Mode::kModeII}) {
        const Vec5 r = assemble_mode_dynamics(p, m).rates(state(0, 0, 0, 0, vo), 0.0);
        CHECK(r[kIL1] < 0.0);
        CHECK(r[kIL2] < 0.0);
    }
}

TEST_CASE("lossless unforced dynamics conserve stored energy", "[circuit][property]") {
    ReceiverParams p = prototype_params();
    p.i_ls_amp = 0.0;
    p.r_load = std::numeric_limits<double>::infinity();
    p.k = GENERATE(0.0, 0.4, 0.71);
    auto seed = GENERATE(take(20, random(-1.0, 1.0)));

    for (Mode m : {Mode::kModeI, Mode::kModeII}) {
        const LinearDynamics dyn = assemble_mode_dynamics(p, m);
        Vec5 x = state(2.0 * seed, -1.5 * seed * seed, 30.0 * seed, -20.0 * seed, 12.0 + seed);
        x[m == Mode::kModeI ? kVC2 : kVC1] = 0.0;
        const Vec5 r = dyn.rates(x, 0.0);
        // Gradient of the stored energy, including the mutual term.
        Vec5 grad;
        grad << p.l * x[kIL1] + p.k * p.l * x[kIL2], p.l * x[kIL2] + p.k * p.l * x[kIL1], p.c_res() * x[kVC1],
            p.c_res() * x[kVC2], p.c_o * x[kVO];
        const double scale = std::abs(grad[0] * r[0]) + std::abs(grad[4] * r[4]) + std::abs(grad[2] * r[2]) + 1e-30;
        CHECK(std::abs(grad.dot(r)) <= 1e-12 * scale);
    }
}

TEST_CASE("stored energy sums inductors, resonant and output capacitors", "[circuit][oracle]") {
    ReceiverParams p = prototype_params();
    const StateVector x{1.0, 2.0, 10.0, 0.0, 12.0};
    const double expected = 0.5 * p.l * (1.0 + 4.0) + p.k * p.l * 2.0 + 0.5 * p.c_res() * 100.0 +
                            0.5 * p.c_o * 144.0;
    CHECK(stored_energy(p, x) == Approx(expected).epsilon(1e-14));
}

TEST_CASE("state vector helpers", "[circuit]") {
    const StateVector x{1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(StateVector::from_vec(x.to_vec()) == x);
    CHECK(x.swapped_legs() == StateVector{2.0, 1.0, 4.0, 3.0, 5.0});
    CHECK(x.i_lm() == 3.0);
}

TEST_CASE("open load has zero conductance", "[circuit]") {
    ReceiverParams p = prototype_params();
    p.r_load = std::numeric_limits<double>::infinity();
    CHECK(p.g_load() == 0.0);
    const LinearDynamics dyn = assemble_mode_dynamics(p, Mode::kModeI);
    CHECK(dyn.a(kVO, kVO) == 0.0);
}

#include "wpt/circuit_model.hpp"

#include "wpt/error.hpp"

#include <string>

namespace wpt {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw ValidationError(std::string("invalid receiver parameters: ") + what);
    }
}

} // namespace

void ReceiverParams::validate() const {
    require(std::isfinite(fs) && fs > 0.0, "fs must be > 0");
    require(std::isfinite(i_ls_amp) && i_ls_amp >= 0.0, "i_ls_amp must be >= 0");
    require(std::isfinite(l) && l > 0.0, "L must be > 0");
    require(std::isfinite(k) && k >= 0.0 && k < 1.0, "k must lie in [0, 1)");
    require(std::isfinite(c_f) && c_f > 0.0, "c_f must be > 0");
    require(std::isfinite(c_ac) && c_ac >= 0.0, "c_ac must be >= 0");
    require(std::isfinite(c_o) && c_o > 0.0, "c_o must be > 0");
    require(!std::isnan(r_load) && r_load > 0.0, "r_load must be > 0");
    require(std::isfinite(v_o_ref), "v_o_ref must be finite");
}

ReceiverParams prototype_params() {
    ReceiverParams p;
    p.fs = 200e3;
    p.i_ls_amp = 2.0 / 1.58;
    p.l = 22.25e-6; // mean of 22.8 uH and 21.7 uH
    p.k = 0.71;
    p.c_f = 47e-9;
    p.c_ac = 2e-9;
    p.c_o = 6800e-6;
    p.r_load = 6.0;
    p.v_o_ref = 12.0;
    return p;
}

PhaseShift::PhaseShift(double d) : d_(d) {
    if (!(d >= 0.0 && d <= kMax)) {
        throw ValidationError("phase-shift ratio must lie in [0, 0.25], got " + std::to_string(d));
    }
}

Mode mode_at(const ReceiverParams& p, double t) {
    const double cycles = t * p.fs;
    const double frac = cycles - std::floor(cycles);
    return frac < 0.5 ? Mode::kModeI : Mode::kModeII;
}

double source_current(const ReceiverParams& p, PhaseShift d, double t) {
    return p.i_ls_amp * std::cos(kTwoPi * p.fs * t - d.angle());
}

LinearDynamics assemble_mode_dynamics(const ReceiverParams& p, Mode mode) {
    p.validate();
    using namespace state_index;

    const bool mode_one = mode == Mode::kModeI;
    const int active_i = mode_one ? kIL1 : kIL2;
    const int passive_i = mode_one ? kIL2 : kIL1;
    const int active_v = mode_one ? kVC1 : kVC2;

    const double inv_leff = 1.0 / p.l_eff();
    const double c_res = p.c_res();

    LinearDynamics dyn;
    dyn.mode = mode;
    // L [1 k; k 1] d/dt [i_a; i_p] = [v_a - v_o; -v_o]
    dyn.a(active_i, active_v) = inv_leff;
    dyn.a(active_i, kVO) = -(1.0 - p.k) * inv_leff;
    dyn.a(passive_i, active_v) = -p.k * inv_leff;
    dyn.a(passive_i, kVO) = -(1.0 - p.k) * inv_leff;

    dyn.a(active_v, active_i) = -1.0 / c_res;
    dyn.b(active_v) = (mode_one ? 1.0 : -1.0) / c_res;

    dyn.a(kVO, kIL1) = 1.0 / p.c_o;
    dyn.a(kVO, kIL2) = 1.0 / p.c_o;
    dyn.a(kVO, kVO) = -p.g_load() / p.c_o;
    return dyn;
}

double stored_energy(const ReceiverParams& p, const StateVector& x) {
    const double inductor =
        0.5 * p.l * (x.i_l1 * x.i_l1 + x.i_l2 * x.i_l2) + p.k * p.l * x.i_l1 * x.i_l2;
    const double caps = 0.5 * p.c_res() * (x.v_c1 * x.v_c1 + x.v_c2 * x.v_c2);
    return inductor + caps + 0.5 * p.c_o * x.v_o * x.v_o;
}

} // namespace wpt

#pragma once

// Parameter sweeps over independent steady-state or open-loop runs. Each has a
// serial reference path and an OpenMP path selected by Execution.

#include "wpt/circuit_model.hpp"
#include "wpt/control.hpp"
#include "wpt/parallel.hpp"

#include <complex>
#include <span>
#include <vector>

namespace wpt::sweep {

struct PhaseSweepPoint {
    double d = 0.0;
    double i_o_law = 0.0;   ///< output law
    double v_o_law = 0.0;
    double i_o_sim = 0.0;   ///< periodic steady state
    double v_o_sim = 0.0;
    double p_in_sim = 0.0;  ///< period-averaged v_ac i_ls
    double zvs_residual = 0.0;
};

[[nodiscard]] std::vector<PhaseSweepPoint> sweep_phase(const ReceiverParams& p, std::span<const double> d_grid,
                                                       Execution exec = Execution::kParallel);

struct ZvsPoint {
    double r_load = 0.0;
    double d = 0.0;
    double residual = 0.0;        ///< worst switch-instant |v| / peak
    double discarded_energy = 0.0; ///< J per cycle
};

/// Row-major over (loads, ds).
[[nodiscard]] std::vector<ZvsPoint> zvs_grid(const ReceiverParams& p, std::span<const double> loads,
                                             std::span<const double> ds, Execution exec = Execution::kParallel);

struct FrequencyResponseOptions {
    double amplitude = 2e-3;        ///< D perturbation amplitude
    double settle_time_constants = 10.0;
    int min_cycles = 2;             ///< perturbation cycles in the measurement window
    int min_periods = 2000;         ///< switching periods in the measurement window
};

struct FrequencyResponsePoint {
    double f = 0.0;                 ///< perturbation frequency actually used (Hz)
    std::complex<double> h;         ///< output / D at f
    double mag_db = 0.0;
    double phase_deg = 0.0;
};

/// Open-loop small-signal response of i_o (current) or v_o (voltage) to a
/// sinusoidal D perturbation about d_op, held per switching period and read at
/// period boundaries. Each requested frequency is nudged so the window holds
/// an integer number of perturbation cycles.
[[nodiscard]] std::vector<FrequencyResponsePoint> frequency_response(const ReceiverParams& p,
                                                                     control::LoopKind kind, PhaseShift d_op,
                                                                     std::span<const double> frequencies,
                                                                     const FrequencyResponseOptions& opts = {},
                                                                     Execution exec = Execution::kParallel);

} // namespace wpt::sweep

#pragma once

// =============================================================================
// Cycle-stepped closed-loop co-simulation
// =============================================================================
// Every switching period: sample v_o / i_o at the period boundary, run one PI
// update, snap the new D to the counter grid, and advance the plant one
// period with the exact propagator. Load and source-amplitude events take
// effect at the nearest period boundary.
// =============================================================================

#include "wpt/circuit_model.hpp"
#include "wpt/control.hpp"
#include "wpt/parallel.hpp"
#include "wpt/sync_pwm.hpp"

#include <span>
#include <vector>

namespace wpt::loop {

using control::LoopKind;

struct Event {
    enum class Kind { kLoadResistance, kSourceAmplitude };
    double time = 0.0; ///< s
    Kind kind = Kind::kLoadResistance;
    double value = 0.0; ///< ohm or A
};

struct Scenario {
    LoopKind regulation = LoopKind::kVoltage;
    double reference = 12.0; ///< V or A
    std::vector<Event> events;
    double duration = 0.1; ///< s

    void validate() const;
};

struct TransientOptions {
    int ticks_per_period = pwm::kDefaultTicksPerPeriod;
    /// Start at the periodic steady state predicted for the reference (when
    /// reachable) with the integrator preloaded; otherwise saturated at D = 0.25.
    bool settled_start = true;
    double band = 0.02;          ///< settling band, fraction of the reference
    double tail_window = 5e-3;   ///< s averaged for the steady-state error
    int record_every = 1;        ///< keep every n-th period in the series
};

struct EventMetrics {
    double time = 0.0;               ///< effective event time (period boundary)
    double extreme_deviation = 0.0;  ///< signed largest departure from the reference
    double settling_time = 0.0;      ///< s after the event until the band holds; NaN if never
    double steady_state_error = 0.0; ///< |tail mean - reference|
    int oscillation_reversals = 0;   ///< deviation sign flips beyond half the band
};

struct TransientResult {
    std::vector<double> t;
    std::vector<double> v_o;
    std::vector<double> i_o;
    std::vector<double> d_command;
    std::vector<double> integrator;
    std::vector<EventMetrics> events;  ///< one per scenario event, in order
    double final_value = 0.0;          ///< tail mean of the regulated variable
    double steady_state_error = 0.0;   ///< |final_value - reference|
    double max_abs_integrator = 0.0;
};

[[nodiscard]] TransientResult run_transient(const ReceiverParams& p, const control::PIGains& gains,
                                            const Scenario& scenario, const TransientOptions& opts = {});

enum class SweepAxis { kLoadPower, kSourceAmplitude };

struct RegulationPoint {
    double axis_value = 0.0;   ///< load-power fraction or source-amplitude factor
    bool reachable = false;
    double r_load = 0.0;
    double i_ls_amp = 0.0;
    double settled_value = 0.0;
    double relative_error = 0.0;
    double d_settled = 0.0;    ///< tail mean of the commanded D
    double d_predicted = 0.0;  ///< inverse output law, NaN when unreachable
    bool converged = false;
};

struct RegulationOptions {
    TransientOptions transient;
    double run_time = 0.15;     ///< s per chunk
    int max_chunks = 4;
    double convergence_tol = 5e-4; ///< relative change of the tail mean between chunks
};

/// Load-power axis scales R_L = R_nominal / fraction (p.r_load is nominal);
/// source axis scales |I_Ls|. Points beyond the output law start saturated at D = 0.25.
[[nodiscard]] std::vector<RegulationPoint> regulation_sweep(const ReceiverParams& p, const control::PIGains& gains,
                                                            LoopKind regulation, double reference, SweepAxis axis,
                                                            std::span<const double> grid,
                                                            const RegulationOptions& opts = {},
                                                            Execution exec = Execution::kParallel);

} // namespace wpt::loop

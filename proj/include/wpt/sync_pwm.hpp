#pragma once

// Frequency synchronization and phase-shift PWM.
//
// A comparator turns i_Ls into sync edges. Counter 1 restarts at every sync
// edge and runs one measured period; its 50% output (PWM1) rises at the i_Ls
// cosine peak, a fixed quarter period after a rising zero crossing. Counter 2
// trails counter 1 by D periods; comparing it at half scale yields the
// complementary gate pair, so v_gs1 rises (0.25 + D) Ts after the i_Ls peak.

#include "wpt/circuit_model.hpp"

#include <span>
#include <vector>

namespace wpt::pwm {

inline constexpr int kDefaultTicksPerPeriod = 4096;

enum class SyncPolarity { kRising, kFalling };

struct ZeroCrossOptions {
    double t0 = 0.0;                    ///< time of the first sample
    double hysteresis_fraction = 0.0;   ///< arming band, fraction of peak |x|
    SyncPolarity polarity = SyncPolarity::kRising;
};

/// Edge times found by linear interpolation between bracketing samples.
/// Requires at least one full nominal period and >= 32 samples per period.
/// Throws ValidationError for short/coarse input or when no crossing exists.
[[nodiscard]] std::vector<double> zero_cross_detect(std::span<const double> samples, double dt, double nominal_fs,
                                                    const ZeroCrossOptions& opts = {});

struct PwmOptions {
    int ticks_per_period = kDefaultTicksPerPeriod;
    double dead_time = 0.0;             ///< s, shaved from both gates
    SyncPolarity polarity = SyncPolarity::kRising;
};

/// Gate edges of one switching cycle, absolute times in s.
struct GateCycle {
    double sync = 0.0;       ///< sync edge that restarted counter 1
    double period = 0.0;     ///< period used for this cycle (last measured)
    double source_peak = 0.0; ///< i_Ls cosine peak inferred from the sync edge
    double gs1_rise = 0.0;
    double gs1_fall = 0.0;
    double gs2_rise = 0.0;
    double gs2_fall = 0.0;
};

struct GateTimeline {
    std::vector<GateCycle> cycles;
    int ticks_per_period = kDefaultTicksPerPeriod;
    int phase_ticks = 0;     ///< D quantized to the counter grid

    [[nodiscard]] bool gs1_at(double t) const;
    [[nodiscard]] bool gs2_at(double t) const;
    /// Phase of v_gs1 behind the i_Ls peak of cycle i, in periods.
    [[nodiscard]] double gs1_phase(std::size_t i) const;
};

/// D snapped to the nearest counter tick.
[[nodiscard]] PhaseShift quantize(PhaseShift d, int ticks_per_period = kDefaultTicksPerPeriod);

/// One cycle per sync edge after the first (the first only starts the period
/// measurement). Throws ValidationError for fewer than two edges or
/// non-increasing edge times.
[[nodiscard]] GateTimeline pwm_generate(std::span<const double> sync_edges, PhaseShift d,
                                        const PwmOptions& opts = {});

} // namespace wpt::pwm

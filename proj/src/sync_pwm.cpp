#include "wpt/sync_pwm.hpp"

#include "wpt/error.hpp"

#include <algorithm>
#include <cmath>

namespace wpt::pwm {

std::vector<double> zero_cross_detect(std::span<const double> samples, double dt, double nominal_fs,
                                      const ZeroCrossOptions& opts) {
    if (!(dt > 0.0) || !(nominal_fs > 0.0)) {
        throw ValidationError("zero_cross_detect: dt and nominal_fs must be > 0");
    }
    const double per_period = 1.0 / (nominal_fs * dt);
    if (per_period < 32.0 * (1.0 - 1e-9)) {
        throw ValidationError("zero_cross_detect: need at least 32 samples per period");
    }
    if (static_cast<double>(samples.size()) * dt * nominal_fs < 1.0 - 1e-9) {
        throw ValidationError("zero_cross_detect: fewer than one full period of samples");
    }
    if (!(opts.hysteresis_fraction >= 0.0 && opts.hysteresis_fraction < 1.0)) {
        throw ValidationError("zero_cross_detect: hysteresis_fraction must lie in [0, 1)");
    }

    const double sign = opts.polarity == SyncPolarity::kRising ? 1.0 : -1.0;
    double peak = 0.0;
    for (double x : samples) {
        peak = std::max(peak, std::abs(x));
    }
    const double arm_level = -opts.hysteresis_fraction * peak;

    std::vector<double> edges;
    bool armed = false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double x = sign * samples[i];
        if (!armed) {
            armed = opts.hysteresis_fraction > 0.0 ? x < arm_level : x < 0.0;
            continue;
        }
        if (x >= 0.0 && i > 0) {
            const double prev = sign * samples[i - 1];
            const double frac = prev < 0.0 ? -prev / (x - prev) : 0.0;
            edges.push_back(opts.t0 + dt * (static_cast<double>(i - 1) + frac));
            armed = false;
        }
    }
    if (edges.empty()) {
        throw ValidationError("zero_cross_detect: no crossings");
    }
    return edges;
}

PhaseShift quantize(PhaseShift d, int ticks_per_period) {
    if (ticks_per_period < 4) {
        throw ValidationError("quantize: ticks_per_period must be >= 4");
    }
    const double ticks = std::round(d.value() * ticks_per_period);
    return PhaseShift(std::min(ticks / ticks_per_period, PhaseShift::kMax));
}

GateTimeline pwm_generate(std::span<const double> sync_edges, PhaseShift d, const PwmOptions& opts) {
    if (sync_edges.size() < 2) {
        throw ValidationError("pwm_generate: need at least two sync edges to measure a period");
    }
    for (std::size_t i = 1; i < sync_edges.size(); ++i) {
        if (!(sync_edges[i] > sync_edges[i - 1])) {
            throw ValidationError("pwm_generate: sync edges must be strictly increasing");
        }
    }
    if (opts.ticks_per_period < 4 || opts.ticks_per_period % 4 != 0) {
        throw ValidationError("pwm_generate: ticks_per_period must be a positive multiple of 4");
    }

    const int n = opts.ticks_per_period;
    GateTimeline tl;
    tl.ticks_per_period = n;
    tl.phase_ticks = static_cast<int>(std::lround(quantize(d, n).value() * n));

    // Counter 1 tick at which the i_Ls cosine peak occurs.
    const int peak_tick = opts.polarity == SyncPolarity::kRising ? n / 4 : -n / 4;
    // PWM1 rises at the peak; counter 2 trails it by D and drives v_gs1 high
    // once it reaches half scale.
    const int gs1_rise_tick = peak_tick + tl.phase_ticks + n / 4;

    tl.cycles.reserve(sync_edges.size() - 1);
    for (std::size_t i = 1; i < sync_edges.size(); ++i) {
        GateCycle c;
        c.sync = sync_edges[i];
        c.period = sync_edges[i] - sync_edges[i - 1];
        if (!(opts.dead_time >= 0.0 && 2.0 * opts.dead_time < 0.5 * c.period)) {
            throw ValidationError("pwm_generate: dead time must be >= 0 and below a quarter period");
        }
        const double tick = c.period / n;
        c.source_peak = c.sync + peak_tick * tick;
        c.gs1_rise = c.sync + gs1_rise_tick * tick + opts.dead_time;
        c.gs1_fall = c.sync + (gs1_rise_tick + n / 2) * tick - opts.dead_time;
        c.gs2_rise = c.sync + (gs1_rise_tick + n / 2) * tick + opts.dead_time;
        c.gs2_fall = c.sync + (gs1_rise_tick + n) * tick - opts.dead_time;
        tl.cycles.push_back(c);
    }
    return tl;
}

bool GateTimeline::gs1_at(double t) const {
    return std::any_of(cycles.begin(), cycles.end(),
                       [t](const GateCycle& c) { return t >= c.gs1_rise && t < c.gs1_fall; });
}

bool GateTimeline::gs2_at(double t) const {
    return std::any_of(cycles.begin(), cycles.end(),
                       [t](const GateCycle& c) { return t >= c.gs2_rise && t < c.gs2_fall; });
}

double GateTimeline::gs1_phase(std::size_t i) const {
    const GateCycle& c = cycles.at(i);
    return (c.gs1_rise - c.source_peak) / c.period;
}

} // namespace wpt::pwm

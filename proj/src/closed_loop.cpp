#include "wpt/closed_loop.hpp"

#include "wpt/analytics.hpp"
#include "wpt/error.hpp"
#include "wpt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace wpt::loop {

namespace {

/// Plant + controller advanced one switching period at a time.
class LoopRunner {
public:
    LoopRunner(const ReceiverParams& p, const control::PIGains& gains, LoopKind regulation, double reference,
               int ticks_per_period)
        : params_(p), props_(p), gains_(gains), regulation_(regulation), reference_(reference),
          ticks_(ticks_per_period) {
        if (!gains_.discretized()) {
            gains_ = control::tustin_discretize(gains_, p.period());
        }
    }

    /// Preloads plant and integrator at the predicted operating point, or at
    /// full phase shift when the reference is beyond the output law's reach.
    /// Returns whether the reference was reachable.
    bool settle_at_reference() {
        const double d0 = predicted_phase();
        const PhaseShift dq = pwm::quantize(PhaseShift(std::isnan(d0) ? PhaseShift::kMax : d0), ticks_);
        x_ = sim::periodic_steady_state(props_, dq).x0.to_vec();
        pi_ = control::PIState{};
        pi_.integrator = dq.value();
        d_ = dq;
        return !std::isnan(d0);
    }

    [[nodiscard]] double predicted_phase() const {
        const double target_current =
            regulation_ == LoopKind::kCurrent ? reference_ : reference_ * params_.g_load();
        return analytics::phase_for_current(params_, target_current);
    }

    void apply(const Event& e) {
        if (e.kind == Event::Kind::kLoadResistance) {
            params_.r_load = e.value;
        } else {
            params_.i_ls_amp = e.value;
        }
        props_ = sim::ModePropagators(params_);
    }

    [[nodiscard]] double output_voltage() const { return x_[state_index::kVO]; }
    [[nodiscard]] double output_current() const { return x_[state_index::kVO] * params_.g_load(); }
    [[nodiscard]] double regulated() const {
        return regulation_ == LoopKind::kCurrent ? output_current() : output_voltage();
    }

    /// Samples, updates D, and advances one period. Returns the applied D.
    PhaseShift step(double t) {
        const control::PIStepResult r = control::pi_step(pi_, gains_, reference_ - regulated());
        pi_ = r.state;
        d_ = pwm::quantize(r.d_command, ticks_);
        x_ = props_.advance_period(x_, d_);
        if (!x_.allFinite()) {
            std::ostringstream msg;
            msg << "closed-loop plant diverged at t = " << t << " s";
            throw ConvergenceError(msg.str());
        }
        return d_;
    }

    [[nodiscard]] const ReceiverParams& params() const noexcept { return params_; }
    [[nodiscard]] const control::PIState& pi_state() const noexcept { return pi_; }

private:
    ReceiverParams params_;
    sim::ModePropagators props_;
    control::PIGains gains_;
    LoopKind regulation_;
    double reference_;
    int ticks_;
    Vec5 x_ = Vec5::Zero();
    control::PIState pi_;
    PhaseShift d_;
};

double tail_mean(std::span<const double> ys, std::size_t count) {
    count = std::clamp<std::size_t>(count, 1, ys.size());
    const auto tail = ys.last(count);
    return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(count);
}

EventMetrics window_metrics(std::span<const double> ys, double t_event, double ts, double reference, double band,
                            std::size_t tail_count) {
    EventMetrics m;
    m.time = t_event;
    const double tol = band * std::abs(reference);
    std::optional<std::size_t> last_outside;
    double extreme = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double dev = ys[i] - reference;
        if (std::abs(dev) > std::abs(extreme)) {
            extreme = dev;
        }
        if (std::abs(dev) > tol) {
            last_outside = i;
        }
    }
    m.extreme_deviation = extreme;
    if (!last_outside) {
        m.settling_time = 0.0;
    } else if (*last_outside + 1 >= ys.size()) {
        m.settling_time = std::numeric_limits<double>::quiet_NaN();
    } else {
        m.settling_time = static_cast<double>(*last_outside + 1) * ts;
    }

    // Sign reversals of the deviation with half-band hysteresis: one or two
    // for a damped step response, many for a sustained oscillation.
    const double hyst = 0.5 * tol;
    int side = 0;
    for (double y : ys) {
        const double dev = y - reference;
        const int now = dev > hyst ? 1 : (dev < -hyst ? -1 : side);
        if (side != 0 && now != side) {
            ++m.oscillation_reversals;
        }
        side = now;
    }
    m.steady_state_error = std::abs(tail_mean(ys, tail_count) - reference);
    return m;
}

} // namespace

void Scenario::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ValidationError("scenario duration must be > 0");
    }
    if (!std::isfinite(reference) || !(reference > 0.0)) {
        throw ValidationError("scenario reference must be > 0");
    }
    double prev = 0.0;
    for (const Event& e : events) {
        if (!(e.time >= prev) || !(e.time <= duration)) {
            throw ValidationError("scenario events must be ascending and within the duration");
        }
        if (!(e.value > 0.0) && !(e.kind == Event::Kind::kSourceAmplitude && e.value == 0.0)) {
            throw ValidationError("scenario event values must be > 0 (source amplitude may be 0)");
        }
        prev = e.time;
    }
}

TransientResult run_transient(const ReceiverParams& p, const control::PIGains& gains, const Scenario& scenario,
                              const TransientOptions& opts) {
    p.validate();
    scenario.validate();
    if (opts.record_every < 1 || !(opts.band > 0.0) || !(opts.tail_window > 0.0)) {
        throw ValidationError("transient options: record_every >= 1, band > 0, tail_window > 0");
    }

    const double ts = p.period();
    const auto n_periods = static_cast<std::size_t>(std::llround(scenario.duration / ts));
    const auto tail_count = static_cast<std::size_t>(std::max(1.0, std::round(opts.tail_window / ts)));

    LoopRunner runner(p, gains, scenario.regulation, scenario.reference, opts.ticks_per_period);
    if (opts.settled_start) {
        (void)runner.settle_at_reference();
    }

    std::vector<std::size_t> event_period;
    event_period.reserve(scenario.events.size());
    for (const Event& e : scenario.events) {
        event_period.push_back(std::min(static_cast<std::size_t>(std::llround(e.time / ts)), n_periods));
    }

    TransientResult out;
    std::vector<double> regulated(n_periods);
    std::size_t next_event = 0;
    for (std::size_t n = 0; n < n_periods; ++n) {
        while (next_event < scenario.events.size() && event_period[next_event] == n) {
            runner.apply(scenario.events[next_event]);
            ++next_event;
        }
        const double t = static_cast<double>(n) * ts;
        const double v_o = runner.output_voltage();
        const double i_o = runner.output_current();
        regulated[n] = runner.regulated();
        const PhaseShift d = runner.step(t);
        out.max_abs_integrator = std::max(out.max_abs_integrator, std::abs(runner.pi_state().integrator));
        if (n % static_cast<std::size_t>(opts.record_every) == 0) {
            out.t.push_back(t);
            out.v_o.push_back(v_o);
            out.i_o.push_back(i_o);
            out.d_command.push_back(d.value());
            out.integrator.push_back(runner.pi_state().integrator);
        }
    }

    for (std::size_t e = 0; e < scenario.events.size(); ++e) {
        const std::size_t begin = event_period[e];
        const std::size_t end = e + 1 < scenario.events.size() ? event_period[e + 1] : n_periods;
        if (begin >= end) {
            EventMetrics m;
            m.time = static_cast<double>(begin) * ts;
            m.settling_time = std::numeric_limits<double>::quiet_NaN();
            out.events.push_back(m);
            continue;
        }
        const std::span<const double> window(regulated.data() + begin, end - begin);
        out.events.push_back(window_metrics(window, static_cast<double>(begin) * ts, ts, scenario.reference,
                                            opts.band, tail_count));
    }
    out.final_value = tail_mean(regulated, tail_count);
    out.steady_state_error = std::abs(out.final_value - scenario.reference);
    return out;
}

std::vector<RegulationPoint> regulation_sweep(const ReceiverParams& p, const control::PIGains& gains,
                                              LoopKind regulation, double reference, SweepAxis axis,
                                              std::span<const double> grid, const RegulationOptions& opts,
                                              Execution exec) {
    p.validate();
    if (!(reference > 0.0)) {
        throw ValidationError("regulation_sweep: reference must be > 0");
    }
    const double ts = p.period();
    const auto chunk = static_cast<std::size_t>(std::llround(opts.run_time / ts));
    const auto tail_count = static_cast<std::size_t>(std::max(1.0, std::round(opts.transient.tail_window / ts)));

    std::vector<RegulationPoint> out(grid.size());
    for_each_index(grid.size(), exec, [&](std::size_t i) {
        const double value = grid[i];
        if (!(value > 0.0)) {
            throw ValidationError("regulation_sweep: grid values must be > 0");
        }
        ReceiverParams q = p;
        if (axis == SweepAxis::kLoadPower) {
            q.r_load = p.r_load / value;
        } else {
            q.i_ls_amp = p.i_ls_amp * value;
        }

        RegulationPoint& pt = out[i];
        pt.axis_value = value;
        pt.r_load = q.r_load;
        pt.i_ls_amp = q.i_ls_amp;

        LoopRunner runner(q, gains, regulation, reference, opts.transient.ticks_per_period);
        pt.d_predicted = runner.predicted_phase();
        pt.reachable = runner.settle_at_reference();

        std::vector<double> ys(chunk);
        std::vector<double> ds(chunk);
        double previous = std::numeric_limits<double>::quiet_NaN();
        for (int c = 0; c < opts.max_chunks; ++c) {
            for (std::size_t n = 0; n < chunk; ++n) {
                ys[n] = runner.regulated();
                ds[n] = runner.step(static_cast<double>(c * chunk + n) * ts).value();
            }
            const double mean = tail_mean(ys, tail_count);
            pt.settled_value = mean;
            pt.d_settled = tail_mean(ds, tail_count);
            if (!std::isnan(previous) && std::abs(mean - previous) <= opts.convergence_tol * reference) {
                pt.converged = true;
                break;
            }
            previous = mean;
        }
        pt.relative_error = std::abs(pt.settled_value - reference) / reference;
    });
    return out;
}

} // namespace wpt::loop

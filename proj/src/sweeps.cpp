#include "wpt/sweeps.hpp"

#include "wpt/analytics.hpp"
#include "wpt/error.hpp"
#include "wpt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wpt::sweep {

std::vector<PhaseSweepPoint> sweep_phase(const ReceiverParams& p, std::span<const double> d_grid, Execution exec) {
    const sim::ModePropagators props(p);
    std::vector<PhaseSweepPoint> out(d_grid.size());
    for_each_index(d_grid.size(), exec, [&](std::size_t i) {
        const PhaseShift d(d_grid[i]);
        const analytics::OperatingPoint op = analytics::output_operating_point(p, d);
        const sim::SteadyState ss = sim::periodic_steady_state(props, d);
        PhaseSweepPoint& pt = out[i];
        pt.d = d.value();
        pt.i_o_law = op.i_o;
        pt.v_o_law = op.v_o;
        pt.v_o_sim = ss.x0.v_o;
        pt.i_o_sim = ss.x0.v_o * p.g_load();
        pt.p_in_sim = sim::power_balance(ss, p).input;
        pt.zvs_residual = sim::zvs_metrics(ss, p).max_relative_residual();
    });
    return out;
}

std::vector<ZvsPoint> zvs_grid(const ReceiverParams& p, std::span<const double> loads, std::span<const double> ds,
                               Execution exec) {
    std::vector<ZvsPoint> out(loads.size() * ds.size());
    for_each_index(loads.size(), exec, [&](std::size_t il) {
        ReceiverParams q = p;
        q.r_load = loads[il];
        const sim::ModePropagators props(q);
        for (std::size_t id = 0; id < ds.size(); ++id) {
            const sim::SteadyState ss = sim::periodic_steady_state(props, PhaseShift(ds[id]));
            const sim::ZvsReport z = sim::zvs_metrics(ss, q);
            out[il * ds.size() + id] = {q.r_load, ds[id], z.max_relative_residual(), z.discarded_energy_per_cycle};
        }
    });
    return out;
}

std::vector<FrequencyResponsePoint> frequency_response(const ReceiverParams& p, control::LoopKind kind,
                                                       PhaseShift d_op, std::span<const double> frequencies,
                                                       const FrequencyResponseOptions& opts, Execution exec) {
    p.validate();
    if (std::isinf(p.r_load)) {
        throw ValidationError("frequency_response needs a finite load");
    }
    if (!(opts.amplitude > 0.0) || d_op.value() - opts.amplitude < 0.0 ||
        d_op.value() + opts.amplitude > PhaseShift::kMax) {
        throw ValidationError("frequency_response: perturbation leaves the D range");
    }
    const sim::ModePropagators props(p);
    const sim::SteadyState ss = sim::periodic_steady_state(props, d_op);
    const double tau = p.r_load * p.c_o;
    const auto settle = static_cast<long long>(std::ceil(opts.settle_time_constants * tau * p.fs));

    std::vector<FrequencyResponsePoint> out(frequencies.size());
    for_each_index(frequencies.size(), exec, [&](std::size_t i) {
        const double f_req = frequencies[i];
        if (!(f_req > 0.0) || !(f_req < 0.5 * p.fs)) {
            throw ValidationError("frequency_response: frequencies must lie in (0, fs/2)");
        }
        // Window of `cycles` perturbation cycles spanning `periods` switching periods.
        long long cycles = opts.min_cycles;
        cycles = std::max<long long>(cycles, static_cast<long long>(std::ceil(opts.min_periods * f_req / p.fs)));
        const auto periods = std::max<long long>(1, std::llround(static_cast<double>(cycles) * p.fs / f_req));
        const double f = static_cast<double>(cycles) * p.fs / static_cast<double>(periods);
        const double w_step = kTwoPi * f / p.fs;

        Vec5 x = ss.x0.to_vec();
        std::complex<double> acc_out{0.0, 0.0};
        std::complex<double> acc_in{0.0, 0.0};
        const long long total = settle + periods;
        for (long long n = 0; n < total; ++n) {
            const double pert = opts.amplitude * std::sin(w_step * static_cast<double>(n));
            if (n >= settle) {
                const double y = kind == control::LoopKind::kCurrent ? x[state_index::kVO] / p.r_load
                                                                     : x[state_index::kVO];
                const double phase = -w_step * static_cast<double>(n - settle);
                const std::complex<double> rot(std::cos(phase), std::sin(phase));
                acc_out += y * rot;
                acc_in += pert * rot;
            }
            x = props.advance_period(x, PhaseShift(d_op.value() + pert));
        }
        // D is held over a whole period, so its sample sits at the period's
        // midpoint while outputs are read at period starts.
        const std::complex<double> h = acc_out / acc_in * std::polar(1.0, 0.5 * w_step);
        FrequencyResponsePoint& pt = out[i];
        pt.f = f;
        pt.h = h;
        pt.mag_db = 20.0 * std::log10(std::abs(h));
        pt.phase_deg = std::arg(h) * 180.0 / std::numbers::pi;
    });
    return out;
}

} // namespace wpt::sweep

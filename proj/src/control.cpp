#include "wpt/control.hpp"

#include "wpt/analytics.hpp"
#include "wpt/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace wpt::control {

TransferFunction1P current_tf(const ReceiverParams& p, PhaseShift d_op) {
    p.validate();
    if (std::isinf(p.r_load)) {
        throw ValidationError("small-signal model needs a finite load resistance");
    }
    TransferFunction1P tf;
    tf.kind = LoopKind::kCurrent;
    tf.dc_gain = analytics::kPlantGain * p.i_ls_amp * std::cos(d_op.angle());
    tf.time_constant = p.r_load * p.c_o;
    return tf;
}

TransferFunction1P voltage_tf(const ReceiverParams& p, PhaseShift d_op) {
    TransferFunction1P tf = current_tf(p, d_op);
    tf.kind = LoopKind::kVoltage;
    tf.dc_gain *= p.r_load;
    return tf;
}

TransferFunction1P plant_tf(LoopKind kind, const ReceiverParams& p, PhaseShift d_op) {
    return kind == LoopKind::kCurrent ? current_tf(p, d_op) : voltage_tf(p, d_op);
}

std::vector<BodePoint> bode_points(const TransferFunction1P& tf, std::span<const double> frequencies) {
    std::vector<BodePoint> out;
    out.reserve(frequencies.size());
    for (double f : frequencies) {
        if (!(f > 0.0)) {
            throw ValidationError("bode_points: frequencies must be > 0");
        }
        const std::complex<double> h =
            tf.dc_gain / std::complex<double>(1.0, kTwoPi * f * tf.time_constant);
        const double mag = std::abs(h);
        out.push_back({f, mag > 0.0 ? 20.0 * std::log10(mag) : -std::numeric_limits<double>::infinity(),
                       std::arg(h) * 180.0 / std::numbers::pi});
    }
    return out;
}

PIGains design_pi(LoopKind kind, const ReceiverParams& p, double f_c, PhaseShift d_op, double r_l_nominal,
                  const PIDesignOptions& opts) {
    p.validate();
    if (!(f_c > 0.0) || !(f_c < p.fs / 10.0)) {
        throw ValidationError("design_pi: crossover must lie in (0, fs/10)");
    }
    if (!(r_l_nominal > 0.0) || !std::isfinite(r_l_nominal)) {
        throw ValidationError("design_pi: nominal load must be finite and > 0");
    }
    if (!(opts.fc_multiplier > 0.0)) {
        throw ValidationError("design_pi: fc_multiplier must be > 0");
    }
    const double plant = analytics::kGammaApprox * p.i_ls_amp * std::cos(d_op.angle());
    if (!(std::abs(plant) > 1e-12)) {
        throw ValidationError("design_pi: plant gain vanishes at this operating point (D = 0.25 or |I_Ls| = 0)");
    }
    const double fc = f_c * opts.fc_multiplier;
    PIGains g;
    g.kind = kind;
    g.kp = kind == LoopKind::kCurrent ? fc * p.c_o * r_l_nominal / plant : fc * p.c_o / plant;
    g.ki = g.kp / (r_l_nominal * p.c_o);
    return g;
}

PIGains tustin_discretize(const PIGains& gains, double t_samp) {
    if (!(t_samp > 0.0)) {
        throw ValidationError("tustin_discretize: t_samp must be > 0");
    }
    PIGains out = gains;
    out.t_samp = t_samp;
    out.b0 = gains.kp + 0.5 * gains.ki * t_samp;
    out.b1 = -gains.kp + 0.5 * gains.ki * t_samp;
    return out;
}

PIStepResult pi_step(const PIState& state, const PIGains& gains, double error) {
    if (!std::isfinite(error)) {
        throw ValidationError("pi_step: non-finite error");
    }
    if (!gains.discretized()) {
        throw ValidationError("pi_step: gains are not discretized");
    }
    // Trapezoidal integrator; kp e + I reproduces b0 e[n] + b1 e[n-1] increments.
    const double candidate = state.integrator + 0.5 * gains.ki * gains.t_samp * (error + state.prev_error);
    const double unclamped = gains.kp * error + candidate;

    double integrator = candidate;
    if (gains.anti_windup) {
        const bool push_high = unclamped > PhaseShift::kMax && error > 0.0;
        const bool push_low = unclamped < 0.0 && error < 0.0;
        if (push_high || push_low) {
            integrator = state.integrator;
        }
    }
    const double raw = gains.kp * error + integrator;
    const double clamped = std::clamp(raw, 0.0, PhaseShift::kMax);

    PIStepResult r;
    r.d_command = PhaseShift(clamped);
    r.state.integrator = integrator;
    r.state.prev_error = error;
    r.state.last_output_saturated = raw != clamped;
    return r;
}

} // namespace wpt::control

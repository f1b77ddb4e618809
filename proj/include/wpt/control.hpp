#pragma once

// =============================================================================
// Small-signal plant models and the PI regulator
// =============================================================================
// Averaged output dynamics: R_L C_o di_o/dt = 1.58 |I_Ls| sin(2 pi D) - i_o.
// Linearized about D gives a first-order lag with DC gain
// 2 pi 1.58 |I_Ls| cos(2 pi D) (per unit D) and time constant R_L C_o.
// The regulator is a Tustin-discretized PI clamped to the D range with
// conditional-integration anti-windup.
// =============================================================================

#include "wpt/circuit_model.hpp"

#include <span>
#include <vector>

namespace wpt::control {

enum class LoopKind { kCurrent, kVoltage };

struct TransferFunction1P {
    double dc_gain = 0.0;       ///< output unit per unit D
    double time_constant = 0.0; ///< s
    LoopKind kind = LoopKind::kCurrent;

    /// Pole frequency 1 / (2 pi tau) in Hz.
    [[nodiscard]] double pole_hz() const noexcept { return 1.0 / (kTwoPi * time_constant); }
};

[[nodiscard]] TransferFunction1P current_tf(const ReceiverParams& p, PhaseShift d_op);
[[nodiscard]] TransferFunction1P voltage_tf(const ReceiverParams& p, PhaseShift d_op);
[[nodiscard]] TransferFunction1P plant_tf(LoopKind kind, const ReceiverParams& p, PhaseShift d_op);

struct BodePoint {
    double f = 0.0;
    double mag_db = 0.0;
    double phase_deg = 0.0;
};

[[nodiscard]] std::vector<BodePoint> bode_points(const TransferFunction1P& tf, std::span<const double> frequencies);

struct PIGains {
    double kp = 0.0;
    double ki = 0.0;       ///< 1/s
    LoopKind kind = LoopKind::kCurrent;
    // Tustin form u[n] = u[n-1] + b0 e[n] + b1 e[n-1]; zero until discretized.
    double t_samp = 0.0;
    double b0 = 0.0;
    double b1 = 0.0;
    bool anti_windup = true; ///< test hook; production loops keep it on

    [[nodiscard]] bool discretized() const noexcept { return t_samp > 0.0; }
};

struct PIDesignOptions {
    /// Multiplier on f_c; 1 keeps the crossover in Hz, 2 pi treats it as rad/s.
    double fc_multiplier = 1.0;
};

/// Gains that cancel the plant pole and cross over at f_c:
///   current: kp = f_c C_o R_nom / (1.58 |I_Ls| cos(2 pi D))
///   voltage: kp = f_c C_o       / (1.58 |I_Ls| cos(2 pi D))
///   both:    ki = kp / (R_nom C_o)
[[nodiscard]] PIGains design_pi(LoopKind kind, const ReceiverParams& p, double f_c, PhaseShift d_op,
                                double r_l_nominal, const PIDesignOptions& opts = {});

/// Bilinear transform of kp + ki/s at t_samp.
[[nodiscard]] PIGains tustin_discretize(const PIGains& gains, double t_samp);

struct PIState {
    double integrator = 0.0;
    double prev_error = 0.0;
    bool last_output_saturated = false;
};

struct PIStepResult {
    PhaseShift d_command;
    PIState state;
};

/// One controller update. Output clamped to [0, 0.25]; while the unclamped
/// output exceeds a limit and the error pushes further past it, the
/// integrator holds its value. Throws ValidationError on a non-finite error
/// or non-discretized gains.
[[nodiscard]] PIStepResult pi_step(const PIState& state, const PIGains& gains, double error);

} // namespace wpt::control

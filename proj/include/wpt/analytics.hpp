#pragma once

// Closed-form steady-state laws of the receiver and harmonic analysis.

#include "wpt/circuit_model.hpp"
#include "wpt/simulator.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace wpt::analytics {

/// Rounded gamma of the output law; used verbatim by the
/// output law and the control-design formulas.
inline constexpr double kGammaApprox = 1.58;
/// Linearized plant gain d(i_o)/dD per unit |I_Ls|: 2 pi * 1.58 (9.93 when rounded).
inline constexpr double kPlantGain = kTwoPi * kGammaApprox;

inline constexpr int kDefaultHarmonics = 40;

struct AnalyticWaveforms {
    double v_c1 = 0.0;
    double v_c2 = 0.0;
    double v_ac = 0.0;
};

/// Resonant angular rate 1/sqrt(L (C_AC + C_f)(1 - k^2)) in rad/s.
[[nodiscard]] double resonant_rate(const ReceiverParams& p);

/// Piecewise-cosine capacitor voltages at time t (folded into one period),
/// using p.v_o_ref as the output voltage. v_c2 is v_c1 shifted by Ts/2 and
/// v_ac = v_c1 - v_c2 carries no DC term.
[[nodiscard]] AnalyticWaveforms analytic_waveforms(const ReceiverParams& p, double t);

/// Resonant voltage amplitude V_m; DegenerateDesignError at a secant pole.
[[nodiscard]] double vm(const ReceiverParams& p);

/// Exact gamma; DegenerateDesignError when the resonance denominator vanishes.
[[nodiscard]] double gamma(const ReceiverParams& p);

struct RealPower {
    double p = 0.0;
    double p_max = 0.0;
};

/// Received AC power at the nominal output voltage, exact gamma.
[[nodiscard]] RealPower real_power(const ReceiverParams& p, PhaseShift d);

struct OperatingPoint {
    double p = 0.0;      ///< W
    double p_max = 0.0;  ///< W
    double i_o = 0.0;    ///< A
    double v_o = 0.0;    ///< V
    double gamma = 0.0;
    double v_m = 0.0;    ///< V
};

/// Output law i_o = 1.58 |I_Ls| sin(2 pi D), v_o = i_o R_L.
[[nodiscard]] OperatingPoint output_operating_point(const ReceiverParams& p, PhaseShift d);

/// Phase shift that yields the requested output current under the output
/// law, or NaN when the target exceeds the 1.58 |I_Ls| ceiling.
[[nodiscard]] double phase_for_current(const ReceiverParams& p, double i_o_target);

struct Spectrum {
    double f0 = 0.0;
    std::vector<double> mags; ///< mags[h] = amplitude of harmonic h; mags[0] is the DC level
    double thd = 0.0;

    [[nodiscard]] int harmonics() const noexcept { return static_cast<int>(mags.size()) - 1; }
    /// Largest even-harmonic amplitude relative to the fundamental.
    [[nodiscard]] double max_even_ratio() const;
};

/// Single-bin DFT amplitudes at h * f0, h = 0..n_harmonics. The samples must
/// cover an integer number of periods of f0 (ValidationError otherwise).
[[nodiscard]] Spectrum spectrum(std::span<const double> samples, double dt, double f0,
                                int n_harmonics = kDefaultHarmonics);
[[nodiscard]] Spectrum spectrum(const sim::Waveform& w, std::string_view channel, double f0,
                                int n_harmonics = kDefaultHarmonics);

/// THD from harmonic amplitudes: sqrt(sum_{h>=2} m_h^2) / m_1.
[[nodiscard]] double thd_from_mags(std::span<const double> mags);

} // namespace wpt::analytics

#pragma once

// =============================================================================
// Switched-linear simulator
// =============================================================================
// Two engines integrate the per-mode linear dynamics:
//   - integrate():        fixed-step RK4 with the source evaluated in time,
//   - exact_propagate():  matrix exponential of the autonomous 7-state system
//                         [x; c; s] where (c, s) is a harmonic oscillator at
//                         2 pi fs whose first component is i_Ls.
// Mode boundaries are clocked at half periods. At each switch instant the
// capacitor of the leg whose switch turns on is reset to zero and its stored
// charge energy is discarded (ideal switch, no body diode).
// =============================================================================

#include "wpt/circuit_model.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace wpt::sim {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;

inline constexpr int kDefaultStepsPerPeriod = 1024;

/// Uniformly sampled channels. v_ac and i_lm are derived on access.
struct Waveform {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> i_l1;
    std::vector<double> i_l2;
    std::vector<double> v_c1;
    std::vector<double> v_c2;
    std::vector<double> v_o;
    std::vector<double> i_ls;

    static constexpr std::array<std::string_view, 7> kChannelNames{
        "i_l1", "i_l2", "v_c1", "v_c2", "v_o", "i_ls", "v_ac"};

    [[nodiscard]] std::size_t size() const noexcept { return i_l1.size(); }
    [[nodiscard]] double time(std::size_t i) const noexcept { return t0 + dt * static_cast<double>(i); }
    [[nodiscard]] std::vector<double> v_ac() const;
    [[nodiscard]] std::vector<double> i_lm() const;
    /// Any of kChannelNames, or "i_lm". Throws ValidationError otherwise.
    [[nodiscard]] std::vector<double> channel(std::string_view name) const;

    void reserve(std::size_t n);
    void push(const StateVector& x, double i_ls_value);
    [[nodiscard]] StateVector state(std::size_t i) const;
    /// Throws ValidationError when channel lengths differ, N < 2, or dt <= 0.
    void validate() const;
};

struct Trajectory {
    Waveform waveform;             ///< samples at t0 + i dt, i < n_periods * steps_per_period
    StateVector final_state;       ///< state at the end of the last period (after its clamp)
    std::vector<double> clamped_voltages; ///< voltage reset at every switch instant, in order
    double discarded_energy = 0.0; ///< sum of C'v^2/2 over all resets (J)
};

/// Cached per-mode exponentials for one parameter set. D does not enter the
/// augmented matrices (only the oscillator's initial phase), so a single
/// cache serves every phase shift.
class ModePropagators {
public:
    explicit ModePropagators(const ReceiverParams& p);

    [[nodiscard]] const ReceiverParams& params() const noexcept { return params_; }
    [[nodiscard]] const Mat7& augmented(Mode m) const { return m == Mode::kModeI ? aug_[0] : aug_[1]; }
    /// exp(augmented(m) * Ts/2).
    [[nodiscard]] const Mat7& half_period(Mode m) const { return m == Mode::kModeI ? half_[0] : half_[1]; }
    /// Affine map over one period including both clamp projections, acting on
    /// [x(nTs); osc(nTs)]. The oscillator block is the identity.
    [[nodiscard]] const Mat7& period_map() const noexcept { return period_; }
    [[nodiscard]] Mat7 exp(Mode m, double tau) const;

    /// Oscillator state [c, s] at absolute time t for phase shift d.
    [[nodiscard]] Eigen::Vector2d oscillator(PhaseShift d, double t) const;

    /// One full period from a mode-I boundary; returns the next boundary state.
    [[nodiscard]] Vec5 advance_period(const Vec5& x, PhaseShift d) const;

private:
    ReceiverParams params_;
    std::array<Mat7, 2> aug_;
    std::array<Mat7, 2> half_;
    Mat7 period_;
};

/// Fixed-step RK4 over n_periods starting at t = 0 (a mode-I boundary).
/// steps_per_period must be even so switch instants fall on the grid.
[[nodiscard]] Trajectory integrate(const ReceiverParams& p, PhaseShift d, const StateVector& x0,
                                   int n_periods, int steps_per_period = kDefaultStepsPerPeriod);

/// Exact solution over [t_from, t_to] inside a single mode interval.
[[nodiscard]] StateVector exact_propagate(const ReceiverParams& p, PhaseShift d, const StateVector& x0,
                                          double t_from, double t_to);
[[nodiscard]] StateVector exact_propagate(const ModePropagators& props, PhaseShift d, const StateVector& x0,
                                          double t_from, double t_to);

/// Samples n_periods from a mode-I boundary with the exact per-step exponentials.
[[nodiscard]] Trajectory sample_exact(const ModePropagators& props, PhaseShift d, const StateVector& x0,
                                      int n_periods, int steps_per_period = kDefaultStepsPerPeriod);

struct SteadyState {
    StateVector x0;           ///< state at t = nTs (mode-I entry, after clamp)
    StateVector mid_period;   ///< state at (n+0.5)Ts before the v_c1 reset
    StateVector period_end;   ///< state at (n+1)Ts before the v_c2 reset
    Waveform waveform;        ///< one period, x0 at sample 0
    double residual = 0.0;    ///< |x(Ts) - x0| / |x0| (absolute when x0 = 0)
    PhaseShift d;
};

struct SteadyStateOptions {
    int steps_per_period = kDefaultStepsPerPeriod;
    double tolerance = 1e-9;
};

/// Solves the linear fixed point (I - Phi) x0 = w of the affine period map.
/// Throws ConvergenceError for a singular map or a residual above tolerance.
[[nodiscard]] SteadyState periodic_steady_state(const ReceiverParams& p, PhaseShift d,
                                                const SteadyStateOptions& opts = {});
[[nodiscard]] SteadyState periodic_steady_state(const ModePropagators& props, PhaseShift d,
                                                const SteadyStateOptions& opts = {});

/// Capacitor voltages at the four switch instants. S1 turns off at nTs and on
/// at (n+0.5)Ts; S2 the reverse.
struct ZvsReport {
    double v_at_s1_on = 0.0;
    double v_at_s1_off = 0.0;
    double v_at_s2_on = 0.0;
    double v_at_s2_off = 0.0;
    double discarded_energy_per_cycle = 0.0; ///< J
    double v_peak = 0.0;                     ///< max resonant capacitor voltage over the period

    /// Largest |v| at a switch instant relative to v_peak (0 when v_peak = 0).
    [[nodiscard]] double max_relative_residual() const noexcept;
};

[[nodiscard]] ZvsReport zvs_metrics(const SteadyState& ss, const ReceiverParams& p);

struct RippleReport {
    double i_lm_pp = 0.0; ///< A, summed inductor current
    double v_o_pp = 0.0;  ///< V
    double i_lx_pp = 0.0; ///< A, larger of the two leg currents
};

[[nodiscard]] RippleReport ripple_metrics(const SteadyState& ss);

struct PowerBalance {
    double input = 0.0;    ///< period average of v_ac * i_ls (W)
    double load = 0.0;     ///< period average of v_o^2 / R_L (W)
    double clamp = 0.0;    ///< discarded switch energy per period / Ts (W)
};

[[nodiscard]] PowerBalance power_balance(const SteadyState& ss, const ReceiverParams& p);

[[nodiscard]] double peak_to_peak(std::span<const double> xs);

} // namespace wpt::sim

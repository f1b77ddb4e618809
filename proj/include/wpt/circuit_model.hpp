#pragma once

// =============================================================================
// Circuit model of the differential class-E receiver
// =============================================================================
// The receiver coil/compensation pair is an ideal sinusoidal current source
// i_Ls = |I_Ls| cos(2 pi fs t - 2 pi D) feeding two mirrored class-E legs that
// share a coupled inductor (L1 = L2 = L, mutual kL) and an output capacitor.
// The two complementary switches split every period into two linear modes:
//
//   Mode I  [nTs, (n+0.5)Ts):  S2 on, v_Cf2 = 0, leg 1 resonates
//   Mode II [(n+0.5)Ts, (n+1)Ts): S1 on, v_Cf1 = 0, leg 2 resonates
//
// State ordering everywhere: [i_l1, i_l2, v_c1, v_c2, v_o].
// =============================================================================

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace wpt {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

namespace state_index {
inline constexpr int kIL1 = 0;
inline constexpr int kIL2 = 1;
inline constexpr int kVC1 = 2;
inline constexpr int kVC2 = 3;
inline constexpr int kVO = 4;
} // namespace state_index

/// All electrical constants of the receiver, SI units.
struct ReceiverParams {
    double fs = 200e3;        ///< switching frequency (Hz)
    double i_ls_amp = 1.27;   ///< amplitude of the induced source current (A)
    double l = 22.25e-6;      ///< self-inductance of each coupled winding (H)
    double k = 0.71;          ///< coupling coefficient
    double c_f = 47e-9;       ///< per-leg capacitance (F)
    double c_ac = 2e-9;       ///< differential capacitance (F)
    double c_o = 6800e-6;     ///< output capacitance (F)
    double r_load = 6.0;      ///< load resistance (ohm); +inf means open load
    double v_o_ref = 12.0;    ///< nominal output voltage (V)

    /// Throws ValidationError on any violated invariant.
    void validate() const;

    [[nodiscard]] double period() const noexcept { return 1.0 / fs; }
    /// Per-mode resonant capacitance C_AC + C_f.
    [[nodiscard]] double c_res() const noexcept { return c_ac + c_f; }
    /// Effective resonant inductance L(1 - k^2).
    [[nodiscard]] double l_eff() const noexcept { return l * (1.0 - k * k); }
    /// Load conductance; zero for an open load.
    [[nodiscard]] double g_load() const noexcept { return std::isinf(r_load) ? 0.0 : 1.0 / r_load; }
};

/// Prototype receiver components, 12 V / 2 A rating.
/// |I_Ls| is back-solved from the 2 A output ceiling (2 / 1.58).
[[nodiscard]] ReceiverParams prototype_params();

/// Phase-shift ratio D in [0, 0.25].
class PhaseShift {
public:
    static constexpr double kMax = 0.25;

    PhaseShift() = default;
    explicit PhaseShift(double d);

    [[nodiscard]] double value() const noexcept { return d_; }
    [[nodiscard]] double angle() const noexcept { return kTwoPi * d_; }

    friend bool operator==(PhaseShift, PhaseShift) = default;

private:
    double d_ = 0.0;
};

enum class Mode { kModeI, kModeII };

/// Mode active at absolute time t (t >= 0).
[[nodiscard]] Mode mode_at(const ReceiverParams& p, double t);

struct StateVector {
    double i_l1 = 0.0;
    double i_l2 = 0.0;
    double v_c1 = 0.0;
    double v_c2 = 0.0;
    double v_o = 0.0;

    [[nodiscard]] Vec5 to_vec() const { return Vec5{i_l1, i_l2, v_c1, v_c2, v_o}; }
    [[nodiscard]] static StateVector from_vec(const Vec5& x) { return {x[0], x[1], x[2], x[3], x[4]}; }
    /// Exchange leg 1 and leg 2.
    [[nodiscard]] StateVector swapped_legs() const { return {i_l2, i_l1, v_c2, v_c1, v_o}; }
    [[nodiscard]] double i_lm() const noexcept { return i_l1 + i_l2; }

    friend bool operator==(const StateVector&, const StateVector&) = default;
};

/// dx/dt = a x + b i_ls within one mode.
struct LinearDynamics {
    Mat5 a = Mat5::Zero();
    Vec5 b = Vec5::Zero();
    Mode mode = Mode::kModeI;

    [[nodiscard]] Vec5 rates(const Vec5& x, double i_ls) const { return a * x + b * i_ls; }
};

/// |I_Ls| cos(2 pi fs t - 2 pi D).
[[nodiscard]] double source_current(const ReceiverParams& p, PhaseShift d, double t);

/// Explicit per-mode state equations. The coupled-inductor pair is inverted
/// analytically (determinant L^2 (1 - k^2)). In Mode II the source current
/// enters leg 2 with the opposite sign: it flows into node A and returns
/// through node B, so the current charging C_f2 is -i_Ls.
[[nodiscard]] LinearDynamics assemble_mode_dynamics(const ReceiverParams& p, Mode mode);

/// Total stored energy: capacitors, coupled inductor, and output capacitor.
[[nodiscard]] double stored_energy(const ReceiverParams& p, const StateVector& x);

} // namespace wpt

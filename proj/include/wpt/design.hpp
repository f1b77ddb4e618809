#pragma once

// =============================================================================
// Reactive-component and magnetic design
// =============================================================================
// Sizing flow: pick (k, L) inside the feasible region, solve alpha(k), size
// the resonant capacitance so each leg's capacitor rings back to zero at the
// half-period, then split it between C_AC and C_f. The coupled inductor is
// realized on a three-leg core through its reluctance network.
// =============================================================================

#include "wpt/circuit_model.hpp"
#include "wpt/parallel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wpt::design {

struct DesignSpec {
    double v_o_nom = 12.0;       ///< V
    double i_o_nom = 2.0;        ///< A
    double fs = 200e3;           ///< Hz
    double i_ls_amp = 2.0 / 1.58; ///< A
    double ripple_percent = 40.0; ///< allowed i_LM ripple, percent of i_o_nom

    void validate() const;
};

struct InductanceBounds {
    double lower = 0.0; ///< H, bound on L(1 - k^2)
    double upper = 0.0; ///< H
};

/// v_o / (40 fs |I_Ls|) < L(1 - k^2) < v_o / (4 fs |I_Ls|).
[[nodiscard]] InductanceBounds inductance_bounds(const DesignSpec& spec);

/// Minimum mutual inductance kL for the ripple target.
[[nodiscard]] double ripple_bound(const DesignSpec& spec);

/// True when (k, L) satisfies both the inductance window and the ripple bound.
[[nodiscard]] bool is_feasible(const DesignSpec& spec, double k, double l);

struct FeasibleRegion {
    std::vector<double> k_grid;
    std::vector<double> l_grid;
    std::vector<std::uint8_t> cells; ///< row-major, rows = k, cols = L

    [[nodiscard]] bool at(std::size_t ik, std::size_t il) const { return cells.at(ik * l_grid.size() + il) != 0; }
    [[nodiscard]] std::size_t count() const;
};

/// Grids must be ascending (ValidationError otherwise).
[[nodiscard]] FeasibleRegion feasible_region(const DesignSpec& spec, std::span<const double> k_grid,
                                             std::span<const double> l_grid,
                                             Execution exec = Execution::kParallel);

/// Root of (1-k)/(1+k) tan(pi a / 2) + pi a / 2 = 0 on (1, 2), by bisection.
[[nodiscard]] double solve_alpha(double k);

/// Transcendental residual used by solve_alpha.
[[nodiscard]] double alpha_residual(double k, double alpha);

/// C_AC + C_f = 1 / (4 pi^2 fs^2 alpha^2 L (1 - k^2)).
[[nodiscard]] double resonant_capacitance(double l, double k, double fs);

struct CapacitanceSplit {
    double c_ac = 0.0;
    double c_f = 0.0;
};

/// Prototype ratio C_AC : (C_AC + C_f) = 2 nF : 49 nF.
inline constexpr double kDefaultAcFraction = 2.0 / 49.0;

[[nodiscard]] CapacitanceSplit split_capacitance(double c_total, double ac_fraction = kDefaultAcFraction);

struct DesignResult {
    double l = 0.0;
    double k = 0.0;
    double c_total = 0.0;
    double c_ac = 0.0;
    double c_f = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;

    /// Receiver parameters for this design with the given output stage.
    [[nodiscard]] ReceiverParams to_params(const DesignSpec& spec, double c_o, double r_load) const;
};

/// Full reactive design for a chosen (k, L). Throws ValidationError when the
/// point is outside the feasible region.
[[nodiscard]] DesignResult design_receiver(const DesignSpec& spec, double k, double l,
                                           double ac_fraction = kDefaultAcFraction);

/// Log-midpoint of the feasible L interval at coupling k; nullopt when empty.
[[nodiscard]] std::optional<double> pick_inductance(const DesignSpec& spec, double k);

// -----------------------------------------------------------------------------
// Magnetics
// -----------------------------------------------------------------------------

struct MagneticGeometry {
    int n1 = 0;       ///< turns per winding on the centre leg
    int n2 = 0;       ///< turns per winding on the outer leg
    double r1 = 0.0;  ///< centre-leg reluctance (A-turns/Wb)
    double r2 = 0.0;  ///< outer-leg reluctance (A-turns/Wb)
};

struct CoupledInductance {
    double l = 0.0;
    double k = 0.0; ///< may fall below zero for outer-only windings; callers check
};

[[nodiscard]] CoupledInductance magnetic_inductance(const MagneticGeometry& g);

/// Integer turn search with the outer-leg reluctance solved continuously so
/// that L hits the target exactly; accepts k within 2%. Fewest total turns
/// wins, ties broken by the smaller k error. ValidationError when nothing fits.
[[nodiscard]] MagneticGeometry solve_magnetic_design(double l_target, double k_target, double r1,
                                                     int turn_limit, Execution exec = Execution::kParallel);

} // namespace wpt::design

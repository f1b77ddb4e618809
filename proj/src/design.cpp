#include "wpt/design.hpp"

#include "wpt/analytics.hpp"
#include "wpt/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace wpt::design {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

void require_ascending(std::span<const double> grid, const char* name) {
    if (grid.empty()) {
        throw ValidationError(std::string(name) + " grid is empty");
    }
    if (!std::is_sorted(grid.begin(), grid.end(), std::less_equal<>())) {
        throw ValidationError(std::string(name) + " grid must be strictly ascending");
    }
}

struct Candidate {
    MagneticGeometry geometry;
    double k_error = std::numeric_limits<double>::infinity();
    bool valid = false;

    [[nodiscard]] bool better_than(const Candidate& other) const {
        if (!valid) return false;
        if (!other.valid) return true;
        const int turns = geometry.n1 + geometry.n2;
        const int other_turns = other.geometry.n1 + other.geometry.n2;
        if (turns != other_turns) return turns < other_turns;
        if (k_error != other.k_error) return k_error < other.k_error;
        return geometry.n1 < other.geometry.n1;
    }
};

} // namespace

void DesignSpec::validate() const {
    const bool ok = v_o_nom > 0.0 && i_o_nom > 0.0 && fs > 0.0 && i_ls_amp > 0.0 && ripple_percent > 0.0 &&
                    ripple_percent <= 100.0 && std::isfinite(v_o_nom + i_o_nom + fs + i_ls_amp);
    if (!ok) {
        throw ValidationError("design spec: all fields must be positive and ripple_percent in (0, 100]");
    }
}

InductanceBounds inductance_bounds(const DesignSpec& spec) {
    spec.validate();
    const double base = spec.v_o_nom / (spec.fs * spec.i_ls_amp);
    return {base / 40.0, base / 4.0};
}

double ripple_bound(const DesignSpec& spec) {
    spec.validate();
    const double x = spec.ripple_percent / 100.0;
    return 0.105 * spec.v_o_nom / (x * spec.i_o_nom * spec.fs);
}

bool is_feasible(const DesignSpec& spec, double k, double l) {
    const InductanceBounds b = inductance_bounds(spec);
    const double l_eff = l * (1.0 - k * k);
    return l_eff > b.lower && l_eff < b.upper && k * l > ripple_bound(spec);
}

std::size_t FeasibleRegion::count() const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

FeasibleRegion feasible_region(const DesignSpec& spec, std::span<const double> k_grid,
                               std::span<const double> l_grid, Execution exec) {
    spec.validate();
    require_ascending(k_grid, "k");
    require_ascending(l_grid, "L");

    FeasibleRegion region;
    region.k_grid.assign(k_grid.begin(), k_grid.end());
    region.l_grid.assign(l_grid.begin(), l_grid.end());
    region.cells.assign(k_grid.size() * l_grid.size(), 0);

    const std::size_t cols = l_grid.size();
    for_each_index(k_grid.size(), exec, [&](std::size_t ik) {
        for (std::size_t il = 0; il < cols; ++il) {
            region.cells[ik * cols + il] = is_feasible(spec, k_grid[ik], l_grid[il]) ? 1 : 0;
        }
    });
    return region;
}

double alpha_residual(double k, double alpha) {
    return (1.0 - k) / (1.0 + k) * std::tan(kHalfPi * alpha) + kHalfPi * alpha;
}

double solve_alpha(double k) {
    if (!(k >= 0.0 && k < 1.0)) {
        throw ValidationError("solve_alpha: k must lie in [0, 1)");
    }
    // On (1, 2) the residual rises monotonically from -inf to pi.
    double lo = 1.0;
    double hi = 2.0;
    double mid = 1.5;
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double f = alpha_residual(k, mid);
        if (f == 0.0) {
            break;
        }
        (f < 0.0 ? lo : hi) = mid;
    }
    return mid;
}

double resonant_capacitance(double l, double k, double fs) {
    if (!(l > 0.0) || !(fs > 0.0)) {
        throw ValidationError("resonant_capacitance: L and fs must be > 0");
    }
    const double alpha = solve_alpha(k);
    const double w = kTwoPi * fs;
    return 1.0 / (w * w * alpha * alpha * l * (1.0 - k * k));
}

CapacitanceSplit split_capacitance(double c_total, double ac_fraction) {
    if (!(c_total > 0.0)) {
        throw ValidationError("split_capacitance: c_total must be > 0");
    }
    if (!(ac_fraction >= 0.0 && ac_fraction < 0.5)) {
        throw ValidationError("split_capacitance: ac_fraction must lie in [0, 0.5)");
    }
    CapacitanceSplit s;
    s.c_ac = ac_fraction * c_total;
    s.c_f = c_total - s.c_ac;
    return s;
}

ReceiverParams DesignResult::to_params(const DesignSpec& spec, double c_o, double r_load) const {
    ReceiverParams p;
    p.fs = spec.fs;
    p.i_ls_amp = spec.i_ls_amp;
    p.l = l;
    p.k = k;
    p.c_f = c_f;
    p.c_ac = c_ac;
    p.c_o = c_o;
    p.r_load = r_load;
    p.v_o_ref = spec.v_o_nom;
    p.validate();
    return p;
}

DesignResult design_receiver(const DesignSpec& spec, double k, double l, double ac_fraction) {
    if (!is_feasible(spec, k, l)) {
        std::ostringstream msg;
        msg << "coupled inductor (k = " << k << ", L = " << l << " H) is outside the feasible region";
        throw ValidationError(msg.str());
    }
    DesignResult r;
    r.l = l;
    r.k = k;
    r.alpha = solve_alpha(k);
    r.c_total = resonant_capacitance(l, k, spec.fs);
    const CapacitanceSplit split = split_capacitance(r.c_total, ac_fraction);
    r.c_ac = split.c_ac;
    r.c_f = split.c_f;

    ReceiverParams p;
    p.fs = spec.fs;
    p.l = l;
    p.k = k;
    p.c_ac = r.c_ac;
    p.c_f = r.c_f;
    r.gamma = analytics::gamma(p);
    return r;
}

std::optional<double> pick_inductance(const DesignSpec& spec, double k) {
    if (!(k > 0.0 && k < 1.0)) {
        return std::nullopt;
    }
    const InductanceBounds b = inductance_bounds(spec);
    const double lo = std::max(b.lower / (1.0 - k * k), ripple_bound(spec) / k);
    const double hi = b.upper / (1.0 - k * k);
    if (!(lo < hi)) {
        return std::nullopt;
    }
    return std::sqrt(lo * hi);
}

// -----------------------------------------------------------------------------
// Magnetics
// -----------------------------------------------------------------------------

CoupledInductance magnetic_inductance(const MagneticGeometry& g) {
    if (!(g.r1 > 0.0) || !(g.r2 > 0.0)) {
        throw ValidationError("magnetic_inductance: reluctances must be > 0");
    }
    if (g.n1 < 0 || g.n2 < 0 || (g.n1 == 0 && g.n2 == 0)) {
        throw ValidationError("magnetic_inductance: turns must be >= 0 and not both zero");
    }
    const double n1 = g.n1;
    const double n2 = g.n2;
    CoupledInductance out;
    out.l = (2.0 * g.r2 * n1 * n1 + 2.0 * g.r2 * n1 * n2 + (g.r1 + g.r2) * n2 * n2) /
            ((2.0 * g.r1 + g.r2) * g.r2);
    out.k = 1.0 - n2 * n2 / (g.r2 * out.l);
    return out;
}

MagneticGeometry solve_magnetic_design(double l_target, double k_target, double r1, int turn_limit,
                                       Execution exec) {
    if (!(l_target > 0.0) || !(r1 > 0.0) || turn_limit < 1) {
        throw ValidationError("solve_magnetic_design: L, r1 must be > 0 and turn_limit >= 1");
    }
    if (!(k_target > 0.0 && k_target <= 1.0)) {
        throw ValidationError("solve_magnetic_design: k_target must lie in (0, 1]");
    }
    constexpr double kTolerance = 0.02;
    const bool fully_coupled = k_target == 1.0;

    std::vector<Candidate> best_per_row(static_cast<std::size_t>(turn_limit) + 1);
    for_each_index(best_per_row.size(), exec, [&](std::size_t row) {
        const double n1 = static_cast<double>(row);
        Candidate best;
        const int n2_max = fully_coupled ? 0 : turn_limit;
        for (int n2i = fully_coupled ? 0 : 1; n2i <= n2_max; ++n2i) {
            const double n2 = n2i;
            double r2 = 0.0;
            if (n2i == 0) {
                r2 = 2.0 * n1 * n1 / l_target - 2.0 * r1;
            } else {
                // L r2^2 + B r2 - r1 n2^2 = 0 has exactly one positive root.
                const double b = 2.0 * l_target * r1 - 2.0 * n1 * n1 - 2.0 * n1 * n2 - n2 * n2;
                const double disc = std::sqrt(b * b + 4.0 * l_target * r1 * n2 * n2);
                r2 = b > 0.0 ? 2.0 * r1 * n2 * n2 / (b + disc) : (disc - b) / (2.0 * l_target);
            }
            if (!(r2 > 0.0) || !std::isfinite(r2)) {
                continue;
            }
            const MagneticGeometry g{static_cast<int>(row), n2i, r1, r2};
            if (g.n1 == 0 && g.n2 == 0) {
                continue;
            }
            const CoupledInductance lk = magnetic_inductance(g);
            const double l_error = std::abs(lk.l - l_target) / l_target;
            const double k_error = std::abs(lk.k - k_target) / k_target;
            if (l_error > kTolerance || k_error > kTolerance) {
                continue;
            }
            const Candidate c{g, k_error, true};
            if (c.better_than(best)) {
                best = c;
            }
        }
        best_per_row[row] = best;
    });

    Candidate best;
    for (const Candidate& c : best_per_row) {
        if (c.better_than(best)) {
            best = c;
        }
    }
    if (!best.valid) {
        std::ostringstream msg;
        msg << "no winding with at most " << turn_limit << " turns reaches L = " << l_target
            << " H, k = " << k_target << " for r1 = " << r1;
        throw ValidationError(msg.str());
    }
    return best.geometry;
}

} // namespace wpt::design

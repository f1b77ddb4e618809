#include "wpt/simulator.hpp"

#include "wpt/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace wpt::sim {

using namespace state_index;

namespace {

constexpr int kOscC = 5;
constexpr int kOscS = 6;

Mat7 build_augmented(const ReceiverParams& p, Mode m) {
    const LinearDynamics dyn = assemble_mode_dynamics(p, m);
    const double w = kTwoPi * p.fs;
    Mat7 aug = Mat7::Zero();
    aug.topLeftCorner<5, 5>() = dyn.a;
    aug.block<5, 1>(0, kOscC) = dyn.b;
    // d/dt [c; s] = w [-s; c]
    aug(kOscC, kOscS) = -w;
    aug(kOscS, kOscC) = w;
    return aug;
}

Mat7 clamp_projection(int index) {
    Mat7 proj = Mat7::Identity();
    proj(index, index) = 0.0;
    return proj;
}

// The clamped capacitor's row of exp(A tau) is the unit row analytically;
// scaling-and-squaring leaves rounding dust there.
void pin_clamped_row(Mat7& e, Mode m) {
    const int row = m == Mode::kModeI ? kVC2 : kVC1;
    e.row(row).setZero();
    e(row, row) = 1.0;
}

Vec7 join(const Vec5& x, const Eigen::Vector2d& osc) {
    Vec7 z;
    z << x, osc;
    return z;
}

void check_finite(const Vec5& x, double t) {
    if (!x.allFinite()) {
        std::ostringstream msg;
        msg << "integration diverged: non-finite state at t = " << t << " s";
        throw ConvergenceError(msg.str());
    }
}

void require_grid(int n_periods, int steps_per_period) {
    if (n_periods < 1) {
        throw ValidationError("n_periods must be >= 1");
    }
    if (steps_per_period < 2 || steps_per_period % 2 != 0) {
        throw ValidationError("steps_per_period must be even and >= 2");
    }
}

} // namespace

// -----------------------------------------------------------------------------
// Waveform
// -----------------------------------------------------------------------------

std::vector<double> Waveform::v_ac() const {
    std::vector<double> out(size());
    std::transform(v_c1.begin(), v_c1.end(), v_c2.begin(), out.begin(), std::minus<>());
    return out;
}

std::vector<double> Waveform::i_lm() const {
    std::vector<double> out(size());
    std::transform(i_l1.begin(), i_l1.end(), i_l2.begin(), out.begin(), std::plus<>());
    return out;
}

std::vector<double> Waveform::channel(std::string_view name) const {
    if (name == "i_l1") return i_l1;
    if (name == "i_l2") return i_l2;
    if (name == "v_c1") return v_c1;
    if (name == "v_c2") return v_c2;
    if (name == "v_o") return v_o;
    if (name == "i_ls") return i_ls;
    if (name == "v_ac") return v_ac();
    if (name == "i_lm") return i_lm();
    throw ValidationError("unknown waveform channel '" + std::string(name) + "'");
}

void Waveform::reserve(std::size_t n) {
    for (auto* ch : {&i_l1, &i_l2, &v_c1, &v_c2, &v_o, &i_ls}) {
        ch->reserve(n);
    }
}

void Waveform::push(const StateVector& x, double i_ls_value) {
    i_l1.push_back(x.i_l1);
    i_l2.push_back(x.i_l2);
    v_c1.push_back(x.v_c1);
    v_c2.push_back(x.v_c2);
    v_o.push_back(x.v_o);
    i_ls.push_back(i_ls_value);
}

StateVector Waveform::state(std::size_t i) const {
    return {i_l1.at(i), i_l2.at(i), v_c1.at(i), v_c2.at(i), v_o.at(i)};
}

void Waveform::validate() const {
    const std::size_t n = size();
    for (const auto* ch : {&i_l2, &v_c1, &v_c2, &v_o, &i_ls}) {
        if (ch->size() != n) {
            throw ValidationError("waveform channels differ in length");
        }
    }
    if (n < 2) {
        throw ValidationError("waveform needs at least two samples");
    }
    if (!(dt > 0.0)) {
        throw ValidationError("waveform dt must be > 0");
    }
}

// -----------------------------------------------------------------------------
// ModePropagators
// -----------------------------------------------------------------------------

ModePropagators::ModePropagators(const ReceiverParams& p) : params_(p) {
    p.validate();
    aug_[0] = build_augmented(p, Mode::kModeI);
    aug_[1] = build_augmented(p, Mode::kModeII);
    const double half = 0.5 * p.period();
    half_[0] = exp(Mode::kModeI, half);
    half_[1] = exp(Mode::kModeII, half);
    period_ = clamp_projection(kVC2) * half_[1] * clamp_projection(kVC1) * half_[0];
}

Mat7 ModePropagators::exp(Mode m, double tau) const {
    Mat7 e = (augmented(m) * tau).exp();
    pin_clamped_row(e, m);
    return e;
}

Eigen::Vector2d ModePropagators::oscillator(PhaseShift d, double t) const {
    const double phase = kTwoPi * params_.fs * t - d.angle();
    return params_.i_ls_amp * Eigen::Vector2d{std::cos(phase), std::sin(phase)};
}

Vec5 ModePropagators::advance_period(const Vec5& x, PhaseShift d) const {
    const Vec7 z = period_ * join(x, oscillator(d, 0.0));
    return z.head<5>();
}

// -----------------------------------------------------------------------------
// Engines
// -----------------------------------------------------------------------------

Trajectory integrate(const ReceiverParams& p, PhaseShift d, const StateVector& x0, int n_periods,
                     int steps_per_period) {
    p.validate();
    require_grid(n_periods, steps_per_period);

    const std::array<LinearDynamics, 2> dyn{assemble_mode_dynamics(p, Mode::kModeI),
                                            assemble_mode_dynamics(p, Mode::kModeII)};
    const double ts = p.period();
    const double h = ts / steps_per_period;
    const int half_steps = steps_per_period / 2;
    const double c_res = p.c_res();

    Trajectory out;
    out.waveform.t0 = 0.0;
    out.waveform.dt = h;
    out.waveform.reserve(static_cast<std::size_t>(n_periods) * steps_per_period);

    Vec5 x = x0.to_vec();
    auto clamp = [&](int index) {
        const double v = x[index];
        out.clamped_voltages.push_back(v);
        out.discarded_energy += 0.5 * c_res * v * v;
        x[index] = 0.0;
    };

    // S2 turns on at t = 0.
    clamp(kVC2);
    for (int period = 0; period < n_periods; ++period) {
        const double t_period = period * ts;
        for (int half = 0; half < 2; ++half) {
            const LinearDynamics& f = dyn[half];
            for (int step = 0; step < half_steps; ++step) {
                const double t = t_period + (half * half_steps + step) * h;
                const double i0 = source_current(p, d, t);
                out.waveform.push(StateVector::from_vec(x), i0);

                const double i_mid = source_current(p, d, t + 0.5 * h);
                const double i1 = source_current(p, d, t + h);
                const Vec5 k1 = f.rates(x, i0);
                const Vec5 k2 = f.rates(x + 0.5 * h * k1, i_mid);
                const Vec5 k3 = f.rates(x + 0.5 * h * k2, i_mid);
                const Vec5 k4 = f.rates(x + h * k3, i1);
                x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                check_finite(x, t + h);
            }
            clamp(half == 0 ? kVC1 : kVC2);
        }
    }
    out.final_state = StateVector::from_vec(x);
    return out;
}

StateVector exact_propagate(const ReceiverParams& p, PhaseShift d, const StateVector& x0, double t_from,
                            double t_to) {
    return exact_propagate(ModePropagators(p), d, x0, t_from, t_to);
}

StateVector exact_propagate(const ModePropagators& props, PhaseShift d, const StateVector& x0, double t_from,
                            double t_to) {
    const double half = 0.5 * props.params().period();
    if (!(t_from >= 0.0) || !(t_to >= t_from)) {
        throw ValidationError("exact_propagate needs 0 <= t_from <= t_to");
    }
    if (t_to == t_from) {
        return x0;
    }
    const double interval = std::floor(t_from / half);
    const double interval_end = (interval + 1.0) * half;
    if (t_to > interval_end * (1.0 + 1e-12)) {
        throw ValidationError("exact_propagate interval straddles a mode boundary");
    }
    const Mode m = static_cast<long long>(interval) % 2 == 0 ? Mode::kModeI : Mode::kModeII;
    const Vec7 z = props.exp(m, t_to - t_from) * join(x0.to_vec(), props.oscillator(d, t_from));
    return StateVector::from_vec(z.head<5>());
}

Trajectory sample_exact(const ModePropagators& props, PhaseShift d, const StateVector& x0, int n_periods,
                        int steps_per_period) {
    require_grid(n_periods, steps_per_period);
    const ReceiverParams& p = props.params();
    const double h = p.period() / steps_per_period;
    const int half_steps = steps_per_period / 2;
    const std::array<Mat7, 2> step{props.exp(Mode::kModeI, h), props.exp(Mode::kModeII, h)};
    const std::array<Mat7, 2> half{props.half_period(Mode::kModeI), props.half_period(Mode::kModeII)};

    Trajectory out;
    out.waveform.t0 = 0.0;
    out.waveform.dt = h;
    out.waveform.reserve(static_cast<std::size_t>(n_periods) * steps_per_period);

    Vec7 boundary = join(x0.to_vec(), props.oscillator(d, 0.0));
    auto clamp = [&](Vec7& z, int index) {
        const double v = z[index];
        out.clamped_voltages.push_back(v);
        out.discarded_energy += 0.5 * p.c_res() * v * v;
        z[index] = 0.0;
    };
    clamp(boundary, kVC2);

    for (int period = 0; period < n_periods; ++period) {
        for (int m = 0; m < 2; ++m) {
            // Samples advance step-wise; the boundary state is re-derived from
            // the half-period exponential so rounding does not accumulate.
            Vec7 z = boundary;
            for (int s = 0; s < half_steps; ++s) {
                out.waveform.push(StateVector::from_vec(z.head<5>()), z[kOscC]);
                z = step[m] * z;
            }
            boundary = half[m] * boundary;
            check_finite(boundary.head<5>(), (period + 0.5 * (m + 1)) * p.period());
            clamp(boundary, m == 0 ? kVC1 : kVC2);
        }
    }
    out.final_state = StateVector::from_vec(boundary.head<5>());
    return out;
}

// -----------------------------------------------------------------------------
// Periodic steady state
// -----------------------------------------------------------------------------

SteadyState periodic_steady_state(const ReceiverParams& p, PhaseShift d, const SteadyStateOptions& opts) {
    return periodic_steady_state(ModePropagators(p), d, opts);
}

SteadyState periodic_steady_state(const ModePropagators& props, PhaseShift d, const SteadyStateOptions& opts) {
    const Mat7& map = props.period_map();
    const Eigen::Vector2d osc0 = props.oscillator(d, 0.0);
    const Mat5 phi = map.topLeftCorner<5, 5>();
    const Vec5 w = map.topRightCorner<5, 2>() * osc0;

    const Eigen::FullPivLU<Mat5> lu(Mat5::Identity() - phi);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
        throw ConvergenceError("period map has an eigenvalue at 1: no unique periodic steady state");
    }
    Vec5 x0 = lu.solve(w);
    // Both capacitor rows of the period map vanish identically.
    x0[kVC1] = 0.0;
    x0[kVC2] = 0.0;

    const Vec5 x1 = phi * x0 + w;
    const double scale = x0.norm();
    SteadyState ss;
    ss.d = d;
    ss.x0 = StateVector::from_vec(x0);
    ss.residual = scale > 0.0 ? (x1 - x0).norm() / scale : (x1 - x0).norm();
    if (!std::isfinite(ss.residual) || ss.residual > opts.tolerance) {
        std::ostringstream msg;
        msg << "periodic steady state residual " << ss.residual << " exceeds tolerance " << opts.tolerance;
        throw ConvergenceError(msg.str());
    }

    Vec7 z = join(x0, osc0);
    z = props.half_period(Mode::kModeI) * z;
    ss.mid_period = StateVector::from_vec(z.head<5>());
    z[kVC1] = 0.0;
    z = props.half_period(Mode::kModeII) * z;
    ss.period_end = StateVector::from_vec(z.head<5>());

    ss.waveform = sample_exact(props, d, ss.x0, 1, opts.steps_per_period).waveform;
    return ss;
}

// -----------------------------------------------------------------------------
// Metrics
// -----------------------------------------------------------------------------

double ZvsReport::max_relative_residual() const noexcept {
    if (!(v_peak > 0.0)) {
        return 0.0;
    }
    const double worst = std::max({std::abs(v_at_s1_on), std::abs(v_at_s1_off), std::abs(v_at_s2_on),
                                   std::abs(v_at_s2_off)});
    return worst / v_peak;
}

ZvsReport zvs_metrics(const SteadyState& ss, const ReceiverParams& p) {
    ZvsReport r;
    r.v_at_s1_off = ss.x0.v_c1;
    r.v_at_s1_on = ss.mid_period.v_c1;
    r.v_at_s2_off = ss.mid_period.v_c2;
    r.v_at_s2_on = ss.period_end.v_c2;
    r.discarded_energy_per_cycle =
        0.5 * p.c_res() * (r.v_at_s1_on * r.v_at_s1_on + r.v_at_s2_on * r.v_at_s2_on);

    double peak = std::max({std::abs(ss.mid_period.v_c1), std::abs(ss.period_end.v_c2)});
    for (std::size_t i = 0; i < ss.waveform.size(); ++i) {
        peak = std::max({peak, std::abs(ss.waveform.v_c1[i]), std::abs(ss.waveform.v_c2[i])});
    }
    r.v_peak = peak;
    return r;
}

double peak_to_peak(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return *hi - *lo;
}

RippleReport ripple_metrics(const SteadyState& ss) {
    const Waveform& w = ss.waveform;
    RippleReport r;
    r.i_lm_pp = peak_to_peak(w.i_lm());
    r.v_o_pp = peak_to_peak(w.v_o);
    r.i_lx_pp = std::max(peak_to_peak(w.i_l1), peak_to_peak(w.i_l2));
    return r;
}

PowerBalance power_balance(const SteadyState& ss, const ReceiverParams& p) {
    const Waveform& w = ss.waveform;
    const std::size_t n = w.size();
    const std::size_t half = n / 2;
    const double ts = p.period();

    // Trapezoid per mode, closing each half on the pre-clamp boundary state so
    // a non-ZVS jump does not smear across the rule.
    auto integrand = [&](const StateVector& x, double i_ls) { return (x.v_c1 - x.v_c2) * i_ls; };
    const ModePropagators props(p);
    const double i_mid = props.oscillator(ss.d, 0.5 * ts)[0];
    const double i_end = props.oscillator(ss.d, ts)[0];

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = integrand(w.state(i), w.i_ls[i]);
        acc += (i == 0 || i == half) ? 0.5 * f : f;
    }
    acc += 0.5 * integrand(ss.mid_period, i_mid) + 0.5 * integrand(ss.period_end, i_end);

    PowerBalance pb;
    pb.input = acc / static_cast<double>(n);
    double load = 0.0;
    for (double v : w.v_o) {
        load += v * v;
    }
    pb.load = load * p.g_load() / static_cast<double>(n);
    pb.clamp = zvs_metrics(ss, p).discarded_energy_per_cycle / ts;
    return pb;
}

} // namespace wpt::sim

#include "wpt/analytics.hpp"

#include "wpt/error.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace wpt::analytics {

double resonant_rate(const ReceiverParams& p) {
    p.validate();
    return 1.0 / std::sqrt(p.l_eff() * p.c_res());
}

AnalyticWaveforms analytic_waveforms(const ReceiverParams& p, double t) {
    const double ts = p.period();
    const double tau = t - ts * std::floor(t / ts);
    const double w_r = resonant_rate(p);
    const double v_m = vm(p);
    const double offset = (1.0 - p.k) * p.v_o_ref;

    AnalyticWaveforms out;
    if (tau < 0.5 * ts) {
        out.v_c1 = v_m * std::cos(w_r * (tau - 0.25 * ts)) + offset;
    } else {
        out.v_c2 = v_m * std::cos(w_r * (tau - 0.75 * ts)) + offset;
    }
    out.v_ac = out.v_c1 - out.v_c2;
    return out;
}

double vm(const ReceiverParams& p) {
    const double angle = 0.25 * p.period() * resonant_rate(p);
    const double c = std::cos(angle);
    if (std::abs(c) < 1e-12) {
        throw DegenerateDesignError("resonant angle sits on the secant pole (pi/2)");
    }
    return std::abs((1.0 - p.k) / c) * p.v_o_ref;
}

double gamma(const ReceiverParams& p) {
    p.validate();
    const double w = kTwoPi * p.fs;
    const double denom = std::numbers::pi * (1.0 - w * w * p.l * p.c_res() * (1.0 - p.k * p.k));
    if (std::abs(denom) < 1e-12) {
        throw DegenerateDesignError("gamma: tank resonates exactly at fs (zero denominator)");
    }
    return 2.0 * (1.0 - p.k) / denom;
}

RealPower real_power(const ReceiverParams& p, PhaseShift d) {
    RealPower r;
    r.p_max = gamma(p) * p.i_ls_amp * p.v_o_ref;
    r.p = r.p_max * std::sin(d.angle());
    return r;
}

OperatingPoint output_operating_point(const ReceiverParams& p, PhaseShift d) {
    p.validate();
    OperatingPoint op;
    op.i_o = kGammaApprox * p.i_ls_amp * std::sin(d.angle());
    op.v_o = std::isinf(p.r_load) ? std::numeric_limits<double>::infinity() : op.i_o * p.r_load;
    op.gamma = gamma(p);
    op.p_max = op.gamma * p.i_ls_amp * op.v_o;
    op.p = op.p_max * std::sin(d.angle());
    ReceiverParams at_op = p;
    at_op.v_o_ref = op.v_o;
    op.v_m = vm(at_op);
    return op;
}

double phase_for_current(const ReceiverParams& p, double i_o_target) {
    const double ceiling = kGammaApprox * p.i_ls_amp;
    // A few ulps of slack so a rating set exactly at the ceiling stays reachable.
    if (!(i_o_target >= 0.0) || i_o_target > ceiling * (1.0 + 1e-12)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::asin(std::min(1.0, i_o_target / ceiling)) / kTwoPi;
}

double Spectrum::max_even_ratio() const {
    double worst = 0.0;
    for (std::size_t h = 2; h < mags.size(); h += 2) {
        worst = std::max(worst, mags[h]);
    }
    return mags.size() > 1 && mags[1] > 0.0 ? worst / mags[1] : 0.0;
}

double thd_from_mags(std::span<const double> mags) {
    if (mags.size() < 2 || !(mags[1] > 0.0)) {
        return 0.0;
    }
    double acc = 0.0;
    for (std::size_t h = 2; h < mags.size(); ++h) {
        acc += mags[h] * mags[h];
    }
    return std::sqrt(acc) / mags[1];
}

Spectrum spectrum(std::span<const double> samples, double dt, double f0, int n_harmonics) {
    const std::size_t n = samples.size();
    if (n < 2 || !(dt > 0.0) || !(f0 > 0.0) || n_harmonics < 1) {
        throw ValidationError("spectrum needs >= 2 samples, dt > 0, f0 > 0, n_harmonics >= 1");
    }
    const double cycles_exact = static_cast<double>(n) * dt * f0;
    const double cycles = std::round(cycles_exact);
    if (cycles < 1.0 || std::abs(cycles_exact - cycles) > 1e-6 * cycles) {
        std::ostringstream msg;
        msg << "spectrum: samples cover " << cycles_exact << " periods, need an integer count";
        throw ValidationError(msg.str());
    }
    const auto m = static_cast<std::size_t>(cycles);
    if (2 * m * static_cast<std::size_t>(n_harmonics) >= n) {
        throw ValidationError("spectrum: highest harmonic is at or above Nyquist");
    }

    Spectrum s;
    s.f0 = f0;
    s.mags.assign(static_cast<std::size_t>(n_harmonics) + 1, 0.0);
    for (int h = 0; h <= n_harmonics; ++h) {
        // Exact integer bin index keeps the twiddle phase reduction exact.
        const std::size_t bin = m * static_cast<std::size_t>(h);
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = (bin * i) % n;
            const double phase = -kTwoPi * static_cast<double>(r) / static_cast<double>(n);
            acc += samples[i] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        const double scale = h == 0 ? 1.0 / static_cast<double>(n) : 2.0 / static_cast<double>(n);
        s.mags[static_cast<std::size_t>(h)] = std::abs(acc) * scale;
    }
    s.thd = thd_from_mags(s.mags);
    return s;
}

Spectrum spectrum(const sim::Waveform& w, std::string_view channel, double f0, int n_harmonics) {
    w.validate();
    const std::vector<double> xs = w.channel(channel);
    return spectrum(xs, w.dt, f0, n_harmonics);
}

} // namespace wpt::analytics

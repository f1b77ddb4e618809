#include "wpt/cli/commands.hpp"

#include "wpt/analytics.hpp"
#include "wpt/cli/csv.hpp"
#include "wpt/closed_loop.hpp"
#include "wpt/control.hpp"
#include "wpt/design.hpp"
#include "wpt/error.hpp"
#include "wpt/simulator.hpp"
#include "wpt/sweeps.hpp"
#include "wpt/sync_pwm.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

namespace wpt::cli {

namespace {

using json = nlohmann::ordered_json;

std::filesystem::path prepare_out(const CommandContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + ctx.out_dir.string() + ": " + ec.message());
    }
    return ctx.out_dir;
}

void write_json(const std::filesystem::path& path, json body) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    for (auto& [k, v] : body.items()) {
        doc[k] = std::move(v);
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot create " + path.string());
    }
    out << doc.dump(2) << '\n';
    out.close();
    if (out.fail()) {
        throw IoError("write failed for " + path.string());
    }
}

void say(const CommandContext& ctx, const std::string& line) {
    if (ctx.log != nullptr) {
        *ctx.log << line << '\n';
    }
}

std::string fmt(double v) { return format_number(v); }

Execution execution(const RunConfig& cfg) {
    return cfg.flag_or("solver", "parallel", true) ? Execution::kParallel : Execution::kSerial;
}

sim::SteadyStateOptions steady_options(const RunConfig& cfg) {
    sim::SteadyStateOptions o;
    o.steps_per_period = static_cast<int>(cfg.number_or("solver", "steps_per_period", o.steps_per_period));
    o.tolerance = cfg.number_or("solver", "tolerance", o.tolerance);
    return o;
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) {
        throw ValidationError("grid counts must be >= 1");
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    }
    return out;
}

std::vector<double> logspace(double a, double b, int n) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw ValidationError("logarithmic grid bounds must be > 0");
    }
    std::vector<double> out = linspace(std::log(a), std::log(b), n);
    for (double& v : out) {
        v = std::exp(v);
    }
    return out;
}

json params_json(const ReceiverParams& p) {
    return json{{"fs_hz", p.fs},        {"i_ls_amp_a", p.i_ls_amp}, {"l_h", p.l},
                {"k", p.k},             {"c_f_f", p.c_f},           {"c_ac_f", p.c_ac},
                {"c_o_f", p.c_o},       {"r_load_ohm", p.r_load},   {"v_o_ref_v", p.v_o_ref}};
}

json gains_json(const control::PIGains& g) {
    return json{{"kind", g.kind == control::LoopKind::kVoltage ? "voltage" : "current"},
                {"kp", g.kp},
                {"ki_per_s", g.ki},
                {"t_samp_s", g.t_samp},
                {"b0", g.b0},
                {"b1", g.b1},
                {"anti_windup", g.anti_windup}};
}

// -----------------------------------------------------------------------------

void cmd_alpha_table(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const std::vector<double> ks =
        cfg.numbers("alpha", "k_values").value_or(std::vector<double>{0, .1, .2, .3, .4, .5, .6, .7, .8, .9});
    const ReceiverParams base = prototype_params();
    const auto dir = prepare_out(ctx);
    CsvWriter csv(dir / "alpha_table.csv", {"k", "alpha", "residual", "gamma"});
    for (double k : ks) {
        const double alpha = design::solve_alpha(k);
        // gamma of a circuit tuned to this root (independent of L and fs).
        ReceiverParams p = base;
        p.k = k;
        const auto split = design::split_capacitance(design::resonant_capacitance(p.l, k, p.fs));
        p.c_ac = split.c_ac;
        p.c_f = split.c_f;
        const double g = analytics::gamma(p);
        csv.row({k, alpha, design::alpha_residual(k, alpha), g});
        say(ctx, "k = " + fmt(k) + "  alpha = " + fmt(alpha) + "  gamma = " + fmt(g));
    }
    csv.close();
}

void cmd_design(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const design::DesignSpec spec = design_spec(cfg);
    const double k = cfg.number_or("design", "k", 0.71);
    std::optional<double> l = cfg.number("design", "l_h");
    if (!l) {
        l = design::pick_inductance(spec, k);
        if (!l) {
            throw ValidationError("no feasible inductance at k = " + fmt(k));
        }
    }
    const double frac = cfg.number_or("design", "ac_fraction", design::kDefaultAcFraction);
    const design::DesignResult r = design::design_receiver(spec, k, *l, frac);
    const design::InductanceBounds b = design::inductance_bounds(spec);
    const double c_o = cfg.number_or("design", "c_o_f", 6800e-6);
    const double r_load = cfg.number_or("design", "r_load_ohm", spec.v_o_nom / spec.i_o_nom);
    const ReceiverParams p = r.to_params(spec, c_o, r_load);

    json body;
    body["spec"] = {{"v_o_nom_v", spec.v_o_nom},
                    {"i_o_nom_a", spec.i_o_nom},
                    {"fs_hz", spec.fs},
                    {"i_ls_amp_a", spec.i_ls_amp},
                    {"ripple_percent", spec.ripple_percent}};
    body["bounds"] = {{"l_eff_min_h", b.lower}, {"l_eff_max_h", b.upper}, {"mutual_min_h", design::ripple_bound(spec)}};
    body["design"] = {{"l_h", r.l},         {"k", r.k},         {"l_eff_h", r.l * (1 - r.k * r.k)},
                      {"mutual_h", r.k * r.l}, {"c_total_f", r.c_total}, {"c_ac_f", r.c_ac},
                      {"c_f_f", r.c_f},     {"alpha", r.alpha}, {"gamma", r.gamma}};
    body["receiver"] = params_json(p);
    say(ctx, "L = " + fmt(r.l) + " H, k = " + fmt(r.k) + ", C_AC + C_f = " + fmt(r.c_total) +
                 " F (alpha = " + fmt(r.alpha) + ", gamma = " + fmt(r.gamma) + ")");

    if (cfg.flag_or("magnetics", "enabled", true)) {
        const double r1 = cfg.number_or("magnetics", "r1_at_per_wb", 1e6);
        const int limit = static_cast<int>(cfg.number_or("magnetics", "turn_limit", 40));
        const design::MagneticGeometry g = design::solve_magnetic_design(r.l, r.k, r1, limit, execution(cfg));
        const design::CoupledInductance got = design::magnetic_inductance(g);
        body["magnetics"] = {{"n1", g.n1},
                             {"n2", g.n2},
                             {"r1_at_per_wb", g.r1},
                             {"r2_at_per_wb", g.r2},
                             {"l_h", got.l},
                             {"k", got.k}};
        say(ctx, "core: n1 = " + std::to_string(g.n1) + ", n2 = " + std::to_string(g.n2) +
                     ", R2 = " + fmt(g.r2) + " A-t/Wb, k = " + fmt(got.k));
    }
    write_json(prepare_out(ctx) / "design.json", std::move(body));
}

void cmd_feasible_region(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const design::DesignSpec spec = design_spec(cfg);
    const auto ks = linspace(cfg.number_or("grid", "k_min", 0.0), cfg.number_or("grid", "k_max", 0.95),
                             static_cast<int>(cfg.number_or("grid", "k_count", 20)));
    const auto ls = logspace(cfg.number_or("grid", "l_min_h", 1e-6), cfg.number_or("grid", "l_max_h", 1e-4),
                             static_cast<int>(cfg.number_or("grid", "l_count", 41)));
    const design::FeasibleRegion region = design::feasible_region(spec, ks, ls, execution(cfg));
    CsvWriter csv(prepare_out(ctx) / "feasible_region.csv", {"k", "l_h", "l_eff_h", "mutual_h", "feasible"});
    for (std::size_t ik = 0; ik < ks.size(); ++ik) {
        for (std::size_t il = 0; il < ls.size(); ++il) {
            const double k = ks[ik];
            const double l = ls[il];
            csv.row({k, l, l * (1 - k * k), k * l, region.at(ik, il) ? 1.0 : 0.0});
        }
    }
    csv.close();
    say(ctx, std::to_string(region.count()) + " of " + std::to_string(ks.size() * ls.size()) +
                 " grid points feasible");
}

void cmd_steady_state(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const ReceiverParams p = receiver_params(cfg);
    const PhaseShift d(cfg.number_or("operating", "d", 0.25));
    const int harmonics = static_cast<int>(cfg.number_or("solver", "n_harmonics", analytics::kDefaultHarmonics));
    const sim::SteadyState ss = sim::periodic_steady_state(p, d, steady_options(cfg));
    const sim::ZvsReport z = sim::zvs_metrics(ss, p);
    const sim::RippleReport rip = sim::ripple_metrics(ss);
    const sim::PowerBalance pb = sim::power_balance(ss, p);
    const analytics::Spectrum sp = analytics::spectrum(ss.waveform, "v_ac", p.fs, harmonics);
    const analytics::OperatingPoint law = analytics::output_operating_point(p, d);

    const auto dir = prepare_out(ctx);
    const sim::Waveform& w = ss.waveform;
    const auto v_ac = w.v_ac();
    const auto i_lm = w.i_lm();
    CsvWriter csv(dir / "waveform.csv",
                  {"t_s", "i_l1_a", "i_l2_a", "v_c1_v", "v_c2_v", "v_o_v", "i_ls_a", "v_ac_v", "i_lm_a"});
    for (std::size_t i = 0; i < w.size(); ++i) {
        csv.row({w.time(i), w.i_l1[i], w.i_l2[i], w.v_c1[i], w.v_c2[i], w.v_o[i], w.i_ls[i], v_ac[i], i_lm[i]});
    }
    csv.close();

    json body;
    body["receiver"] = params_json(p);
    body["d"] = d.value();
    body["fixed_point_residual"] = ss.residual;
    body["zvs"] = {{"v_at_s1_on_v", z.v_at_s1_on},
                   {"v_at_s1_off_v", z.v_at_s1_off},
                   {"v_at_s2_on_v", z.v_at_s2_on},
                   {"v_at_s2_off_v", z.v_at_s2_off},
                   {"v_peak_v", z.v_peak},
                   {"max_relative_residual", z.max_relative_residual()},
                   {"discarded_energy_j", z.discarded_energy_per_cycle}};
    body["ripple"] = {{"i_lm_pp_a", rip.i_lm_pp}, {"i_leg_pp_a", rip.i_lx_pp}, {"v_o_pp_v", rip.v_o_pp}};
    body["thd_vac"] = sp.thd;
    body["max_even_harmonic_ratio"] = sp.max_even_ratio();
    body["v_ac_harmonics_v"] = sp.mags;
    body["power"] = {{"input_w", pb.input}, {"load_w", pb.load}, {"clamp_w", pb.clamp}};
    body["output"] = {{"v_o_sim_v", ss.x0.v_o},
                      {"i_o_sim_a", ss.x0.v_o * p.g_load()},
                      {"v_o_law_v", law.v_o},
                      {"i_o_law_a", law.i_o}};
    write_json(dir / "steady_state.json", std::move(body));
    say(ctx, "v_o = " + fmt(ss.x0.v_o) + " V, THD(v_ac) = " + fmt(sp.thd) + ", ZVS residual = " +
                 fmt(z.max_relative_residual()));
}

void cmd_sweep_d(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const ReceiverParams p = receiver_params(cfg);
    const std::vector<double> ds = cfg.numbers("sweep", "d_values").value_or(linspace(0.0, 0.25, 11));
    const auto pts = sweep::sweep_phase(p, ds, execution(cfg));
    CsvWriter csv(prepare_out(ctx) / "sweep_d.csv",
                  {"d", "i_o_law_a", "v_o_law_v", "i_o_sim_a", "v_o_sim_v", "p_in_sim_w", "zvs_residual"});
    for (const auto& pt : pts) {
        csv.row({pt.d, pt.i_o_law, pt.v_o_law, pt.i_o_sim, pt.v_o_sim, pt.p_in_sim, pt.zvs_residual});
    }
    csv.close();
    say(ctx, std::to_string(pts.size()) + " operating points written");
}

void cmd_bode(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const ReceiverParams p = receiver_params(cfg);
    const control::LoopKind kind = loop_kind(cfg, "bode");
    const std::vector<double> ds = cfg.numbers("bode", "d_values").value_or(std::vector<double>{0.05, 0.10, 0.15});
    const std::vector<double> fs = cfg.numbers("bode", "frequencies_hz")
                                       .value_or(std::vector<double>{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000});
    const bool simulate = cfg.flag_or("bode", "simulate", true);
    sweep::FrequencyResponseOptions opts;
    opts.amplitude = cfg.number_or("bode", "amplitude", opts.amplitude);

    CsvWriter csv(prepare_out(ctx) / "bode.csv",
                  {"d_op", "f_hz", "mag_db_model", "phase_deg_model", "mag_db_sim", "phase_deg_sim"});
    for (double d_raw : ds) {
        const PhaseShift d(d_raw);
        const control::TransferFunction1P tf = control::plant_tf(kind, p, d);
        std::vector<double> f_used = fs;
        std::vector<sweep::FrequencyResponsePoint> simulated;
        if (simulate) {
            simulated = sweep::frequency_response(p, kind, d, fs, opts, execution(cfg));
            for (std::size_t i = 0; i < fs.size(); ++i) {
                f_used[i] = simulated[i].f;
            }
        }
        const auto model = control::bode_points(tf, f_used);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const double nan = std::nan("");
            csv.row({d.value(), f_used[i], model[i].mag_db, model[i].phase_deg,
                     simulate ? simulated[i].mag_db : nan, simulate ? simulated[i].phase_deg : nan});
        }
        say(ctx, "D = " + fmt(d.value()) + ": gain " + fmt(tf.dc_gain) + ", pole " + fmt(tf.pole_hz()) + " Hz");
    }
    csv.close();
}

void cmd_pi_design(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const ReceiverParams p = receiver_params(cfg);
    const control::PIGains g = pi_gains(cfg, p);
    const PhaseShift d_op(cfg.number_or("control", "d_op", 0.125));
    ReceiverParams nominal = p;
    nominal.r_load = cfg.number_or("control", "r_load_nominal_ohm", p.r_load);
    const control::TransferFunction1P tf = control::plant_tf(g.kind, nominal, d_op);
    json body;
    body["gains"] = gains_json(g);
    body["crossover_hz"] = cfg.number_or("control", "crossover_hz", kDefaultCrossoverHz);
    body["fc_multiplier"] = cfg.number_or("control", "fc_multiplier", 1.0);
    body["d_op"] = d_op.value();
    body["plant"] = {{"dc_gain", tf.dc_gain}, {"time_constant_s", tf.time_constant}, {"pole_hz", tf.pole_hz()}};
    write_json(prepare_out(ctx) / "pi_gains.json", std::move(body));
    say(ctx, "kp = " + fmt(g.kp) + ", ki = " + fmt(g.ki) + " 1/s");
}

json event_json(const loop::EventMetrics& m) {
    return json{{"time_s", m.time},
                {"extreme_deviation", m.extreme_deviation},
                {"settling_time_s", m.settling_time},
                {"steady_state_error", m.steady_state_error},
                {"oscillation_reversals", m.oscillation_reversals}};
}

void cmd_transient(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const ReceiverParams p = receiver_params(cfg);
    const control::PIGains g = pi_gains(cfg, p);
    const loop::Scenario sc = scenario(cfg);
    loop::TransientOptions opts;
    opts.band = cfg.number_or("scenario", "band", opts.band);
    opts.tail_window = cfg.number_or("scenario", "tail_window_s", opts.tail_window);
    opts.record_every = static_cast<int>(cfg.number_or("scenario", "record_every", opts.record_every));
    opts.ticks_per_period = static_cast<int>(cfg.number_or("scenario", "ticks_per_period", opts.ticks_per_period));
    opts.settled_start = cfg.flag_or("scenario", "settled_start", opts.settled_start);
    const loop::TransientResult r = loop::run_transient(p, g, sc, opts);

    const auto dir = prepare_out(ctx);
    CsvWriter csv(dir / "transient.csv", {"t_s", "v_o_v", "i_o_a", "d", "integrator"});
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        csv.row({r.t[i], r.v_o[i], r.i_o[i], r.d_command[i], r.integrator[i]});
    }
    csv.close();

    json body;
    body["gains"] = gains_json(g);
    body["reference"] = sc.reference;
    body["final_value"] = r.final_value;
    body["steady_state_error"] = r.steady_state_error;
    body["max_abs_integrator"] = r.max_abs_integrator;
    json events = json::array();
    for (const auto& m : r.events) {
        events.push_back(event_json(m));
    }
    body["events"] = std::move(events);
    write_json(dir / "transient.json", std::move(body));
    say(ctx, "final " + fmt(r.final_value) + " vs reference " + fmt(sc.reference));
}

void cmd_regulation_sweep(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const ReceiverParams p = receiver_params(cfg);
    const control::PIGains g = pi_gains(cfg, p);
    const std::string axis_name = cfg.text("regulation", "axis").value_or("load_power");
    loop::SweepAxis axis = loop::SweepAxis::kLoadPower;
    std::vector<double> fallback{0.2, 0.4, 0.6, 0.8, 1.0};
    if (axis_name == "source_amplitude") {
        axis = loop::SweepAxis::kSourceAmplitude;
        fallback = {0.7, 0.85, 1.0, 1.15, 1.3};
    } else if (axis_name != "load_power") {
        throw ConfigError("regulation.axis must be load_power or source_amplitude, got '" + axis_name + "'");
    }
    const std::vector<double> values = cfg.numbers("regulation", "values").value_or(fallback);
    const double reference =
        cfg.number_or("regulation", "reference", g.kind == control::LoopKind::kVoltage ? 12.0 : 2.0);
    loop::RegulationOptions opts;
    opts.run_time = cfg.number_or("regulation", "run_time_s", opts.run_time);
    opts.max_chunks = static_cast<int>(cfg.number_or("regulation", "max_chunks", opts.max_chunks));
    opts.convergence_tol = cfg.number_or("regulation", "convergence_tol", opts.convergence_tol);

    const auto pts = loop::regulation_sweep(p, g, g.kind, reference, axis, values, opts, execution(cfg));
    CsvWriter csv(prepare_out(ctx) / "regulation_sweep.csv",
                  {"axis_value", "reachable", "r_load_ohm", "i_ls_amp_a", "settled_value", "relative_error",
                   "d_settled", "d_predicted", "converged"});
    for (const auto& pt : pts) {
        csv.row({pt.axis_value, pt.reachable ? 1.0 : 0.0, pt.r_load, pt.i_ls_amp, pt.settled_value,
                 pt.relative_error, pt.d_settled, pt.d_predicted, pt.converged ? 1.0 : 0.0});
        say(ctx, axis_name + " " + fmt(pt.axis_value) + ": " + fmt(pt.settled_value) + " (error " +
                     fmt(pt.relative_error) + ")");
    }
    csv.close();
}

void cmd_sync_check(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const ReceiverParams p = receiver_params(cfg);
    const int periods = static_cast<int>(cfg.number_or("sync", "periods", 50));
    const int spp = static_cast<int>(cfg.number_or("sync", "samples_per_period", 256));
    const double noise = cfg.number_or("sync", "noise_rms_a", 0.0);
    if (periods < 2 || spp < 2 || !(noise >= 0.0)) {
        throw ValidationError("sync: periods >= 2, samples_per_period >= 2, noise_rms_a >= 0");
    }
    pwm::ZeroCrossOptions zc;
    zc.hysteresis_fraction = cfg.number_or("sync", "hysteresis_fraction", noise > 0.0 ? 0.1 : 0.0);
    pwm::PwmOptions po;
    po.ticks_per_period = static_cast<int>(cfg.number_or("sync", "ticks_per_period", po.ticks_per_period));
    po.dead_time = cfg.number_or("sync", "dead_time_s", po.dead_time);
    const PhaseShift d(cfg.number_or("sync", "d", 0.1));

    // i_Ls = |I_Ls| cos(w t) sampled from t = 0; its peaks sit at whole periods.
    std::mt19937_64 rng(ctx.seed.value_or(1));
    std::normal_distribution<double> gauss(0.0, noise);
    const double dt = p.period() / spp;
    std::vector<double> samples(static_cast<std::size_t>(periods) * static_cast<std::size_t>(spp));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double t = static_cast<double>(i) * dt;
        samples[i] = p.i_ls_amp * std::cos(kTwoPi * p.fs * t) + (noise > 0.0 ? gauss(rng) : 0.0);
    }
    const auto edges = pwm::zero_cross_detect(samples, dt, p.fs, zc);
    const pwm::GateTimeline tl = pwm::pwm_generate(edges, d, po);
    const double expected = 0.25 + static_cast<double>(tl.phase_ticks) / tl.ticks_per_period;

    CsvWriter csv(prepare_out(ctx) / "gate_edges.csv",
                  {"cycle", "sync_s", "period_s", "gs1_rise_s", "gs1_fall_s", "gs2_rise_s", "gs2_fall_s",
                   "phase_error_periods"});
    double worst = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < tl.cycles.size(); ++i) {
        const pwm::GateCycle& c = tl.cycles[i];
        const double phase = c.gs1_rise * p.fs - std::floor(c.gs1_rise * p.fs);
        const double err = std::remainder(phase - expected, 1.0);
        worst = std::max(worst, std::abs(err));
        sum += std::abs(err);
        csv.row({static_cast<double>(i), c.sync, c.period, c.gs1_rise, c.gs1_fall, c.gs2_rise, c.gs2_fall, err});
    }
    csv.close();

    json body;
    body["seed"] = ctx.seed.value_or(1);
    body["noise_rms_a"] = noise;
    body["d_quantized"] = static_cast<double>(tl.phase_ticks) / tl.ticks_per_period;
    body["sync_edges"] = edges.size();
    body["expected_edges"] = periods;
    body["cycles"] = tl.cycles.size();
    body["max_abs_phase_error_periods"] = worst;
    body["mean_abs_phase_error_periods"] = tl.cycles.empty() ? 0.0 : sum / static_cast<double>(tl.cycles.size());
    write_json(prepare_out(ctx) / "sync_check.json", std::move(body));
    say(ctx, std::to_string(edges.size()) + " sync edges, worst gate phase error " + fmt(worst) + " periods");
}

} // namespace

const std::vector<CommandInfo>& commands() {
    static const std::vector<CommandInfo> table{
        {"alpha-table", "ZVS resonance ratio alpha(k) and gamma for tuned circuits -> alpha_table.csv",
         {"alpha"}, cmd_alpha_table},
        {"design", "capacitor sizing and three-leg core turns for a (k, L) point -> design.json",
         {"design", "magnetics", "solver"}, cmd_design},
        {"feasible-region", "inductance-window and ripple-bound grid over (k, L) -> feasible_region.csv",
         {"design", "grid", "solver"}, cmd_feasible_region},
        {"steady-state", "periodic steady state, ZVS / ripple / THD summary -> waveform.csv, steady_state.json",
         {"receiver", "operating", "solver"}, cmd_steady_state},
        {"sweep-d", "output current and voltage versus D, law and simulation -> sweep_d.csv",
         {"receiver", "sweep", "solver"}, cmd_sweep_d},
        {"bode", "first-order plant model and simulated frequency response -> bode.csv",
         {"receiver", "bode", "solver"}, cmd_bode},
        {"pi-design", "PI gains with pole cancellation at the requested crossover -> pi_gains.json",
         {"receiver", "control"}, cmd_pi_design},
        {"transient", "cycle-stepped closed loop through load/source steps -> transient.csv, transient.json",
         {"receiver", "control", "scenario"}, cmd_transient},
        {"regulation-sweep", "settled regulation error across load or source amplitude -> regulation_sweep.csv",
         {"receiver", "control", "regulation", "scenario", "solver"}, cmd_regulation_sweep},
        {"sync-check", "comparator sync and phase-shift PWM on a (noisy) source -> gate_edges.csv, sync_check.json",
         {"receiver", "sync"}, cmd_sync_check, true},
    };
    return table;
}

const CommandInfo* find_command(std::string_view name) {
    for (const CommandInfo& c : commands()) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

std::string command_help(const CommandInfo& cmd) {
    std::ostringstream out;
    out << cmd.summary << "\n\n";
    std::string text;
    for (std::string_view s : cmd.sections) {
        // describe_sections takes an initializer list; one call per section keeps it simple.
        const std::string part = describe_sections({s});
        text += part.substr(part.find('\n') + 1);
    }
    out << "Config keys (INI sections; unknown keys are rejected):\n" << text;
    return out.str();
}

int exit_code_for(const std::exception_ptr& error) {
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError&) {
        return kExitConfig;
    } catch (const IoError&) {
        return kExitIo;
    } catch (const ConvergenceError&) {
        return kExitNonConvergence;
    } catch (const std::invalid_argument&) {
        return kExitValidation;
    } catch (...) {
        return kExitInternal;
    }
}

int run_command(const CommandInfo& cmd, const CommandContext& ctx, std::ostream& err) {
    try {
        cmd.run(ctx);
        return kExitOk;
    } catch (const std::exception& e) {
        err << cmd.name << ": " << e.what() << '\n';
        return exit_code_for(std::current_exception());
    }
}

} // namespace wpt::cli

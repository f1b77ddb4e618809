#include "wpt/cli/config.hpp"

#include "wpt/error.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace wpt::cli {

namespace pt = boost::property_tree;

const std::vector<SectionDoc>& config_schema() {
    static const std::vector<SectionDoc> schema{
        {"receiver",
         {{"fs_hz", "switching frequency, Hz (also the i_Ls frequency)"},
          {"i_ls_amp_a", "amplitude of the induced source current i_Ls, A"},
          {"l_h", "self-inductance of each coupled winding, H"},
          {"k", "coupling coefficient; mutual inductance L_m = k L"},
          {"c_f_f", "per-leg resonant capacitance C_f, F (C' = C_AC + C_f)"},
          {"c_ac_f", "differential capacitance C_AC across the AC port, F"},
          {"c_o_f", "output capacitance C_o, F"},
          {"r_load_ohm", "load resistance, ohm ('inf' for open load)"},
          {"v_o_ref_v", "nominal output voltage used by the closed-form waveforms, V"}}},
        {"operating", {{"d", "phase-shift ratio D in [0, 0.25] (gate delay behind the quadrature point)"}}},
        {"solver",
         {{"steps_per_period", "samples per switching period for waveforms (even)"},
          {"tolerance", "relative residual accepted for the periodic fixed point"},
          {"n_harmonics", "harmonics kept in the spectrum / THD"},
          {"parallel", "true to spread sweep points over OpenMP threads"}}},
        {"design",
         {{"v_o_nom_v", "rated output voltage, V"},
          {"i_o_nom_a", "rated output current, A"},
          {"fs_hz", "switching frequency, Hz"},
          {"i_ls_amp_a", "source current amplitude, A (rating ceiling i_o = 1.58 |I_Ls|)"},
          {"ripple_percent", "allowed summed-inductor ripple, percent of i_o_nom (mutual-inductance bound)"},
          {"k", "coupling coefficient of the chosen design point"},
          {"l_h", "winding inductance of the design point, H (default: log-midpoint of the feasible window)"},
          {"ac_fraction", "C_AC / (C_AC + C_f) split of the resonant capacitance"},
          {"c_o_f", "output capacitance for the emitted receiver, F"},
          {"r_load_ohm", "load for the emitted receiver, ohm (default v_o_nom / i_o_nom)"}}},
        {"magnetics",
         {{"enabled", "true to search three-leg core turn counts"},
          {"r1_at_per_wb", "centre-leg reluctance, A-turns/Wb"},
          {"turn_limit", "largest turn count tried per winding"}}},
        {"alpha", {{"k_values", "comma-separated coupling coefficients for the ZVS root table"}}},
        {"grid",
         {{"k_min", "lowest coupling coefficient"},
          {"k_max", "highest coupling coefficient"},
          {"k_count", "number of k samples (linear)"},
          {"l_min_h", "lowest winding inductance, H"},
          {"l_max_h", "highest winding inductance, H"},
          {"l_count", "number of L samples (logarithmic)"}}},
        {"sweep", {{"d_values", "comma-separated phase-shift ratios for the output-law sweep"}}},
        {"bode",
         {{"kind", "'current' (i_o / D) or 'voltage' (v_o / D)"},
          {"d_values", "comma-separated operating points D"},
          {"frequencies_hz", "comma-separated perturbation frequencies, Hz"},
          {"amplitude", "D perturbation amplitude for the simulated response"},
          {"simulate", "false to emit the first-order model only"}}},
        {"control",
         {{"kind", "'current' or 'voltage' regulation"},
          {"crossover_hz", "loop crossover; the PI zero cancels the R_L C_o pole"},
          {"d_op", "operating D for the plant gain 2 pi 1.58 |I_Ls| cos(2 pi D)"},
          {"r_load_nominal_ohm", "load used for the plant pole, ohm (default receiver r_load_ohm)"},
          {"fc_multiplier", "scales crossover_hz (2 pi reads it as rad/s)"},
          {"t_samp_s", "controller sample time, s (default one switching period)"},
          {"anti_windup", "conditional integration while D is saturated"}}},
        {"scenario",
         {{"reference", "set point, V (voltage) or A (current)"},
          {"duration_s", "simulated time, s"},
          {"events", "comma-separated t:load_ohm:value or t:source_a:value steps"},
          {"band", "settling band, fraction of the reference"},
          {"tail_window_s", "window averaged for the steady-state error, s"},
          {"record_every", "keep every n-th switching period in the CSV"},
          {"ticks_per_period", "PWM counter resolution per period"},
          {"settled_start", "start at the predicted steady state instead of rest"}}},
        {"regulation",
         {{"axis", "'load_power' (R = R_nom / x) or 'source_amplitude' (|I_Ls| x)"},
          {"values", "comma-separated axis values x"},
          {"reference", "set point, V or A"},
          {"run_time_s", "simulated time per convergence chunk, s"},
          {"max_chunks", "chunks tried before giving up on convergence"},
          {"convergence_tol", "relative tail-mean change accepted between chunks"}}},
        {"sync",
         {{"periods", "source periods synthesized"},
          {"samples_per_period", "comparator samples per period"},
          {"noise_rms_a", "white noise added to i_Ls before the comparator, A rms"},
          {"hysteresis_fraction", "comparator arming band, fraction of |I_Ls|"},
          {"d", "phase-shift ratio applied by the PWM"},
          {"ticks_per_period", "PWM counter resolution per period"},
          {"dead_time_s", "dead time shaved from each gate edge, s"}}},
    };
    return schema;
}

namespace {

const SectionDoc* find_section(std::string_view name) {
    const auto& schema = config_schema();
    const auto it = std::find_if(schema.begin(), schema.end(), [&](const SectionDoc& s) { return s.name == name; });
    return it == schema.end() ? nullptr : &*it;
}

void check_schema(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
        const SectionDoc* doc = find_section(section);
        if (doc == nullptr) {
            if (body.empty() && !body.data().empty()) {
                throw ConfigError("key '" + section + "' outside any section");
            }
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            const bool known = std::any_of(doc->keys.begin(), doc->keys.end(),
                                           [&](const KeyDoc& k) { return k.key == key; });
            if (!known) {
                throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            }
        }
    }
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view raw, std::string_view where) {
    const std::string s = trim(raw);
    if (s == "inf" || s == "+inf") {
        return std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
        throw ConfigError("expected a number for " + std::string(where) + ", got '" + s + "'");
    }
    return v;
}

std::string where(std::string_view section, std::string_view key) {
    return std::string(section) + "." + std::string(key);
}

} // namespace

std::string describe_sections(std::initializer_list<std::string_view> sections) {
    std::ostringstream out;
    out << "Config keys (INI sections; unknown keys are rejected):\n";
    for (std::string_view name : sections) {
        const SectionDoc* doc = find_section(name);
        if (doc == nullptr) {
            continue;
        }
        out << "  [" << doc->name << "]\n";
        for (const KeyDoc& k : doc->keys) {
            out << "    " << k.key;
            for (std::size_t pad = k.key.size(); pad < 20; ++pad) {
                out << ' ';
            }
            out << k.doc << '\n';
        }
    }
    return out.str();
}

RunConfig::RunConfig(pt::ptree tree) : tree_(std::move(tree)) {}

RunConfig RunConfig::parse(const std::string& text) {
    std::istringstream in(text);
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    check_schema(tree);
    return RunConfig(std::move(tree));
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

bool RunConfig::has(std::string_view section, std::string_view key) const {
    return text(section, key).has_value();
}

std::optional<std::string> RunConfig::text(std::string_view section, std::string_view key) const {
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(std::string(section), '\0'));
    if (!sec) {
        return std::nullopt;
    }
    const auto value = sec->get_optional<std::string>(pt::ptree::path_type(std::string(key), '\0'));
    if (!value) {
        return std::nullopt;
    }
    return trim(*value);
}

std::optional<double> RunConfig::number(std::string_view section, std::string_view key) const {
    const auto raw = text(section, key);
    if (!raw) {
        return std::nullopt;
    }
    return parse_double(*raw, where(section, key));
}

double RunConfig::number_or(std::string_view section, std::string_view key, double fallback) const {
    return number(section, key).value_or(fallback);
}

std::optional<std::vector<double>> RunConfig::numbers(std::string_view section, std::string_view key) const {
    const auto raw = text(section, key);
    if (!raw) {
        return std::nullopt;
    }
    std::vector<double> out;
    std::string_view rest = *raw;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        out.push_back(parse_double(rest.substr(0, comma), where(section, key)));
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
    }
    if (out.empty()) {
        throw ConfigError(where(section, key) + " is an empty list");
    }
    return out;
}

bool RunConfig::flag_or(std::string_view section, std::string_view key, bool fallback) const {
    const auto raw = text(section, key);
    if (!raw) {
        return fallback;
    }
    if (*raw == "true" || *raw == "1" || *raw == "yes" || *raw == "on") {
        return true;
    }
    if (*raw == "false" || *raw == "0" || *raw == "no" || *raw == "off") {
        return false;
    }
    throw ConfigError("expected true/false for " + where(section, key) + ", got '" + *raw + "'");
}

ReceiverParams receiver_params(const RunConfig& cfg) {
    ReceiverParams p = prototype_params();
    p.fs = cfg.number_or("receiver", "fs_hz", p.fs);
    p.i_ls_amp = cfg.number_or("receiver", "i_ls_amp_a", p.i_ls_amp);
    p.l = cfg.number_or("receiver", "l_h", p.l);
    p.k = cfg.number_or("receiver", "k", p.k);
    p.c_f = cfg.number_or("receiver", "c_f_f", p.c_f);
    p.c_ac = cfg.number_or("receiver", "c_ac_f", p.c_ac);
    p.c_o = cfg.number_or("receiver", "c_o_f", p.c_o);
    p.r_load = cfg.number_or("receiver", "r_load_ohm", p.r_load);
    p.v_o_ref = cfg.number_or("receiver", "v_o_ref_v", p.v_o_ref);
    p.validate();
    return p;
}

design::DesignSpec design_spec(const RunConfig& cfg) {
    design::DesignSpec s;
    s.v_o_nom = cfg.number_or("design", "v_o_nom_v", s.v_o_nom);
    s.i_o_nom = cfg.number_or("design", "i_o_nom_a", s.i_o_nom);
    s.fs = cfg.number_or("design", "fs_hz", s.fs);
    s.i_ls_amp = cfg.number_or("design", "i_ls_amp_a", s.i_ls_amp);
    s.ripple_percent = cfg.number_or("design", "ripple_percent", s.ripple_percent);
    s.validate();
    return s;
}

control::LoopKind loop_kind(const RunConfig& cfg, std::string_view section) {
    const std::string kind = cfg.text(section, "kind").value_or("voltage");
    if (kind == "voltage") {
        return control::LoopKind::kVoltage;
    }
    if (kind == "current") {
        return control::LoopKind::kCurrent;
    }
    throw ConfigError(where(section, "kind") + " must be 'current' or 'voltage', got '" + kind + "'");
}

control::PIGains pi_gains(const RunConfig& cfg, const ReceiverParams& p) {
    const control::LoopKind kind = loop_kind(cfg, "control");
    control::PIDesignOptions opts;
    opts.fc_multiplier = cfg.number_or("control", "fc_multiplier", opts.fc_multiplier);
    const double f_c = cfg.number_or("control", "crossover_hz", kDefaultCrossoverHz);
    const PhaseShift d_op(cfg.number_or("control", "d_op", 0.125));
    const double r_nom = cfg.number_or("control", "r_load_nominal_ohm", p.r_load);
    control::PIGains g = control::design_pi(kind, p, f_c, d_op, r_nom, opts);
    g = control::tustin_discretize(g, cfg.number_or("control", "t_samp_s", p.period()));
    g.anti_windup = cfg.flag_or("control", "anti_windup", true);
    return g;
}

std::vector<loop::Event> parse_events(std::string_view text) {
    std::vector<loop::Event> out;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) {
            continue;
        }
        const auto c1 = item.find(':');
        const auto c2 = c1 == std::string::npos ? std::string::npos : item.find(':', c1 + 1);
        if (c2 == std::string::npos) {
            throw ConfigError("event '" + item + "' is not time:kind:value");
        }
        loop::Event e;
        e.time = parse_double(std::string_view(item).substr(0, c1), "scenario.events time");
        const std::string kind = trim(std::string_view(item).substr(c1 + 1, c2 - c1 - 1));
        if (kind == "load_ohm") {
            e.kind = loop::Event::Kind::kLoadResistance;
        } else if (kind == "source_a") {
            e.kind = loop::Event::Kind::kSourceAmplitude;
        } else {
            throw ConfigError("event kind must be load_ohm or source_a, got '" + kind + "'");
        }
        e.value = parse_double(std::string_view(item).substr(c2 + 1), "scenario.events value");
        out.push_back(e);
    }
    return out;
}

loop::Scenario scenario(const RunConfig& cfg) {
    loop::Scenario s;
    s.regulation = loop_kind(cfg, "control");
    s.reference = cfg.number_or("scenario", "reference", s.regulation == control::LoopKind::kVoltage ? 12.0 : 2.0);
    s.duration = cfg.number_or("scenario", "duration_s", s.duration);
    if (const auto ev = cfg.text("scenario", "events")) {
        s.events = parse_events(*ev);
    }
    s.validate();
    return s;
}

} // namespace wpt::cli

#pragma once

// INI-style run configuration. Every physical key carries its unit in the
// name (fs_hz, l_h, c_f_f, ...). Unknown sections or keys are rejected when
// the file is loaded.

#include "wpt/circuit_model.hpp"
#include "wpt/closed_loop.hpp"
#include "wpt/control.hpp"
#include "wpt/design.hpp"

#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wpt::cli {

inline constexpr double kDefaultCrossoverHz = 200.0;

struct KeyDoc {
    std::string_view key;
    std::string_view doc;
};

struct SectionDoc {
    std::string_view name;
    std::vector<KeyDoc> keys;
};

/// Every recognised section and key with its description.
[[nodiscard]] const std::vector<SectionDoc>& config_schema();

/// Help text for the listed sections.
[[nodiscard]] std::string describe_sections(std::initializer_list<std::string_view> sections);

class RunConfig {
public:
    RunConfig() = default;

    /// ConfigError on syntax errors or unknown keys; IoError if unreadable.
    [[nodiscard]] static RunConfig load(const std::filesystem::path& path);
    [[nodiscard]] static RunConfig parse(const std::string& text);

    [[nodiscard]] bool has(std::string_view section, std::string_view key) const;
    [[nodiscard]] std::optional<double> number(std::string_view section, std::string_view key) const;
    [[nodiscard]] double number_or(std::string_view section, std::string_view key, double fallback) const;
    [[nodiscard]] std::optional<std::string> text(std::string_view section, std::string_view key) const;
    [[nodiscard]] std::optional<std::vector<double>> numbers(std::string_view section, std::string_view key) const;
    [[nodiscard]] bool flag_or(std::string_view section, std::string_view key, bool fallback) const;

private:
    explicit RunConfig(boost::property_tree::ptree tree);
    boost::property_tree::ptree tree_;
};

// Typed views. Missing keys fall back to the prototype receiver's values.
[[nodiscard]] ReceiverParams receiver_params(const RunConfig& cfg);
[[nodiscard]] design::DesignSpec design_spec(const RunConfig& cfg);
[[nodiscard]] control::LoopKind loop_kind(const RunConfig& cfg, std::string_view section);
[[nodiscard]] control::PIGains pi_gains(const RunConfig& cfg, const ReceiverParams& p);
[[nodiscard]] loop::Scenario scenario(const RunConfig& cfg);

/// "t:load_ohm:v, t:source_a:v" event list syntax.
[[nodiscard]] std::vector<loop::Event> parse_events(std::string_view text);

} // namespace wpt::cli

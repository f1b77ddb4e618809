#pragma once

// Comma-separated tables with a mandatory header row. Numbers are written
// with 12 significant digits so identical runs give byte-identical files.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace wpt::cli {

/// "%.12g", with nan / inf / -inf spelled out.
[[nodiscard]] std::string format_number(double v);

class CsvWriter {
public:
    /// IoError when the file cannot be created.
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    /// Row width must match the header (std::invalid_argument otherwise).
    void row(const std::vector<double>& values);
    /// IoError if any write failed.
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a header name; std::out_of_range when absent.
    [[nodiscard]] std::size_t column_index(const std::string& name) const;
    [[nodiscard]] std::vector<double> column(const std::string& name) const;
};

/// IoError when unreadable; ConfigError on malformed content.
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

} // namespace wpt::cli

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ase {

/// Appends the shortest decimal that round-trips `v` ("." separator,
/// independent of the global locale).
void append_number(std::string& out, double v);

/// Writes `contents` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Column-oriented CSV table: header row, then one row per index.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    [[nodiscard]] std::string render() const;
};

}  // namespace ase

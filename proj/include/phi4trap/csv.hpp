#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace phi4trap {

/// CSV with a single '#'-prefixed header line; floats printed with 17
/// significant digits so replayed outputs compare bitwise.
struct CsvWriter {
    explicit CsvWriter(std::vector<std::string> columns);

    void add_row(std::span<const double> row);
    void write(const std::filesystem::path& path) const;

    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string format_double(double v);   // %.17g

/// Reads a CsvWriter-style file (header line optional); returns rows.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path);

/// FNV-1a 64-bit over the file bytes, as "fnv1a:%016x".
std::string file_hash(const std::filesystem::path& path);

}  // namespace phi4trap

#pragma once

#include <string>
#include <vector>

namespace edf {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
    int require_column(const std::string& name, const std::string& file) const;
};

/// Reads a comma-separated file. No quoting support; none of the formats in
/// this project emit quoted fields.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const CsvTable& table);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string format_double(double v);  // shortest round-trip representation

}  // namespace edf

#pragma once

#include <string>
#include <vector>

namespace exitspec {

// 17 significant digits so that doubles round-trip exactly through text.
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

// Writes to a sibling temp file and renames over the target.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

} // namespace exitspec

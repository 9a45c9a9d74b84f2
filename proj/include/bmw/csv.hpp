#pragma once

#include <string>
#include <vector>

namespace bmw {

// Header plus string cells. Every row has exactly header.size() cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC-4180-ish: comma separated, optional double-quote quoting with ""
// escapes, LF or CRLF line ends. Throws IoError on structural problems.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

std::string to_csv(const CsvTable& table);

// Quotes a cell only when it needs it.
std::string csv_escape(const std::string& cell);

std::string read_file(const std::string& path);

// Writes to <path>.tmp.<pid> then renames, so readers never see a partial
// file. Creates parent directories.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace bmw

#include "bmw/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "bmw/errors.hpp"

namespace bmw {

namespace {

// Splits one logical CSV record starting at `pos`; advances `pos` past the
// record's line terminator. Quoted cells may contain commas and newlines.
std::vector<std::string> parse_record(const std::string& text, std::size_t& pos) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  while (pos < text.size()) {
    char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          cell.push_back('"');
          pos += 2;
        } else {
          quoted = false;
          ++pos;
        }
      } else {
        cell.push_back(c);
        ++pos;
      }
      continue;
    }
    if (c == '"' && cell.empty()) {
      quoted = true;
      ++pos;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
      ++pos;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      break;
    } else {
      cell.push_back(c);
      ++pos;
    }
  }
  if (quoted) throw IoError("csv: unterminated quoted cell");
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::size_t pos = 0;
  if (text.empty()) throw IoError("csv: empty input");
  table.header = parse_record(text, pos);
  while (pos < text.size()) {
    // Skip blank lines (commonly a trailing newline).
    if (text[pos] == '\n' || text[pos] == '\r') {
      ++pos;
      continue;
    }
    std::vector<std::string> row = parse_record(text, pos);
    if (row.size() != table.header.size()) {
      throw IoError("csv: row " + std::to_string(table.rows.size() + 2) + " has " +
                    std::to_string(row.size()) + " cells, header has " +
                    std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_file(path)); }

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  auto emit_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(row[i]);
    }
    out << '\n';
  };
  emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path);
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target.parent_path().string());
  }
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename temporary file onto " + path);
  }
}

}  // namespace bmw

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "darkbright/common.hpp"

namespace darkbright {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 17 significant digits: enough for bit-exact double round trips, so CSV
/// artifacts can be compared byte for byte across runs.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Write-temp-then-rename so readers never observe a half-written file and
/// failed runs leave nothing behind.
inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw io_error("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw io_error("cannot rename " + tmp.string() + " to " + path.string());
  }
}

inline std::string csv_text(const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw io_error("csv row width does not match header");
    for (size_t i = 0; i < row.size(); ++i)
      out << format_g17(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
  return out.str();
}

inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  write_text_atomic(path, csv_text(header, rows));
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return int(i);
    throw io_error("csv is missing a '" + name + "' column");
  }
};

/// Strict numeric CSV: one header line, comma separators, every cell a
/// finite double.  Errors carry the 1-based line number.
inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  int lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.push_back("");
    return cells;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (table.header.empty()) {
      table.header = split(line);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != table.header.size())
      throw io_error(path.string() + ":" + std::to_string(lineno) +
                     ": expected " + std::to_string(table.header.size()) +
                     " cells, found " + std::to_string(cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        size_t used = 0;
        const double v = std::stod(c, &used);
        if (used != c.size() || !std::isfinite(v)) throw std::invalid_argument(c);
        row.push_back(v);
      } catch (const std::exception&) {
        throw io_error(path.string() + ":" + std::to_string(lineno) +
                       ": cell '" + c + "' is not a finite number");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty())
    throw io_error(path.string() + ": file is empty");
  return table;
}

}  // namespace darkbright

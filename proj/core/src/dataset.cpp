#include "bcsfit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace bcsfit {
namespace {

bool parse_number(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  if (first < last && *first == '+') ++first;
  if (first == last) return false;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

// Splits one record; double quotes group fields and "" is an escaped quote.
std::vector<std::string> split_record(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

const Column* Dataset::find(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Column& Dataset::at(const std::string& name) const {
  const Column* c = find(name);
  if (!c) throw DataError("unknown column '" + name + "'");
  return *c;
}

void Dataset::add_column(Column column) {
  const std::size_t n = column.numeric ? column.values.size() : column.labels.size();
  if (!columns_.empty() && n != rows_) throw DataError("column '" + column.name + "' has wrong length");
  if (find(column.name)) throw DataError("duplicate column '" + column.name + "'");
  if (column.missing.size() != n) column.missing.assign(n, 0);
  rows_ = n;
  columns_.push_back(std::move(column));
}

void Dataset::add_numeric(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.values = std::move(values);
  add_column(std::move(c));
}

void Dataset::add_categorical(std::string name, std::vector<std::string> labels) {
  Column c;
  c.name = std::move(name);
  c.numeric = false;
  c.labels = std::move(labels);
  add_column(std::move(c));
}

Dataset Dataset::drop_missing(const std::vector<std::string>& names, std::size_t* dropped) const {
  std::vector<char> keep(rows_, 1);
  for (const auto& n : names) {
    const Column& c = at(n);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (c.missing[i]) keep[i] = 0;
    }
  }
  Dataset out;
  for (const auto& c : columns_) {
    Column k;
    k.name = c.name;
    k.numeric = c.numeric;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!keep[i]) continue;
      if (c.numeric) {
        k.values.push_back(c.values[i]);
      } else {
        k.labels.push_back(c.labels[i]);
      }
      k.missing.push_back(c.missing[i]);
    }
    out.add_column(std::move(k));
  }
  if (dropped) *dropped = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 0));
  return out;
}

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV input is empty (header row required)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_record(line, options.delimiter);
  const std::size_t width = header.size();
  std::vector<std::vector<std::string>> cells(width);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_record(line, options.delimiter);
    if (fields.size() != width) {
      throw DataError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(width) +
                      " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < width; ++j) cells[j].push_back(fields[j]);
  }
  const auto is_missing = [&](const std::string& s) {
    return std::find(options.missing_tokens.begin(), options.missing_tokens.end(), s) !=
           options.missing_tokens.end();
  };
  Dataset data;
  for (std::size_t j = 0; j < width; ++j) {
    if (header[j].empty()) throw DataError("CSV header has an empty column name");
    Column c;
    c.name = header[j];
    bool numeric = true;
    std::vector<double> values(cells[j].size(), std::nan(""));
    for (std::size_t i = 0; i < cells[j].size(); ++i) {
      const bool miss = is_missing(cells[j][i]);
      c.missing.push_back(miss ? 1 : 0);
      if (!miss && !parse_number(cells[j][i], values[i])) numeric = false;
    }
    c.numeric = numeric;
    if (numeric) {
      c.values = std::move(values);
    } else {
      c.labels = cells[j];
    }
    data.add_column(std::move(c));
  }
  return data;
}

Dataset read_csv_file(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data, char delimiter) {
  const auto& cols = data.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (j) out << delimiter;
    out << cols[j].name;
  }
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) out << delimiter;
      const Column& c = cols[j];
      if (c.missing[i]) {
        out << "NA";
      } else if (c.numeric) {
        out << format_number(c.values[i]);
      } else {
        out << c.labels[i];
      }
    }
    out << '\n';
  }
}

}  // namespace bcsfit

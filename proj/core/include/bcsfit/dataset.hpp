#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcsfit {

struct Column {
  std::string name;
  bool numeric = true;
  std::vector<double> values;       // numeric columns
  std::vector<std::string> labels;  // categorical columns
  std::vector<char> missing;        // one flag per row
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rectangular table of named numeric or categorical columns.
class Dataset {
 public:
  std::size_t rows() const { return rows_; }
  const std::vector<Column>& columns() const { return columns_; }
  const Column* find(const std::string& name) const;
  const Column& at(const std::string& name) const;  // throws DataError

  void add_numeric(std::string name, std::vector<double> values);
  void add_categorical(std::string name, std::vector<std::string> labels);
  void add_column(Column column);

  /// Copy restricted to rows without missing entries in `names`.
  /// `dropped` receives the number of removed rows.
  Dataset drop_missing(const std::vector<std::string>& names, std::size_t* dropped = nullptr) const;

 private:
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

struct CsvOptions {
  char delimiter = ',';
  std::vector<std::string> missing_tokens{"", "NA", "NaN", "nan", "."};
};

/// Header row required. A column is numeric when every non-missing cell parses
/// as a decimal-point number; otherwise categorical. Locale independent.
Dataset read_csv(std::istream& in, const CsvOptions& options = {});
Dataset read_csv_file(const std::string& path, const CsvOptions& options = {});

/// Numbers are written in the shortest form that round-trips.
void write_csv(std::ostream& out, const Dataset& data, char delimiter = ',');

}  // namespace bcsfit

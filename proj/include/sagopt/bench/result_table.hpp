#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sagopt::bench {

using Cell = std::variant<double, std::int64_t, std::string>;

// Rectangular table with ordered metadata. CSV form: one "# key=value" line
// per metadata entry, the header row, then data rows. Doubles are printed with
// 17 significant digits so the text round-trips.
class ResultTable {
 public:
  explicit ResultTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const noexcept { return meta_; }

  // Throws PreconditionError when the row width differs from the header.
  void add_row(std::vector<Cell> row);
  // Replaces an existing key in place, otherwise appends.
  void set_meta(const std::string& key, const std::string& value);
  std::string meta(const std::string& key) const;

  // True when any double cell is NaN or infinite.
  bool has_non_finite() const;
  std::size_t column_index(const std::string& name) const;

  std::string to_csv() const;
  std::string to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

std::string format_double(double v);

// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace sagopt::bench

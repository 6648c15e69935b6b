#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace fastcav {

/// Column-named string table emitted as CSV. Metadata lines are written as
/// "# key=value" before the header.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  void add_row(std::vector<std::string> row);
  void set_meta(const std::string& key, const std::string& value);
  const std::vector<std::pair<std::string, std::string>>& meta() const noexcept { return meta_; }

  std::size_t column_index(const std::string& name) const;
  const std::string& at(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;

  /// Tidy long form: the id columns, then one (metric, value) row per
  /// remaining column.
  Table to_long(const std::vector<std::string>& id_columns) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

/// Shortest round-trippable-enough fixed formatting ("%.12g").
std::string fmt_num(double v);
std::string fmt_num(std::size_t v);
std::string fmt_bool(bool v);

}  // namespace fastcav

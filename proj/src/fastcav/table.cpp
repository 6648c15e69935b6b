#include "fastcav/table.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "fastcav/error.hpp"

namespace fastcav {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << quote(cells[i]);
  }
  out << '\n';
}

}  // namespace

void Table::add_row(std::vector<std::string> row) {
  require(row.size() == columns_.size(), ErrorCode::InvalidArgument, "row width does not match header");
  rows_.push_back(std::move(row));
}

void Table::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : meta_) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  fail(ErrorCode::InvalidArgument, "no column '" + name + "'");
}

const std::string& Table::at(std::size_t row, const std::string& column) const {
  return rows_.at(row).at(column_index(column));
}

double Table::number(std::size_t row, const std::string& column) const { return std::stod(at(row, column)); }

void Table::write_csv(std::ostream& out) const {
  for (const auto& [k, v] : meta_) out << "# " << k << '=' << v << '\n';
  write_line(out, columns_);
  for (const auto& r : rows_) write_line(out, r);
}

void Table::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
  write_csv(out);
  require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + path.string());
}

Table Table::to_long(const std::vector<std::string>& id_columns) const {
  std::vector<std::size_t> ids;
  std::vector<std::string> cols;
  for (const auto& id : id_columns) {
    ids.push_back(column_index(id));
    cols.push_back(id);
  }
  cols.emplace_back("metric");
  cols.emplace_back("value");
  Table out(cols);
  out.meta_ = meta_;
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (std::find(ids.begin(), ids.end(), c) != ids.end()) continue;
      std::vector<std::string> row;
      for (auto i : ids) row.push_back(r[i]);
      row.push_back(columns_[c]);
      row.push_back(r[c]);
      out.add_row(std::move(row));
    }
  }
  return out;
}

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_num(std::size_t v) { return std::to_string(v); }

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

}  // namespace fastcav

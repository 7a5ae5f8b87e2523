#include "sagopt/bench/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "sagopt/errors.hpp"

namespace sagopt::bench {

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw PreconditionError("ResultTable: need at least one column");
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw PreconditionError("ResultTable: row has " + std::to_string(row.size()) + " cells, expected " +
                            std::to_string(columns_.size()));
  rows_.push_back(std::move(row));
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : meta_)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  meta_.emplace_back(key, value);
}

std::string ResultTable::meta(const std::string& key) const {
  for (const auto& kv : meta_)
    if (kv.first == key) return kv.second;
  return {};
}

bool ResultTable::has_non_finite() const {
  for (const auto& r : rows_)
    for (const Cell& c : r)
      if (const double* d = std::get_if<double>(&c); d && !std::isfinite(*d)) return true;
  return false;
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw PreconditionError("ResultTable: no column named " + name);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

}  // namespace

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  for (const auto& [k, v] : meta_) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << csv_field(columns_[i]);
  os << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
    os << '\n';
  }
  return os.str();
}

std::string ResultTable::to_json() const {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta_) j["metadata"][k] = v;
  j["columns"] = columns_;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows_) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (const Cell& c : r) {
      if (const double* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) {
          row.push_back(*d);
        } else {
          row.push_back(format_double(*d));
        }
      } else if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) {
        row.push_back(*i);
      } else {
        row.push_back(std::get<std::string>(c));
      }
    }
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_atomic: cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write_atomic: write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

}  // namespace sagopt::bench

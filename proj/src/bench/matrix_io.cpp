#include "sagopt/bench/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "sagopt/bench/result_table.hpp"
#include "sagopt/errors.hpp"

namespace sagopt::bench {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line, const std::string& why) {
  throw PreconditionError(path.string() + ":" + std::to_string(line) + ": " + why, line);
}

}  // namespace

void write_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() || m.cols() > std::numeric_limits<std::uint32_t>::max())
    throw PreconditionError("write_matrix_binary: dimensions exceed 32 bits");
  std::string out;
  out.reserve(8 + 8 * m.size());
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.flat()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  write_atomic(path, out);
}

Matrix read_matrix_binary(const std::filesystem::path& path) {
  const std::string in = slurp(path);
  if (in.size() < 8) throw PreconditionError(path.string() + ": truncated header");
  const std::size_t rows = get_le(in, 0, 4);
  const std::size_t cols = get_le(in, 4, 4);
  if (in.size() != 8 + 8 * rows * cols)
    throw PreconditionError(path.string() + ": payload size does not match the header");
  Matrix m(rows, cols);
  auto flat = m.flat();
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = std::bit_cast<double>(get_le(in, 8 + 8 * i, 8));
  return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  write_atomic(path, out);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::istringstream in(slurp(path));
  std::string line;
  std::vector<double> data;
  std::size_t cols = 0, rows = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string field;
    std::size_t n = 0;
    while (std::getline(ls, field, ',')) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (field.empty() || (*end != '\0' && *end != '\r')) malformed(path, lineno, "not a number: " + field);
      data.push_back(v);
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols) malformed(path, lineno, "ragged row");
    ++rows;
  }
  if (rows == 0) throw PreconditionError(path.string() + ": empty matrix");
  return Matrix(rows, cols, std::move(data));
}

void write_mask_csv(const std::filesystem::path& path, const std::vector<mc::Entry>& mask, const Vec& values) {
  if (mask.size() != values.size()) throw PreconditionError("write_mask_csv: one value per entry");
  std::string out = "i,j,value\n";
  for (std::size_t e = 0; e < mask.size(); ++e)
    out += std::to_string(mask[e].first) + "," + std::to_string(mask[e].second) + "," + format_double(values[e]) + "\n";
  write_atomic(path, out);
}

std::pair<std::vector<mc::Entry>, Vec> read_mask_csv(const std::filesystem::path& path) {
  std::istringstream in(slurp(path));
  std::string line;
  std::vector<mc::Entry> mask;
  Vec values;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line == "i,j,value") continue;
    unsigned long long i = 0, j = 0;
    char* end = nullptr;
    const char* s = line.c_str();
    i = std::strtoull(s, &end, 10);
    if (end == s || *end != ',') malformed(path, lineno, "expected i,j,value");
    s = end + 1;
    j = std::strtoull(s, &end, 10);
    if (end == s || *end != ',') malformed(path, lineno, "expected i,j,value");
    s = end + 1;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0') malformed(path, lineno, "expected i,j,value");
    mask.emplace_back(i, j);
    values.push_back(v);
  }
  return {std::move(mask), std::move(values)};
}

}  // namespace sagopt::bench

#include "nbse/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace nbse {

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

constexpr char kMagic[5] = {'N', 'B', 'S', 'E', '1'};

double parse_double(const std::string& token, int line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw IoError("line " + std::to_string(line_no) + ": '" + token +
                  "' is not a number");
  return v;
}

}  // namespace

MatrixFormat matrix_format_from_name(const std::string& name) {
  if (name == "csv") return MatrixFormat::csv;
  if (name == "bin") return MatrixFormat::bin;
  throw ConfigError("unknown matrix format '" + name + "'");
}

DataMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ','))
      row.push_back(parse_double(token, line_no));
    if (rows.empty())
      width = row.size();
    else if (row.size() != width)
      throw IoError("line " + std::to_string(line_no) + " has " +
                    std::to_string(row.size()) + " fields, expected " +
                    std::to_string(width));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("matrix file has no rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(width));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < width; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return DataMatrix::from(std::move(m));
}

void write_matrix_csv(std::ostream& out, const DataMatrix& m) {
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.values.cols(); ++j)
      out << (j ? "," : "") << fmt17(m.values(i, j));
    out << '\n';
  }
}

DataMatrix read_matrix_bin(std::istream& in) {
  char magic[5];
  if (!in.read(magic, 5) || !std::equal(magic, magic + 5, kMagic))
    throw IoError("bad magic: not an NBSE1 matrix file");
  std::uint64_t rows = 0, cols = 0;
  if (!in.read(reinterpret_cast<char*>(&rows), 8) ||
      !in.read(reinterpret_cast<char*>(&cols), 8))
    throw IoError("truncated header");
  if (rows == 0 || cols == 0 || rows > (1u << 30) || cols > (1u << 30) ||
      rows * cols > (1u << 30))
    throw IoError("unreasonable matrix dimensions in header");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  std::vector<double> buf(cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    if (!in.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(8 * cols)))
      throw IoError("size mismatch: payload shorter than header promises");
    for (std::uint64_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = buf[j];
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw IoError("size mismatch: trailing bytes after matrix payload");
  return DataMatrix::from(std::move(m));
}

void write_matrix_bin(std::ostream& out, const DataMatrix& m) {
  out.write(kMagic, 5);
  const std::uint64_t rows = static_cast<std::uint64_t>(m.values.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.values.cols());
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  std::vector<double> buf(cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j)
      buf[j] = m.values(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(j));
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(8 * cols));
  }
}

DataMatrix read_matrix_file(const std::string& path, MatrixFormat format) {
  std::ifstream in(path, format == MatrixFormat::bin
                             ? std::ios::binary
                             : std::ios::in);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return format == MatrixFormat::bin ? read_matrix_bin(in)
                                       : read_matrix_csv(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_matrix_file(const std::string& path, const DataMatrix& m,
                       MatrixFormat format) {
  std::ofstream out(path, format == MatrixFormat::bin
                              ? std::ios::binary
                              : std::ios::out);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  if (format == MatrixFormat::bin)
    write_matrix_bin(out, m);
  else
    write_matrix_csv(out, m);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<int> read_labels(std::istream& in) {
  std::vector<int> y;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* begin = line.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
      throw IoError("line " + std::to_string(line_no) + ": '" + line +
                    "' is not an integer label");
    y.push_back(static_cast<int>(v));
  }
  if (y.empty()) throw IoError("label file has no entries");
  return y;
}

void write_labels(std::ostream& out, const std::vector<int>& y) {
  for (int v : y) out << v << '\n';
}

std::vector<int> read_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return read_labels(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_labels_file(const std::string& path, const std::vector<int>& y) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_labels(out, y);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace nbse

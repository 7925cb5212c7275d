#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nbse/data_matrix.hpp"
#include "nbse/errors.hpp"

namespace nbse {

enum class MatrixFormat { csv, bin };

MatrixFormat matrix_format_from_name(const std::string& name);

/// Headerless comma-separated rows; every row must have the same width.
DataMatrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const DataMatrix& m);

/// Magic "NBSE1", little-endian u64 rows, u64 cols, then rows*cols
/// little-endian doubles in row-major order.
DataMatrix read_matrix_bin(std::istream& in);
void write_matrix_bin(std::ostream& out, const DataMatrix& m);

DataMatrix read_matrix_file(const std::string& path, MatrixFormat format);
void write_matrix_file(const std::string& path, const DataMatrix& m,
                       MatrixFormat format);

/// One integer label per line.
std::vector<int> read_labels(std::istream& in);
void write_labels(std::ostream& out, const std::vector<int>& y);
std::vector<int> read_labels_file(const std::string& path);
void write_labels_file(const std::string& path, const std::vector<int>& y);

}  // namespace nbse

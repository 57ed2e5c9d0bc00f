// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_MATRIX_MARKET_HPP
#define BTMOR_MATRIX_MARKET_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace btmor {

// Matrix Market readers and writers. Coordinate and array formats, real or
// integer fields, general or symmetric symmetry. Writers emit full precision
// so a write/read round trip is exact.

Eigen::SparseMatrix<double> read_matrix_market_sparse(std::istream& in);
Eigen::SparseMatrix<double> read_matrix_market_sparse(const std::filesystem::path& file);
Eigen::MatrixXd read_matrix_market_dense(std::istream& in);
Eigen::MatrixXd read_matrix_market_dense(const std::filesystem::path& file);

// Coordinate format, column-major entry order.
void write_matrix_market(std::ostream& out, const Eigen::SparseMatrix<double>& m);
// Array format.
void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& m);

void write_matrix_market(const std::filesystem::path& file, const Eigen::SparseMatrix<double>& m);
void write_matrix_market(const std::filesystem::path& file, const Eigen::MatrixXd& m);

// Shortest decimal form that round-trips a double exactly.
std::string format_double(double v);

// Write-to-temporary-then-rename, so partial files never appear under the
// final name.
void write_file_atomic(const std::filesystem::path& file, const std::string& content);

}  // namespace btmor

#endif  // BTMOR_MATRIX_MARKET_HPP

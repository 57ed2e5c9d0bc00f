// SPDX-License-Identifier: Apache-2.0

#include "btmor/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "btmor/errors.hpp"

namespace btmor {

namespace {

struct MmHeader {
  bool coordinate = true;
  bool symmetric = false;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

MmHeader parse_banner(std::istream& in) {
  std::string banner;
  if (!std::getline(in, banner)) {
    throw ValidationError("matrix market: empty stream");
  }
  std::istringstream bs(banner);
  std::string tag, object, format, field, symmetry;
  bs >> tag >> object >> format >> field >> symmetry;
  if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix") {
    throw ValidationError("matrix market: missing %%MatrixMarket matrix banner");
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format != "coordinate" && format != "array") {
    throw ValidationError("matrix market: unsupported format '" + format + "'");
  }
  if (field != "real" && field != "integer") {
    throw ValidationError("matrix market: unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ValidationError("matrix market: unsupported symmetry '" + symmetry + "'");
  }
  MmHeader h;
  h.coordinate = format == "coordinate";
  h.symmetric = symmetry == "symmetric";
  return h;
}

std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') {
      continue;
    }
    return line;
  }
  throw ValidationError("matrix market: unexpected end of stream");
}

}  // namespace

Eigen::SparseMatrix<double> read_matrix_market_sparse(std::istream& in) {
  const MmHeader h = parse_banner(in);
  std::istringstream sizes(next_data_line(in));
  Eigen::Index rows = 0, cols = 0;
  if (h.coordinate) {
    Eigen::Index nnz = 0;
    if (!(sizes >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
      throw ValidationError("matrix market: bad coordinate size line");
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(h.symmetric ? 2 * nnz : nnz));
    for (Eigen::Index k = 0; k < nnz; ++k) {
      std::istringstream ls(next_data_line(in));
      Eigen::Index i = 0, j = 0;
      double v = 0.0;
      if (!(ls >> i >> j >> v) || i < 1 || j < 1 || i > rows || j > cols) {
        throw ValidationError("matrix market: bad coordinate entry");
      }
      triplets.emplace_back(i - 1, j - 1, v);
      if (h.symmetric && i != j) {
        triplets.emplace_back(j - 1, i - 1, v);
      }
    }
    Eigen::SparseMatrix<double> m(rows, cols);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
  }
  if (!(sizes >> rows >> cols) || rows < 0 || cols < 0) {
    throw ValidationError("matrix market: bad array size line");
  }
  Eigen::MatrixXd dense(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Eigen::Index i0 = h.symmetric ? j : 0;
    for (Eigen::Index i = i0; i < rows; ++i) {
      std::istringstream ls(next_data_line(in));
      double v = 0.0;
      if (!(ls >> v)) {
        throw ValidationError("matrix market: bad array entry");
      }
      dense(i, j) = v;
      if (h.symmetric) {
        dense(j, i) = v;
      }
    }
  }
  return dense.sparseView();
}

Eigen::MatrixXd read_matrix_market_dense(std::istream& in) {
  return Eigen::MatrixXd(read_matrix_market_sparse(in));
}

Eigen::SparseMatrix<double> read_matrix_market_sparse(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ValidationError("cannot open matrix file " + file.string());
  }
  return read_matrix_market_sparse(in);
}

Eigen::MatrixXd read_matrix_market_dense(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ValidationError("cannot open matrix file " + file.string());
  }
  return read_matrix_market_dense(in);
}

std::string format_double(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  // Shortest representation that parses back to the same double.
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_matrix_market(std::ostream& out, const Eigen::SparseMatrix<double>& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (Eigen::Index j = 0; j < m.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it) {
      out << it.row() + 1 << " " << it.col() + 1 << " " << format_double(it.value()) << "\n";
    }
  }
}

void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out << format_double(m(i, j)) << "\n";
    }
  }
}

void write_matrix_market(const std::filesystem::path& file, const Eigen::SparseMatrix<double>& m) {
  std::ostringstream out;
  write_matrix_market(out, m);
  write_file_atomic(file, out.str());
}

void write_matrix_market(const std::filesystem::path& file, const Eigen::MatrixXd& m) {
  std::ostringstream out;
  write_matrix_market(out, m);
  write_file_atomic(file, out.str());
}

void write_file_atomic(const std::filesystem::path& file, const std::string& content) {
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ValidationError("cannot write file " + tmp.string());
    }
    out << content;
    if (!out.flush()) {
      throw ValidationError("short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace btmor

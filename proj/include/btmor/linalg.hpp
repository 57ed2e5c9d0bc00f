// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_LINALG_HPP
#define BTMOR_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <string>
#include <vector>

namespace btmor {

// Reusable LU factorization of a square operator (dense or sparse) supporting
// multi-right-hand-side solves A*Y = R and A^T*Y = R. Immutable once built,
// safe to share across threads.
class Factorization {
public:
  static Factorization dense(const Eigen::MatrixXd& a, std::string name = "A");
  static Factorization sparse(const Eigen::SparseMatrix<double>& a, std::string name = "A");

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  Eigen::MatrixXd solve_transpose(const Eigen::MatrixXd& rhs) const;

  const std::string& name() const { return name_; }
  Eigen::Index dim() const { return dim_; }

private:
  Factorization() = default;

  std::string name_;
  Eigen::Index dim_ = 0;
  // Not const: SparseLU::transpose() is a non-const member. The factors are
  // never mutated after construction.
  std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> dense_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sparse_;
};

inline Factorization factorize(const Eigen::MatrixXd& a, std::string name = "A") {
  return Factorization::dense(a, std::move(name));
}
inline Factorization factorize(const Eigen::SparseMatrix<double>& a, std::string name = "A") {
  return Factorization::sparse(a, std::move(name));
}

// Column orthonormalization with deflation: columns whose norm collapses
// below 1e-10 of their input norm are dropped. Two projection passes keep
// ||Q^T Q - I|| at machine level. Throws NumericalError if nothing survives.
Eigen::MatrixXd orth(const Eigen::MatrixXd& m);

// Orthonormalize m against an orthonormal basis k first, then internally.
// Full deflation is legal here and yields a matrix with zero columns.
Eigen::MatrixXd orth_against(const Eigen::MatrixXd& m, const Eigen::MatrixXd& k);

// orth with provenance: kept[i] is the input column index behind output
// column i (survivor order is preserved). Used where block bookkeeping has
// to survive deflation.
struct OrthResult {
  Eigen::MatrixXd q;
  std::vector<Eigen::Index> kept;
};
OrthResult orth_tracked(const Eigen::MatrixXd& m, const Eigen::MatrixXd* against = nullptr);

// Thin SVD, singular values descending.
struct Svd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};
Svd svd(const Eigen::MatrixXd& m);

// Solve A X + X A^T = -W by Bartels-Stewart: real Schur reduction of A, then
// block back-substitution over the quasi-triangular factor. The result is
// exactly symmetrized. Throws NumericalError when some eigenvalue pair has
// lambda_i + lambda_j ~ 0 (the equation is singular there).
Eigen::MatrixXd solve_lyapunov_dense(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w);

// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& m);
double spectral_norm(const Eigen::MatrixXcd& m);

}  // namespace btmor

#endif  // BTMOR_LINALG_HPP

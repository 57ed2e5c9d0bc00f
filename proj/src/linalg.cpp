// SPDX-License-Identifier: Apache-2.0

#include "btmor/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "btmor/errors.hpp"

namespace btmor {

namespace {

constexpr double kPivotTol = 1e-14;
constexpr double kDeflationTol = 1e-10;

void require_finite(const Eigen::MatrixXd& m, const char* who) {
  if (!m.allFinite()) {
    throw ValidationError(std::string(who) + ": input contains NaN or Inf");
  }
}

}  // namespace

Factorization Factorization::dense(const Eigen::MatrixXd& a, std::string name) {
  if (a.rows() != a.cols()) {
    throw ValidationError("factorize: operator " + name + " is not square");
  }
  require_finite(a, "factorize");
  auto lu = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(a);
  const double scale = a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  const double min_pivot =
      a.size() > 0 ? lu->matrixLU().diagonal().cwiseAbs().minCoeff() : 0.0;
  if (a.size() > 0 && (scale == 0.0 || min_pivot < kPivotTol * scale)) {
    std::ostringstream msg;
    msg << "factorize: operator " << name << " is numerically singular (pivot "
        << min_pivot << ", scale " << scale << ")";
    throw NumericalError(msg.str());
  }
  Factorization f;
  f.name_ = std::move(name);
  f.dim_ = a.rows();
  f.dense_ = std::move(lu);
  return f;
}

Factorization Factorization::sparse(const Eigen::SparseMatrix<double>& a, std::string name) {
  if (a.rows() != a.cols()) {
    throw ValidationError("factorize: operator " + name + " is not square");
  }
  auto lu = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu->compute(a);
  bool ok = lu->info() == Eigen::Success;
  if (ok && a.rows() > 0) {
    // SparseLU does not expose pivots; probe with a known solution instead.
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(a.rows());
    Eigen::VectorXd rhs = a * ones;
    Eigen::VectorXd y = lu->solve(rhs);
    ok = y.allFinite() && (a * y - rhs).norm() <= 1e-6 * (1.0 + rhs.norm());
  }
  if (!ok) {
    throw NumericalError("factorize: operator " + name + " is numerically singular");
  }
  Factorization f;
  f.name_ = std::move(name);
  f.dim_ = a.rows();
  f.sparse_ = std::move(lu);
  return f;
}

Eigen::MatrixXd Factorization::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != dim_) {
    throw ValidationError("solve: right-hand side rows do not match operator " + name_);
  }
  Eigen::MatrixXd y;
  if (dense_) {
    y = dense_->solve(rhs);
  } else {
    y = sparse_->solve(rhs);
  }
  if (!y.allFinite()) {
    throw NumericalError("solve: non-finite solution with operator " + name_);
  }
  return y;
}

Eigen::MatrixXd Factorization::solve_transpose(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != dim_) {
    throw ValidationError("solve: right-hand side rows do not match operator " + name_);
  }
  Eigen::MatrixXd y;
  if (dense_) {
    y = dense_->transpose().solve(rhs);
  } else {
    y = sparse_->transpose().solve(rhs);
  }
  if (!y.allFinite()) {
    throw NumericalError("solve: non-finite solution with operator " + name_ + "^T");
  }
  return y;
}

OrthResult orth_tracked(const Eigen::MatrixXd& m, const Eigen::MatrixXd* against) {
  require_finite(m, "orth");
  if (against != nullptr && against->rows() != m.rows() && against->cols() > 0) {
    throw ValidationError("orth_against: row count mismatch with existing basis");
  }
  const Eigen::Index n = m.rows();
  OrthResult out;
  out.q.resize(n, m.cols());
  Eigen::Index accepted = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Eigen::VectorXd v = m.col(j);
    const double input_norm = v.norm();
    if (input_norm == 0.0) {
      continue;
    }
    for (int pass = 0; pass < 2; ++pass) {
      if (against != nullptr && against->cols() > 0) {
        v.noalias() -= (*against) * (against->transpose() * v);
      }
      if (accepted > 0) {
        auto q = out.q.leftCols(accepted);
        v.noalias() -= q * (q.transpose() * v);
      }
    }
    const double norm = v.norm();
    if (norm < kDeflationTol * input_norm) {
      continue;
    }
    out.q.col(accepted) = v / norm;
    out.kept.push_back(j);
    ++accepted;
  }
  out.q.conservativeResize(n, accepted);
  return out;
}

Eigen::MatrixXd orth(const Eigen::MatrixXd& m) {
  if (m.cols() < 1) {
    throw ValidationError("orth: block has no columns");
  }
  OrthResult r = orth_tracked(m);
  if (r.q.cols() == 0) {
    throw NumericalError("orth: all columns deflated, basis is empty");
  }
  return std::move(r.q);
}

Eigen::MatrixXd orth_against(const Eigen::MatrixXd& m, const Eigen::MatrixXd& k) {
  if (m.cols() < 1) {
    throw ValidationError("orth_against: block has no columns");
  }
  return orth_tracked(m, &k).q;
}

Svd svd(const Eigen::MatrixXd& m) {
  require_finite(m, "svd");
  Eigen::BDCSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out;
  out.u = dec.matrixU();
  out.sigma = dec.singularValues();
  out.v = dec.matrixV();
  return out;
}

namespace {

// Eigenvalues of a 1x1 or 2x2 diagonal block of a real Schur factor.
void block_eigenvalues(const Eigen::MatrixXd& t, Eigen::Index start, Eigen::Index size,
                       std::complex<double> out[2]) {
  if (size == 1) {
    out[0] = {t(start, start), 0.0};
    out[1] = out[0];
    return;
  }
  const double a = t(start, start), b = t(start, start + 1);
  const double c = t(start + 1, start), d = t(start + 1, start + 1);
  const double tr = a + d;
  const double disc = (a - d) * (a - d) + 4.0 * b * c;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    out[0] = {(tr + s) / 2.0, 0.0};
    out[1] = {(tr - s) / 2.0, 0.0};
  } else {
    const double s = std::sqrt(-disc);
    out[0] = {tr / 2.0, s / 2.0};
    out[1] = {tr / 2.0, -s / 2.0};
  }
}

}  // namespace

Eigen::MatrixXd solve_lyapunov_dense(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w) {
  if (a.rows() != a.cols() || w.rows() != w.cols() || a.rows() != w.rows()) {
    throw ValidationError("solve_lyapunov_dense: A and W must be square with equal size");
  }
  require_finite(a, "solve_lyapunov_dense");
  require_finite(w, "solve_lyapunov_dense");
  const Eigen::Index k = a.rows();
  if (k == 0) {
    return Eigen::MatrixXd(0, 0);
  }

  Eigen::RealSchur<Eigen::MatrixXd> schur(a);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("solve_lyapunov_dense: Schur decomposition failed");
  }
  const Eigen::MatrixXd& t = schur.matrixT();
  const Eigen::MatrixXd& q = schur.matrixU();

  // T Y + Y T^T = F with T quasi upper triangular.
  Eigen::MatrixXd f = -q.transpose() * w * q;

  // 1x1 / 2x2 diagonal block layout. Eigen writes exact zeros on the
  // subdiagonal outside 2x2 bumps.
  std::vector<Eigen::Index> starts;
  std::vector<Eigen::Index> sizes;
  for (Eigen::Index i = 0; i < k;) {
    const bool pair = (i + 1 < k) && t(i + 1, i) != 0.0;
    starts.push_back(i);
    sizes.push_back(pair ? 2 : 1);
    i += pair ? 2 : 1;
  }
  const Eigen::Index nb = static_cast<Eigen::Index>(starts.size());

  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index bi = nb - 1; bi >= 0; --bi) {
    const Eigen::Index i0 = starts[bi], si = sizes[bi];
    for (Eigen::Index bj = nb - 1; bj >= 0; --bj) {
      const Eigen::Index j0 = starts[bj], sj = sizes[bj];
      Eigen::MatrixXd rhs = f.block(i0, j0, si, sj);
      const Eigen::Index below = i0 + si;
      if (below < k) {
        rhs.noalias() -= t.block(i0, below, si, k - below) * y.block(below, j0, k - below, sj);
      }
      const Eigen::Index right = j0 + sj;
      if (right < k) {
        rhs.noalias() -= y.block(i0, right, si, k - right) *
                         t.block(j0, right, sj, k - right).transpose();
      }
      // Small Sylvester system (I (x) T_ii + T_jj (x) I) vec(Y_ij) = vec(rhs).
      const Eigen::Index sz = si * sj;
      Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(sz, sz);
      for (Eigen::Index cj = 0; cj < sj; ++cj) {
        sys.block(cj * si, cj * si, si, si) += t.block(i0, i0, si, si);
        for (Eigen::Index ck = 0; ck < sj; ++ck) {
          sys.block(ck * si, cj * si, si, si).diagonal().array() += t(j0 + ck, j0 + cj);
        }
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
      if (!lu.isInvertible()) {
        std::complex<double> li[2], lj[2];
        block_eigenvalues(t, i0, si, li);
        block_eigenvalues(t, j0, sj, lj);
        double worst = std::numeric_limits<double>::infinity();
        for (int u = 0; u < 2; ++u) {
          for (int v = 0; v < 2; ++v) {
            worst = std::min(worst, std::abs(li[u] + lj[v]));
          }
        }
        std::ostringstream msg;
        msg << "solve_lyapunov_dense: eigenvalue pair with |lambda_i + lambda_j| = "
            << worst << " makes the equation singular";
        throw NumericalError(msg.str());
      }
      Eigen::VectorXd vec_rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), sz);
      Eigen::VectorXd sol = lu.solve(vec_rhs);
      y.block(i0, j0, si, sj) = Eigen::Map<Eigen::MatrixXd>(sol.data(), si, sj);
    }
  }

  Eigen::MatrixXd x = q * y * q.transpose();
  x = ((x + x.transpose()) / 2.0).eval();
  if (!x.allFinite()) {
    throw NumericalError("solve_lyapunov_dense: non-finite solution");
  }
  return x;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) {
    return 0.0;
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) {
    return 0.0;
  }
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

}  // namespace btmor

// SPDX-License-Identifier: Apache-2.0

#include "btmor/dense_bt.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "btmor/errors.hpp"
#include "btmor/linalg.hpp"

namespace btmor {

double HsvSpectrum::total() const {
  return std::accumulate(sigmas.begin(), sigmas.end(), 0.0);
}

double HsvSpectrum::tail_bound(Eigen::Index r) const {
  double tail = 0.0;
  for (std::size_t i = static_cast<std::size_t>(std::max<Eigen::Index>(r, 0));
       i < sigmas.size(); ++i) {
    tail += sigmas[i];
  }
  return 2.0 * tail;
}

OrderRequest OrderRequest::fixed(Eigen::Index r) {
  if (r < 1) {
    throw ValidationError("choose_order: fixed order must be at least 1");
  }
  OrderRequest q;
  q.is_fixed = true;
  q.r = r;
  return q;
}

OrderRequest OrderRequest::target(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw ValidationError("choose_order: target error must be positive");
  }
  OrderRequest q;
  q.is_fixed = false;
  q.epsilon = epsilon;
  return q;
}

GramianPair solve_gramians_dense(const DescriptorSystem& sys) {
  const Eigen::Index N = sys.order();
  if (N == 0) {
    throw ValidationError("solve_gramians_dense: empty system");
  }
  const Factorization fc = factorize(sys.C, "C");
  const Eigen::MatrixXd a = fc.solve(Eigen::MatrixXd(sys.G));
  const Eigen::MatrixXd bc = fc.solve(sys.B);

  // Stability gate: every eigenvalue of C^-1 G must sit strictly in the left
  // half-plane, otherwise the Gramians do not exist.
  Eigen::EigenSolver<Eigen::MatrixXd> eig(a, false);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("solve_gramians_dense: eigenvalue computation failed");
  }
  const double margin = -1e-12 * a.norm();
  std::ostringstream offenders;
  int bad = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const std::complex<double> lambda = eig.eigenvalues()(i);
    if (lambda.real() >= margin) {
      if (bad++ < 5) {
        offenders << (bad > 1 ? ", " : "") << lambda;
      }
    }
  }
  if (bad > 0) {
    std::ostringstream msg;
    msg << "solve_gramians_dense: system is not strictly stable; " << bad
        << " eigenvalue(s) at or right of the margin: " << offenders.str();
    throw NumericalError(msg.str());
  }

  GramianPair g;
  g.P = solve_lyapunov_dense(a, bc * bc.transpose());
  g.Q = solve_lyapunov_dense(a.transpose(), sys.L.transpose() * sys.L);
  return g;
}

Eigen::MatrixXd gramian_sqrt_factor(const Eigen::MatrixXd& gramian) {
  const Svd dec = svd(gramian);
  return dec.u * dec.sigma.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

HsvSpectrum hankel_singular_values(const Eigen::MatrixXd& zq, const Eigen::MatrixXd& zp) {
  const Svd dec = svd(zq.transpose() * zp);
  HsvSpectrum h;
  h.sigmas.assign(dec.sigma.data(), dec.sigma.data() + dec.sigma.size());
  return h;
}

HsvSpectrum hankel_singular_values(const GramianPair& gram) {
  return hankel_singular_values(gramian_sqrt_factor(gram.Q), gramian_sqrt_factor(gram.P));
}

Eigen::Index hsv_numerical_rank(const HsvSpectrum& hsv) {
  if (hsv.sigmas.empty()) {
    return 0;
  }
  const double guard = 1e-12 * hsv.sigmas.front();
  Eigen::Index rank = 0;
  while (rank < hsv.size() && hsv.sigmas[static_cast<std::size_t>(rank)] > guard) {
    ++rank;
  }
  return rank;
}

Eigen::Index choose_order(const HsvSpectrum& hsv, const OrderRequest& request) {
  const Eigen::Index len = hsv.size();
  if (len == 0) {
    throw ValidationError("choose_order: empty spectrum");
  }
  if (request.is_fixed) {
    return std::min(request.r, len);
  }
  const double total = hsv.total();
  if (total == 0.0) {
    return 1;
  }
  double tail = total;
  for (Eigen::Index r = 1; r <= len; ++r) {
    tail -= hsv.sigmas[static_cast<std::size_t>(r - 1)];
    if (tail / total <= request.epsilon) {
      return r;
    }
  }
  return len;
}

Rom balance_truncate(const DescriptorSystem& sys, const Eigen::MatrixXd& zp,
                     const Eigen::MatrixXd& zq, Eigen::Index r) {
  if (zp.rows() != sys.order() || zq.rows() != sys.order()) {
    throw ValidationError("balance_truncate: factor row counts must match the system order");
  }
  if (r < 1) {
    throw ValidationError("balance_truncate: r must be at least 1");
  }
  const Svd dec = svd(zq.transpose() * zp);
  const Eigen::Index available = dec.sigma.size();
  Eigen::Index rank = 0;
  const double guard = available > 0 ? 1e-12 * dec.sigma(0) : 0.0;
  while (rank < available && dec.sigma(rank) > guard) {
    ++rank;
  }
  if (r > rank) {
    std::ostringstream msg;
    msg << "balance_truncate: requested order " << r << " exceeds the numerical rank " << rank
        << " of Zq^T Zp; the maximum admissible order is " << rank;
    throw NumericalError(msg.str());
  }

  const Eigen::VectorXd inv_sqrt =
      dec.sigma.head(r).cwiseSqrt().cwiseInverse();
  // T = S^-1/2 U^T Zq^T,  T^-1 = Zp V S^-1/2. The Gramians balance the
  // standard-form realization (C^-1 G, C^-1 B, L) — the one the HSV error
  // bound is stated for — so the transform is applied to that realization:
  // C^-1 folds into the left projector and the reduced C is the identity.
  const Eigen::MatrixXd t = inv_sqrt.asDiagonal() * dec.u.leftCols(r).transpose() *
                            zq.transpose();
  const Eigen::MatrixXd t_inv = zp * dec.v.leftCols(r) * inv_sqrt.asDiagonal();
  const Factorization fc = factorize(sys.C, "C");

  Rom rom;
  rom.G = t * fc.solve(sys.G * t_inv);
  rom.C = Eigen::MatrixXd::Identity(r, r);
  rom.B = t * fc.solve(sys.B);
  rom.L = sys.L * t_inv;
  rom.retained_hsvs.assign(dec.sigma.data(), dec.sigma.data() + r);
  double tail = 0.0;
  for (Eigen::Index i = r; i < available; ++i) {
    tail += dec.sigma(i);
  }
  rom.apriori_bound = 2.0 * tail;
  rom.in_ports = sys.in_ports;
  rom.out_ports = sys.out_ports;
  return rom;
}

Rom reduce_dense(const DescriptorSystem& sys, const OrderRequest& request) {
  const GramianPair gram = solve_gramians_dense(sys);
  const Eigen::MatrixXd zp = gramian_sqrt_factor(gram.P);
  const Eigen::MatrixXd zq = gramian_sqrt_factor(gram.Q);
  const HsvSpectrum hsv = hankel_singular_values(zq, zp);
  Eigen::Index r = choose_order(hsv, request);
  if (!request.is_fixed) {
    // The target-error rule may land past the numerical rank when the tail is
    // pure noise; clamp there instead of failing.
    r = std::max<Eigen::Index>(1, std::min(r, hsv_numerical_rank(hsv)));
  }
  Rom rom = balance_truncate(sys, zp, zq, r);
  rom.provenance = RomProvenance::dense;
  return rom;
}

}  // namespace btmor

// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_DENSE_BT_HPP
#define BTMOR_DENSE_BT_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "btmor/descriptor.hpp"

namespace btmor {

// Controllability (P) and observability (Q) Gramians, symmetric PSD.
struct GramianPair {
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
};

// Hankel singular values, descending.
struct HsvSpectrum {
  std::vector<double> sigmas;

  Eigen::Index size() const { return static_cast<Eigen::Index>(sigmas.size()); }
  double total() const;
  // Twice the discarded tail: the a-priori transfer-function error bound when
  // r values are retained.
  double tail_bound(Eigen::Index r) const;
};

// Either a fixed reduced order or a relative HSV tail target: the smallest r
// with sum(sigma[i], i > r) / sum(sigma) <= epsilon.
struct OrderRequest {
  static OrderRequest fixed(Eigen::Index r);
  static OrderRequest target(double epsilon);

  bool is_fixed = false;
  Eigen::Index r = 0;
  double epsilon = 0.0;
};

enum class RomProvenance { dense, eksm };

// Reduced-order model: r-state descriptor quadruple plus the retained HSVs
// and the a-priori error bound that came with the truncation.
struct Rom {
  Eigen::MatrixXd G;  // r x r
  Eigen::MatrixXd C;  // r x r
  Eigen::MatrixXd B;  // r x p
  Eigen::MatrixXd L;  // q x r
  std::vector<double> retained_hsvs;
  double apriori_bound = 0.0;
  RomProvenance provenance = RomProvenance::dense;
  int iterations = 0;  // EKSM passes; 0 for the dense path
  std::vector<std::string> in_ports, out_ports;

  Eigen::Index order() const { return G.rows(); }
  Eigen::Index num_inputs() const { return B.cols(); }
  Eigen::Index num_outputs() const { return L.rows(); }
};

// Solve the two Lyapunov equations
//   (C^-1 G) P + P (C^-1 G)^T = -(C^-1 B)(C^-1 B)^T
//   (C^-1 G)^T Q + Q (C^-1 G) = -L^T L
// densely. Checks that C^-1 G is strictly stable first and reports offending
// eigenvalues otherwise.
GramianPair solve_gramians_dense(const DescriptorSystem& sys);

// Square-root method: sigma = singular values of Zq^T Zp where P = Zp Zp^T,
// Q = Zq Zq^T.
HsvSpectrum hankel_singular_values(const GramianPair& gram);
HsvSpectrum hankel_singular_values(const Eigen::MatrixXd& zq, const Eigen::MatrixXd& zp);

// Gramian square root Z with M = Z Z^T via symmetric SVD.
Eigen::MatrixXd gramian_sqrt_factor(const Eigen::MatrixXd& gramian);

Eigen::Index choose_order(const HsvSpectrum& hsv, const OrderRequest& request);

// Count of singular values above the truncation guard 1e-12 * sigma_1; the
// largest admissible reduced order.
Eigen::Index hsv_numerical_rank(const HsvSpectrum& hsv);

// Square-root balanced truncation from Gramian factors. r must stay within
// the numerical rank of Zq^T Zp (singular values above 1e-12 of the largest).
Rom balance_truncate(const DescriptorSystem& sys, const Eigen::MatrixXd& zp,
                     const Eigen::MatrixXd& zq, Eigen::Index r);

// Dense end-to-end reduction: Gramians, HSVs, order selection, truncation.
Rom reduce_dense(const DescriptorSystem& sys, const OrderRequest& request);

}  // namespace btmor

#endif  // BTMOR_DENSE_BT_HPP

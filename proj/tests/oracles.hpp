// SPDX-License-Identifier: Apache-2.0

// Test-only oracles and fixtures. Everything here deliberately avoids the
// library's solver paths: the Lyapunov oracle goes through the Kronecker
// normal equations and the HSV oracle through a plain eigendecomposition.

#ifndef BTMOR_TESTS_ORACLES_HPP
#define BTMOR_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "btmor/bundle.hpp"
#include "btmor/descriptor.hpp"
#include "btmor/generate.hpp"
#include "btmor/netlist.hpp"

namespace btmor::test {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform(double lo = -1.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }
};

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = rng.uniform();
    }
  }
  return m;
}

// Strictly stable by construction: the symmetric part is -(I + F F^T / 2).
inline Eigen::MatrixXd random_stable_matrix(Eigen::Index k, Rng& rng) {
  const Eigen::MatrixXd f = random_matrix(k, k, rng);
  const Eigen::MatrixXd s = random_matrix(k, k, rng);
  return -(Eigen::MatrixXd::Identity(k, k) + 0.5 * f * f.transpose()) +
         (s - s.transpose());
}

inline Eigen::MatrixXd random_psd(Eigen::Index k, Eigen::Index rank, Rng& rng) {
  const Eigen::MatrixXd f = random_matrix(k, rank, rng);
  return f * f.transpose();
}

// Brute-force Lyapunov solution of A X + X A^T = -W through the Kronecker
// normal equations (I (x) A + A (x) I) vec(X) = -vec(W).
inline Eigen::MatrixXd lyapunov_kron_oracle(const Eigen::MatrixXd& a,
                                            const Eigen::MatrixXd& w) {
  const Eigen::Index k = a.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
  Eigen::MatrixXd big = Eigen::kroneckerProduct(eye, a).eval();
  big += Eigen::kroneckerProduct(a, eye).eval();
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(w.data(), k * k);
  const Eigen::VectorXd x = big.partialPivLu().solve(rhs);
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), k, k);
}

// HSVs as sqrt of the eigenvalues of P*Q, no square-root factors involved.
inline std::vector<double> hsv_eig_oracle(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(p * q, false);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    out.push_back(std::sqrt(std::max(es.eigenvalues()(i).real(), 0.0)));
  }
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

// C = 1, G = -1, B = 1, L = 1: H(s) = 1/(s+1), P = Q = 1/2, sigma = 1/2.
inline DescriptorSystem scalar_system() {
  Eigen::SparseMatrix<double> g(1, 1), c(1, 1);
  g.insert(0, 0) = -1.0;
  c.insert(0, 0) = 1.0;
  Eigen::MatrixXd b = Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd l = Eigen::MatrixXd::Ones(1, 1);
  return make_descriptor(g, c, b, l, 1, 0, {"p1"}, {"p1"});
}

inline DescriptorSystem ladder_system(int sections, int ports, std::uint64_t seed) {
  return assemble_mna(parse_netlist(generate_ladder({sections, ports, seed})));
}

inline DescriptorSystem mesh_system(int rows, int cols, int ports, std::uint64_t seed) {
  return assemble_mna(parse_netlist(generate_mesh({rows, cols, ports, seed})));
}

inline DescriptorSystem coupled_system(int lines, int sections, double density,
                                       std::uint64_t seed) {
  return assemble_mna(
      parse_netlist(generate_coupled_lines({lines, sections, density, seed})));
}

}  // namespace btmor::test

#endif  // BTMOR_TESTS_ORACLES_HPP

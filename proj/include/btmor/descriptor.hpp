// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_DESCRIPTOR_HPP
#define BTMOR_DESCRIPTOR_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

#include "btmor/netlist.hpp"

namespace btmor {

// Descriptor-form circuit model C x' = G x + B u, y = L x, with the MNA
// block layout
//   G = -[[Gn, E], [-E^T, 0]],  C = [[Cn, 0], [0, M]],
//   B = [B1; 0],                L = [L1, 0],
// where the first n states are node voltages and the last m states are
// inductive branch currents, N = n + m.
struct DescriptorSystem {
  Eigen::SparseMatrix<double> G;  // N x N
  Eigen::SparseMatrix<double> C;  // N x N
  Eigen::MatrixXd B;              // N x p
  Eigen::MatrixXd L;              // q x N
  Eigen::Index n = 0;             // node count
  Eigen::Index m = 0;             // inductive branch count
  std::vector<std::string> in_ports;   // size p, column order of B
  std::vector<std::string> out_ports;  // size q, row order of L
  std::vector<std::string> warnings;   // assembly diagnostics (floating nodes)

  Eigen::Index order() const { return n + m; }
  Eigen::Index num_inputs() const { return B.cols(); }
  Eigen::Index num_outputs() const { return L.rows(); }
};

// Stamp the MNA matrices from a parsed netlist. Current-injection ports:
// B1 puts +1 at (port node, port column) and L1 = B1^T for inout ports, so
// H(s) is an impedance matrix. Floating nodes are reported in warnings; an
// indefinite inductance matrix is a hard error.
DescriptorSystem assemble_mna(const Netlist& nl);

// Add c_min to every diagonal of Cn whose row is entirely zero (states with
// no capacitance), then verify C factors. The balanced-truncation path needs
// a nonsingular C.
DescriptorSystem regularize(const DescriptorSystem& sys, double c_min = 1e-18);

// Assemble a system directly from matrices (matrix-bundle input path and
// tests). Only dimensions are checked, not the MNA block structure.
DescriptorSystem make_descriptor(Eigen::SparseMatrix<double> g, Eigen::SparseMatrix<double> c,
                                 Eigen::MatrixXd b, Eigen::MatrixXd l, Eigen::Index n,
                                 Eigen::Index m, std::vector<std::string> in_ports,
                                 std::vector<std::string> out_ports);

}  // namespace btmor

#endif  // BTMOR_DESCRIPTOR_HPP

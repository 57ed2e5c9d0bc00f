// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_GENERATE_HPP
#define BTMOR_GENERATE_HPP

#include <cstdint>
#include <string>

namespace btmor {

// Synthetic benchmark netlists: stable passive RLCk fixtures with moderate
// conditioning, byte-identical for a fixed seed.

// RLC chain: per section one series inductor branch plus shunt R and C at the
// new node; shunt R and C at the port node too. n = sections + 1,
// m = sections. Ports spread over the chain starting at node 1.
struct LadderSpec {
  int sections = 8;
  int ports = 1;
  std::uint64_t seed = 1;
};
std::string generate_ladder(const LadderSpec& spec);

// RC grid: resistors on grid edges, a capacitor at every node, termination
// resistors to ground at the port corners. No inductors (m = 0).
struct MeshSpec {
  int rows = 4;
  int cols = 4;
  int ports = 2;  // up to 4, placed at the corners
  std::uint64_t seed = 1;
};
std::string generate_mesh(const MeshSpec& spec);

// Coupled transmission lines, lumped: each line is an L-section ladder with
// shunt C and loss R, terminated to ground; mutual couplings between
// same-section inductors of adjacent lines with the given density. One port
// per line input.
struct CoupledLinesSpec {
  int lines = 4;
  int sections = 10;
  double coupling_density = 0.3;  // probability in [0, 1]
  std::uint64_t seed = 1;
};
std::string generate_coupled_lines(const CoupledLinesSpec& spec);

}  // namespace btmor

#endif  // BTMOR_GENERATE_HPP

// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_NETLIST_HPP
#define BTMOR_NETLIST_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace btmor {

enum class PortDirection { in, out, inout };

struct Resistor {
  std::string id;
  std::string node_a, node_b;
  double ohms;
};

struct Capacitor {
  std::string id;
  std::string node_a, node_b;
  double farads;
};

struct Inductor {
  std::string id;  // branch identity, referenced by couplings
  std::string node_a, node_b;
  double henries;
};

struct MutualCoupling {
  std::string id;
  std::string inductor_a, inductor_b;
  double k;  // dimensionless, |k| < 1
};

struct Port {
  std::string name;
  std::string node;
  PortDirection direction = PortDirection::inout;
};

// Parsed RLCk netlist. Node names exclude ground "0" and keep first-appearance
// order; that order defines the node indices of the assembled system.
struct Netlist {
  std::vector<Resistor> resistors;
  std::vector<Capacitor> capacitors;
  std::vector<Inductor> inductors;
  std::vector<MutualCoupling> couplings;
  std::vector<Port> ports;
  std::vector<std::string> node_names;

  std::size_t node_count() const { return node_names.size(); }
  std::size_t branch_count() const { return inductors.size(); }
};

// Line-oriented grammar, case-insensitive element keys:
//   R<id> nodeA nodeB ohms
//   C<id> nodeA nodeB farads
//   L<id> nodeA nodeB henries
//   K<id> Lid1 Lid2 k
//   P<id> name node [in|out|inout]
//   * comment, blank lines ignored
// Ground is node "0". Throws ValidationError with a line number on bad input.
Netlist parse_netlist(std::istream& in);
Netlist parse_netlist(const std::string& text);

}  // namespace btmor

#endif  // BTMOR_NETLIST_HPP

// SPDX-License-Identifier: Apache-2.0

#include "btmor/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "btmor/errors.hpp"

namespace btmor {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ValidationError("netlist line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    tokens.push_back(tok);
  }
  return tokens;
}

double parse_value(const std::string& tok, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    fail(line, "cannot parse number '" + tok + "'");
  }
  return v;
}

double parse_positive(const std::string& tok, int line) {
  const double v = parse_value(tok, line);
  if (!(v > 0.0)) {
    fail(line, "element value must be strictly positive, got '" + tok + "'");
  }
  return v;
}

}  // namespace

Netlist parse_netlist(std::istream& in) {
  Netlist nl;
  std::unordered_set<std::string> seen_nodes;
  std::unordered_map<std::string, int> inductor_lines;  // id -> declaring line
  std::vector<std::pair<int, std::size_t>> coupling_lines;
  std::unordered_set<std::string> port_names;

  auto touch_node = [&](const std::string& name) {
    if (name == "0") {
      return;  // ground carries no unknown
    }
    if (seen_nodes.insert(name).second) {
      nl.node_names.push_back(name);
    }
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const auto tokens = tokenize(line);
    if (tokens.empty() || tokens.front()[0] == '*') {
      continue;
    }
    const std::string key = upper(tokens.front());
    switch (key[0]) {
      case 'R': {
        if (tokens.size() != 4) {
          fail(lineno, "expected 'R<id> nodeA nodeB ohms'");
        }
        if (tokens[1] == tokens[2]) {
          fail(lineno, "element shorts a node to itself");
        }
        nl.resistors.push_back({key, tokens[1], tokens[2], parse_positive(tokens[3], lineno)});
        touch_node(tokens[1]);
        touch_node(tokens[2]);
        break;
      }
      case 'C': {
        if (tokens.size() != 4) {
          fail(lineno, "expected 'C<id> nodeA nodeB farads'");
        }
        if (tokens[1] == tokens[2]) {
          fail(lineno, "element shorts a node to itself");
        }
        nl.capacitors.push_back({key, tokens[1], tokens[2], parse_positive(tokens[3], lineno)});
        touch_node(tokens[1]);
        touch_node(tokens[2]);
        break;
      }
      case 'L': {
        if (tokens.size() != 4) {
          fail(lineno, "expected 'L<id> nodeA nodeB henries'");
        }
        if (tokens[1] == tokens[2]) {
          fail(lineno, "element shorts a node to itself");
        }
        if (!inductor_lines.emplace(key, lineno).second) {
          fail(lineno, "duplicate inductor branch id '" + key + "' (first on line " +
                           std::to_string(inductor_lines[key]) + ")");
        }
        nl.inductors.push_back({key, tokens[1], tokens[2], parse_positive(tokens[3], lineno)});
        touch_node(tokens[1]);
        touch_node(tokens[2]);
        break;
      }
      case 'K': {
        if (tokens.size() != 4) {
          fail(lineno, "expected 'K<id> Lid1 Lid2 k'");
        }
        const double k = parse_value(tokens[3], lineno);
        if (!(std::abs(k) < 1.0)) {
          fail(lineno, "coupling coefficient must satisfy |k| < 1, got '" + tokens[3] + "'");
        }
        nl.couplings.push_back({key, upper(tokens[1]), upper(tokens[2]), k});
        coupling_lines.emplace_back(lineno, nl.couplings.size() - 1);
        break;
      }
      case 'P': {
        if (tokens.size() != 3 && tokens.size() != 4) {
          fail(lineno, "expected 'P<id> name node [in|out|inout]'");
        }
        PortDirection dir = PortDirection::inout;
        if (tokens.size() == 4) {
          const std::string d = upper(tokens[3]);
          if (d == "IN") {
            dir = PortDirection::in;
          } else if (d == "OUT") {
            dir = PortDirection::out;
          } else if (d == "INOUT") {
            dir = PortDirection::inout;
          } else {
            fail(lineno, "port direction must be in, out or inout");
          }
        }
        if (!port_names.insert(tokens[1]).second) {
          fail(lineno, "duplicate port name '" + tokens[1] + "'");
        }
        nl.ports.push_back({tokens[1], tokens[2], dir});
        break;
      }
      default:
        fail(lineno, "unknown element '" + tokens.front() + "'");
    }
  }

  // Couplings may reference inductors declared later; validate after parsing.
  std::unordered_set<std::string> pairs;
  for (const auto& [lno, idx] : coupling_lines) {
    const MutualCoupling& kc = nl.couplings[idx];
    for (const std::string* ref : {&kc.inductor_a, &kc.inductor_b}) {
      if (inductor_lines.find(*ref) == inductor_lines.end()) {
        fail(lno, "coupling references undeclared inductor '" + *ref + "'");
      }
    }
    if (kc.inductor_a == kc.inductor_b) {
      fail(lno, "coupling must reference two distinct inductors");
    }
    std::string pair_key = std::min(kc.inductor_a, kc.inductor_b) + "|" +
                           std::max(kc.inductor_a, kc.inductor_b);
    if (!pairs.insert(pair_key).second) {
      fail(lno, "duplicate coupling between '" + kc.inductor_a + "' and '" + kc.inductor_b + "'");
    }
  }
  for (const Port& p : nl.ports) {
    if (p.node != "0" && seen_nodes.find(p.node) == seen_nodes.end()) {
      throw ValidationError("port '" + p.name + "' references node '" + p.node +
                            "' that no element touches");
    }
    if (p.node == "0") {
      throw ValidationError("port '" + p.name + "' may not sit on ground");
    }
  }
  return nl;
}

Netlist parse_netlist(const std::string& text) {
  std::istringstream in(text);
  return parse_netlist(in);
}

}  // namespace btmor

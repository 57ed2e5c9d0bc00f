// SPDX-License-Identifier: Apache-2.0

#include "btmor/generate.hpp"

#include <algorithm>
#include <sstream>

#include "btmor/errors.hpp"
#include "btmor/matrix_market.hpp"

namespace btmor {

namespace {

// splitmix64: tiny, seedable, stable across platforms. Library engines are
// not guaranteed bit-stable between standard library implementations, and
// generated fixtures must be byte-identical for a seed.
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
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }
};

std::string num(double v) { return format_double(v); }

}  // namespace

std::string generate_ladder(const LadderSpec& spec) {
  if (spec.sections < 1 || spec.ports < 1 || spec.ports > spec.sections + 1) {
    throw ValidationError("generate_ladder: need sections >= 1 and 1 <= ports <= sections+1");
  }
  Rng rng(spec.seed);
  std::ostringstream out;
  out << "* RLC ladder: sections=" << spec.sections << " ports=" << spec.ports
      << " seed=" << spec.seed << "\n";
  // Near-uniform low-Q sections: smooth in-band response and fast HSV decay.
  const int nodes = spec.sections + 1;
  for (int s = 1; s <= spec.sections; ++s) {
    out << "L" << s << " " << s << " " << s + 1 << " " << num(rng.uniform(2e-10, 3e-10))
        << "\n";
  }
  for (int i = 1; i <= nodes; ++i) {
    out << "R" << i << " " << i << " 0 " << num(rng.uniform(40.0, 80.0)) << "\n";
    out << "C" << i << " " << i << " 0 " << num(rng.uniform(1.8e-13, 2.2e-13)) << "\n";
  }
  for (int j = 0; j < spec.ports; ++j) {
    const int node =
        spec.ports == 1 ? 1 : 1 + (j * spec.sections + (spec.ports - 1) / 2) / (spec.ports - 1);
    out << "P" << j + 1 << " p" << j + 1 << " " << std::min(node, nodes) << "\n";
  }
  return out.str();
}

std::string generate_mesh(const MeshSpec& spec) {
  if (spec.rows < 2 || spec.cols < 2 || spec.ports < 1 || spec.ports > 4) {
    throw ValidationError("generate_mesh: need rows, cols >= 2 and 1 <= ports <= 4");
  }
  Rng rng(spec.seed);
  std::ostringstream out;
  out << "* RC mesh: rows=" << spec.rows << " cols=" << spec.cols << " ports=" << spec.ports
      << " seed=" << spec.seed << "\n";
  auto node = [&](int r, int c) {
    return "n" + std::to_string(r) + "x" + std::to_string(c);
  };
  int rid = 0;
  for (int r = 1; r <= spec.rows; ++r) {
    for (int c = 1; c <= spec.cols; ++c) {
      if (c < spec.cols) {
        out << "R" << ++rid << " " << node(r, c) << " " << node(r, c + 1) << " "
            << num(rng.uniform(5.0, 15.0)) << "\n";
      }
      if (r < spec.rows) {
        out << "R" << ++rid << " " << node(r, c) << " " << node(r + 1, c) << " "
            << num(rng.uniform(5.0, 15.0)) << "\n";
      }
      out << "C" << r << "x" << c << " " << node(r, c) << " 0 "
          << num(rng.uniform(1e-13, 3e-13)) << "\n";
    }
  }
  const std::pair<int, int> corners[4] = {
      {1, 1}, {spec.rows, spec.cols}, {1, spec.cols}, {spec.rows, 1}};
  for (int j = 0; j < spec.ports; ++j) {
    const auto [r, c] = corners[j];
    out << "R" << ++rid << " " << node(r, c) << " 0 50\n";  // termination
    out << "P" << j + 1 << " p" << j + 1 << " " << node(r, c) << "\n";
  }
  return out.str();
}

std::string generate_coupled_lines(const CoupledLinesSpec& spec) {
  if (spec.lines < 1 || spec.sections < 1) {
    throw ValidationError("generate_coupled_lines: need lines >= 1 and sections >= 1");
  }
  if (spec.coupling_density < 0.0 || spec.coupling_density > 1.0) {
    throw ValidationError("generate_coupled_lines: coupling density must be in [0, 1]");
  }
  Rng rng(spec.seed);
  std::ostringstream out;
  out << "* coupled lines: lines=" << spec.lines << " sections=" << spec.sections
      << " density=" << num(spec.coupling_density) << " seed=" << spec.seed << "\n";
  auto node = [&](int line, int s) {
    return "w" + std::to_string(line) + "n" + std::to_string(s);
  };
  auto lname = [&](int line, int s) {
    return "L" + std::to_string(line) + "_" + std::to_string(s);
  };
  for (int i = 1; i <= spec.lines; ++i) {
    for (int s = 1; s <= spec.sections; ++s) {
      // Near-uniform inductances within [0.25, 0.35] nH; with |k| <= 0.3 the
      // branch inductance matrix stays diagonally dominant.
      out << lname(i, s) << " " << node(i, s - 1) << " " << node(i, s) << " "
          << num(rng.uniform(2.5e-10, 3.5e-10)) << "\n";
    }
    for (int s = 0; s <= spec.sections; ++s) {
      out << "C" << i << "_" << s << " " << node(i, s) << " 0 "
          << num(rng.uniform(1.5e-13, 2.5e-13)) << "\n";
      out << "R" << i << "_" << s << " " << node(i, s) << " 0 "
          << num(rng.uniform(80.0, 160.0)) << "\n";
    }
    out << "Rterm" << i << " " << node(i, spec.sections) << " 0 50\n";
    out << "P" << i << " p" << i << " " << node(i, 0) << "\n";
  }
  int kid = 0;
  for (int i = 1; i < spec.lines; ++i) {
    for (int s = 1; s <= spec.sections; ++s) {
      if (rng.bernoulli(spec.coupling_density)) {
        out << "K" << ++kid << " " << lname(i, s) << " " << lname(i + 1, s) << " "
            << num(rng.uniform(0.15, 0.3)) << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace btmor

// SPDX-License-Identifier: Apache-2.0

#include "btmor/descriptor.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "btmor/errors.hpp"
#include "btmor/linalg.hpp"

namespace btmor {

namespace {

// Order-independent assembly: the stamp triplets are sorted before summation
// so any permutation of netlist elements produces bit-identical matrices.
Eigen::SparseMatrix<double> from_triplets_canonical(Eigen::Index rows, Eigen::Index cols,
                                                    std::vector<Eigen::Triplet<double>> t) {
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
    if (a.col() != b.col()) return a.col() < b.col();
    if (a.row() != b.row()) return a.row() < b.row();
    return a.value() < b.value();
  });
  // Merge duplicates here, in sorted order, instead of leaving the summation
  // order to setFromTriplets.
  std::vector<Eigen::Triplet<double>> merged;
  merged.reserve(t.size());
  for (std::size_t i = 0; i < t.size();) {
    double sum = t[i].value();
    std::size_t j = i + 1;
    while (j < t.size() && t[j].row() == t[i].row() && t[j].col() == t[i].col()) {
      sum += t[j].value();
      ++j;
    }
    merged.emplace_back(t[i].row(), t[i].col(), sum);
    i = j;
  }
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(merged.begin(), merged.end());
  m.makeCompressed();
  return m;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int size) : parent(size) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void merge(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

DescriptorSystem assemble_mna(const Netlist& nl) {
  if (nl.ports.empty()) {
    throw ValidationError("assemble_mna: netlist declares no ports");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(nl.node_count());
  const Eigen::Index m = static_cast<Eigen::Index>(nl.branch_count());
  if (n == 0) {
    throw ValidationError("assemble_mna: netlist has no non-ground nodes");
  }
  const Eigen::Index N = n + m;

  std::unordered_map<std::string, Eigen::Index> node_index;
  for (Eigen::Index i = 0; i < n; ++i) {
    node_index.emplace(nl.node_names[static_cast<std::size_t>(i)], i);
  }
  std::unordered_map<std::string, Eigen::Index> branch_index;
  for (Eigen::Index b = 0; b < m; ++b) {
    branch_index.emplace(nl.inductors[static_cast<std::size_t>(b)].id, b);
  }
  auto node_of = [&](const std::string& name) -> Eigen::Index {
    return name == "0" ? -1 : node_index.at(name);
  };

  std::vector<Eigen::Triplet<double>> gn_t, cn_t, e_t;
  auto stamp_two_terminal = [](std::vector<Eigen::Triplet<double>>& t, Eigen::Index a,
                               Eigen::Index b, double v) {
    if (a >= 0) t.emplace_back(a, a, v);
    if (b >= 0) t.emplace_back(b, b, v);
    if (a >= 0 && b >= 0) {
      t.emplace_back(a, b, -v);
      t.emplace_back(b, a, -v);
    }
  };
  for (const Resistor& r : nl.resistors) {
    stamp_two_terminal(gn_t, node_of(r.node_a), node_of(r.node_b), 1.0 / r.ohms);
  }
  for (const Capacitor& c : nl.capacitors) {
    stamp_two_terminal(cn_t, node_of(c.node_a), node_of(c.node_b), c.farads);
  }
  // Branch incidence: +1 at the branch's from-node, -1 at its to-node.
  Eigen::MatrixXd inductance = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index b = 0; b < m; ++b) {
    const Inductor& ind = nl.inductors[static_cast<std::size_t>(b)];
    const Eigen::Index a = node_of(ind.node_a), z = node_of(ind.node_b);
    if (a >= 0) e_t.emplace_back(a, b, 1.0);
    if (z >= 0) e_t.emplace_back(z, b, -1.0);
    inductance(b, b) = ind.henries;
  }
  for (const MutualCoupling& k : nl.couplings) {
    const Eigen::Index i = branch_index.at(k.inductor_a);
    const Eigen::Index j = branch_index.at(k.inductor_b);
    const double mij = k.k * std::sqrt(inductance(i, i) * inductance(j, j));
    inductance(i, j) = mij;
    inductance(j, i) = mij;
  }
  if (m > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(inductance);
    if (llt.info() != Eigen::Success) {
      throw NumericalError(
          "assemble_mna: inductance matrix is not positive definite "
          "(mutual couplings too strong)");
    }
  }

  const Eigen::SparseMatrix<double> gn = from_triplets_canonical(n, n, std::move(gn_t));
  const Eigen::SparseMatrix<double> e = from_triplets_canonical(n, m, std::move(e_t));

  // G = -[[Gn, E], [-E^T, 0]]
  std::vector<Eigen::Triplet<double>> g_t;
  g_t.reserve(static_cast<std::size_t>(gn.nonZeros() + 2 * e.nonZeros()));
  for (Eigen::Index j = 0; j < gn.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(gn, j); it; ++it) {
      g_t.emplace_back(it.row(), it.col(), -it.value());
    }
  }
  for (Eigen::Index j = 0; j < e.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(e, j); it; ++it) {
      g_t.emplace_back(it.row(), n + it.col(), -it.value());
      g_t.emplace_back(n + it.col(), it.row(), it.value());
    }
  }
  // C = [[Cn, 0], [0, M]]
  std::vector<Eigen::Triplet<double>> c_t = std::move(cn_t);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (inductance(i, j) != 0.0) {
        c_t.emplace_back(n + i, n + j, inductance(i, j));
      }
    }
  }

  DescriptorSystem sys;
  sys.G = from_triplets_canonical(N, N, std::move(g_t));
  sys.C = from_triplets_canonical(N, N, std::move(c_t));
  sys.n = n;
  sys.m = m;

  std::vector<const Port*> inputs, outputs;
  for (const Port& p : nl.ports) {
    if (p.direction != PortDirection::out) inputs.push_back(&p);
    if (p.direction != PortDirection::in) outputs.push_back(&p);
  }
  if (inputs.empty() || outputs.empty()) {
    throw ValidationError("assemble_mna: need at least one input and one output port");
  }
  sys.B = Eigen::MatrixXd::Zero(N, static_cast<Eigen::Index>(inputs.size()));
  sys.L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(outputs.size()), N);
  for (std::size_t c = 0; c < inputs.size(); ++c) {
    sys.B(node_index.at(inputs[c]->node), static_cast<Eigen::Index>(c)) = 1.0;
    sys.in_ports.push_back(inputs[c]->name);
  }
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    sys.L(static_cast<Eigen::Index>(r), node_index.at(outputs[r]->node)) = 1.0;
    sys.out_ports.push_back(outputs[r]->name);
  }

  // Floating-node check: every node should reach ground through elements.
  UnionFind uf(static_cast<int>(n) + 1);  // index n plays ground
  const int ground = static_cast<int>(n);
  auto link = [&](const std::string& a, const std::string& b) {
    const Eigen::Index ia = node_of(a), ib = node_of(b);
    uf.merge(ia < 0 ? ground : static_cast<int>(ia), ib < 0 ? ground : static_cast<int>(ib));
  };
  for (const Resistor& r : nl.resistors) link(r.node_a, r.node_b);
  for (const Capacitor& c : nl.capacitors) link(c.node_a, c.node_b);
  for (const Inductor& l : nl.inductors) link(l.node_a, l.node_b);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (uf.find(static_cast<int>(i)) != uf.find(ground)) {
      sys.warnings.push_back("floating node '" + nl.node_names[static_cast<std::size_t>(i)] +
                             "': no element path to ground");
    }
  }
  return sys;
}

DescriptorSystem regularize(const DescriptorSystem& sys, double c_min) {
  if (c_min < 0.0) {
    throw ValidationError("regularize: c_min must be nonnegative");
  }
  const Eigen::Index N = sys.order();
  std::vector<bool> row_empty(static_cast<std::size_t>(sys.n), true);
  for (Eigen::Index j = 0; j < sys.C.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.C, j); it; ++it) {
      if (it.row() < sys.n && it.value() != 0.0) {
        row_empty[static_cast<std::size_t>(it.row())] = false;
      }
    }
  }

  DescriptorSystem out = sys;
  std::vector<Eigen::Triplet<double>> extra;
  for (Eigen::Index i = 0; i < sys.n; ++i) {
    if (row_empty[static_cast<std::size_t>(i)] && c_min > 0.0) {
      extra.emplace_back(i, i, c_min);
    }
  }
  if (!extra.empty()) {
    Eigen::SparseMatrix<double> bump(N, N);
    bump.setFromTriplets(extra.begin(), extra.end());
    out.C = out.C + bump;
    out.C.makeCompressed();
  }
  try {
    factorize(out.C, "C");
  } catch (const NumericalError&) {
    std::ostringstream msg;
    msg << "regularize: C remains singular after adding c_min = " << c_min
        << " to empty capacitance rows";
    throw NumericalError(msg.str());
  }
  return out;
}

DescriptorSystem make_descriptor(Eigen::SparseMatrix<double> g, Eigen::SparseMatrix<double> c,
                                 Eigen::MatrixXd b, Eigen::MatrixXd l, Eigen::Index n,
                                 Eigen::Index m, std::vector<std::string> in_ports,
                                 std::vector<std::string> out_ports) {
  const Eigen::Index N = n + m;
  if (g.rows() != N || g.cols() != N || c.rows() != N || c.cols() != N) {
    throw ValidationError("make_descriptor: G and C must be (n+m) x (n+m)");
  }
  if (b.rows() != N || l.cols() != N) {
    throw ValidationError("make_descriptor: B/L dimensions do not match n+m");
  }
  if (static_cast<Eigen::Index>(in_ports.size()) != b.cols() ||
      static_cast<Eigen::Index>(out_ports.size()) != l.rows()) {
    throw ValidationError("make_descriptor: port name counts do not match B/L");
  }
  DescriptorSystem sys;
  sys.G = std::move(g);
  sys.C = std::move(c);
  sys.B = std::move(b);
  sys.L = std::move(l);
  sys.n = n;
  sys.m = m;
  sys.in_ports = std::move(in_ports);
  sys.out_ports = std::move(out_ports);
  return sys;
}

}  // namespace btmor

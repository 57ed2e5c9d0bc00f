// SPDX-License-Identifier: Apache-2.0

#include "btmor/bundle.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "btmor/errors.hpp"
#include "btmor/matrix_market.hpp"
#include "btmor/netlist.hpp"

namespace btmor {

namespace {

constexpr const char* kManifestMagic = "# btmor manifest v1";
constexpr const char* kManifestName = "manifest.txt";

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) {
    if (!out.empty()) {
      out += " ";
    }
    out += s;
  }
  return out;
}

std::map<std::string, std::string> parse_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ValidationError("cannot open manifest " + file.string());
  }
  std::string line;
  std::map<std::string, std::string> kv;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (first) {
      if (line != kManifestMagic) {
        throw ValidationError("manifest " + file.string() + " lacks the '" +
                              std::string(kManifestMagic) + "' header");
      }
      first = false;
      continue;
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("manifest " + file.string() + ": bad line '" + line + "'");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key,
                           const std::filesystem::path& file) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw ValidationError("manifest " + file.string() + " is missing '" + key + "'");
  }
  return it->second;
}

std::vector<std::string> split_names(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) {
    out.push_back(tok);
  }
  return out;
}

}  // namespace

void save_system_bundle(const std::filesystem::path& dir, const DescriptorSystem& sys) {
  std::filesystem::create_directories(dir);
  write_matrix_market(dir / "G.mtx", sys.G);
  write_matrix_market(dir / "C.mtx", sys.C);
  write_matrix_market(dir / "B.mtx", sys.B);
  write_matrix_market(dir / "L.mtx", sys.L);
  std::ostringstream out;
  out << kManifestMagic << "\n";
  out << "kind = system\n";
  out << "n = " << sys.n << "\n";
  out << "m = " << sys.m << "\n";
  out << "in_ports = " << join(sys.in_ports) << "\n";
  out << "out_ports = " << join(sys.out_ports) << "\n";
  out << "G = G.mtx\nC = C.mtx\nB = B.mtx\nL = L.mtx\n";
  write_file_atomic(dir / kManifestName, out.str());
}

void save_rom_bundle(const std::filesystem::path& dir, const Rom& rom) {
  std::filesystem::create_directories(dir);
  write_matrix_market(dir / "G.mtx", Eigen::SparseMatrix<double>(rom.G.sparseView()));
  write_matrix_market(dir / "C.mtx", Eigen::SparseMatrix<double>(rom.C.sparseView()));
  write_matrix_market(dir / "B.mtx", rom.B);
  write_matrix_market(dir / "L.mtx", rom.L);
  std::ostringstream out;
  out << kManifestMagic << "\n";
  out << "kind = rom\n";
  out << "r = " << rom.order() << "\n";
  out << "p = " << rom.num_inputs() << "\n";
  out << "q = " << rom.num_outputs() << "\n";
  out << "in_ports = " << join(rom.in_ports) << "\n";
  out << "out_ports = " << join(rom.out_ports) << "\n";
  out << "hsv =";
  for (const double s : rom.retained_hsvs) {
    out << " " << format_double(s);
  }
  out << "\n";
  out << "apriori_bound = " << format_double(rom.apriori_bound) << "\n";
  out << "provenance = " << (rom.provenance == RomProvenance::dense ? "dense" : "eksm") << "\n";
  out << "iterations = " << rom.iterations << "\n";
  out << "G = G.mtx\nC = C.mtx\nB = B.mtx\nL = L.mtx\n";
  write_file_atomic(dir / kManifestName, out.str());
}

bool is_bundle_path(const std::filesystem::path& path) {
  std::filesystem::path file = path;
  if (std::filesystem::is_directory(path)) {
    file = path / kManifestName;
    if (!std::filesystem::exists(file)) {
      return false;
    }
  }
  std::ifstream in(file);
  std::string line;
  return in && std::getline(in, line) &&
         line.rfind(kManifestMagic, 0) == 0;
}

DescriptorSystem load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ValidationError("input " + path.string() + " does not exist");
  }
  if (!is_bundle_path(path)) {
    std::ifstream in(path);
    if (!in) {
      throw ValidationError("cannot open netlist " + path.string());
    }
    return assemble_mna(parse_netlist(in));
  }
  const std::filesystem::path manifest =
      std::filesystem::is_directory(path) ? path / kManifestName : path;
  const std::filesystem::path dir = manifest.parent_path();
  const auto kv = parse_manifest(manifest);
  const std::string kind = require(kv, "kind", manifest);

  Eigen::SparseMatrix<double> g = read_matrix_market_sparse(dir / require(kv, "G", manifest));
  Eigen::SparseMatrix<double> c = read_matrix_market_sparse(dir / require(kv, "C", manifest));
  Eigen::MatrixXd b = read_matrix_market_dense(dir / require(kv, "B", manifest));
  Eigen::MatrixXd l = read_matrix_market_dense(dir / require(kv, "L", manifest));
  std::vector<std::string> in_ports = split_names(require(kv, "in_ports", manifest));
  std::vector<std::string> out_ports = split_names(require(kv, "out_ports", manifest));

  Eigen::Index n = 0, m = 0;
  if (kind == "system") {
    n = std::stol(require(kv, "n", manifest));
    m = std::stol(require(kv, "m", manifest));
  } else if (kind == "rom") {
    n = std::stol(require(kv, "r", manifest));
    m = 0;
  } else {
    throw ValidationError("manifest " + manifest.string() + ": unknown kind '" + kind + "'");
  }
  return make_descriptor(std::move(g), std::move(c), std::move(b), std::move(l), n, m,
                         std::move(in_ports), std::move(out_ports));
}

}  // namespace btmor

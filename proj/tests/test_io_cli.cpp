// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "btmor/bundle.hpp"
#include "btmor/errors.hpp"
#include "btmor/freq.hpp"
#include "btmor/generate.hpp"
#include "btmor/matrix_market.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using Eigen::MatrixXd;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("btmor_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// CLI binary location, provided by ctest.
const char* cli_path() { return std::getenv("BTMOR_CLI"); }

int run_cli(const std::string& args) {
  REQUIRE(cli_path() != nullptr);
  const int status = std::system((std::string(cli_path()) + " " + args).c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("matrix market: sparse and dense round trips") {
  btmor::test::Rng rng(51);
  MatrixXd dense = btmor::test::random_matrix(7, 4, rng);
  dense(3, 2) = 0.0;
  std::ostringstream array_text;
  btmor::write_matrix_market(array_text, dense);
  std::istringstream array_in(array_text.str());
  CHECK(btmor::read_matrix_market_dense(array_in) == dense);

  const MatrixXd filtered =
      dense.unaryExpr([](double v) { return std::abs(v) > 0.5 ? v : 0.0; });
  Eigen::SparseMatrix<double> sp = filtered.sparseView();
  std::ostringstream coord_text;
  btmor::write_matrix_market(coord_text, sp);
  std::istringstream coord_in(coord_text.str());
  CHECK(MatrixXd(btmor::read_matrix_market_sparse(coord_in)) == MatrixXd(sp));
}

TEST_CASE("matrix market: symmetric coordinate input mirrors entries") {
  const std::string text =
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "% comment\n"
      "3 3 4\n"
      "1 1 2.0\n"
      "2 1 -1.0\n"
      "3 2 0.5\n"
      "3 3 7\n";
  std::istringstream in(text);
  const MatrixXd m = btmor::read_matrix_market_dense(in);
  CHECK(m(0, 1) == m(1, 0));
  CHECK(m(1, 0) == -1.0);
  CHECK(m(2, 1) == 0.5);
  CHECK(m(1, 2) == 0.5);
  CHECK(m(2, 2) == 7.0);

  std::istringstream bad("%%MatrixMarket matrix coordinate complex general\n1 1 1\n");
  CHECK_THROWS_AS(btmor::read_matrix_market_sparse(bad), btmor::ValidationError);
}

TEST_CASE("generators: ladder node/branch counts") {
  const btmor::DescriptorSystem sys = btmor::test::ladder_system(3, 1, 1);
  CHECK(sys.n == 4);
  CHECK(sys.m == 3);
  CHECK(sys.order() == 7);

  // seed determinism: byte-identical text
  CHECK(btmor::generate_ladder({8, 2, 99}) == btmor::generate_ladder({8, 2, 99}));
  CHECK(btmor::generate_ladder({8, 2, 99}) != btmor::generate_ladder({8, 2, 100}));
}

TEST_CASE("generators: coupled lines keep |k| < 1 and assemble to stable systems") {
  const std::string text = btmor::generate_coupled_lines({3, 6, 0.5, 77});
  const btmor::Netlist nl = btmor::parse_netlist(text);
  CHECK(!nl.couplings.empty());
  for (const auto& k : nl.couplings) {
    CHECK(std::abs(k.k) < 1.0);
  }
  const btmor::DescriptorSystem sys = btmor::assemble_mna(nl);
  CHECK(sys.order() == 3 * (2 * 6 + 1));
  CHECK(sys.num_inputs() == 3);
  // strict stability: the dense Gramian path accepts it
  CHECK_NOTHROW(btmor::solve_gramians_dense(sys));
}

TEST_CASE("bundle: system round trip preserves matrices and ports") {
  const fs::path dir = fresh_dir("bundle_sys");
  const btmor::DescriptorSystem sys = btmor::test::coupled_system(2, 3, 0.5, 13);
  btmor::save_system_bundle(dir, sys);
  CHECK(btmor::is_bundle_path(dir));
  CHECK(btmor::is_bundle_path(dir / "manifest.txt"));
  const btmor::DescriptorSystem back = btmor::load_model(dir);
  CHECK(back.n == sys.n);
  CHECK(back.m == sys.m);
  CHECK(back.in_ports == sys.in_ports);
  CHECK(MatrixXd(back.G) == MatrixXd(sys.G));
  CHECK(MatrixXd(back.C) == MatrixXd(sys.C));
  CHECK(back.B == sys.B);
  CHECK(back.L == sys.L);
  fs::remove_all(dir);
}

TEST_CASE("bundle: rom round trip keeps the quadruple loadable as a model") {
  const fs::path dir = fresh_dir("bundle_rom");
  const btmor::DescriptorSystem sys = btmor::test::ladder_system(6, 1, 4);
  btmor::Rom rom = btmor::reduce_dense(sys, btmor::OrderRequest::target(1e-3));
  rom.iterations = 0;
  btmor::save_rom_bundle(dir, rom);
  const btmor::DescriptorSystem back = btmor::load_model(dir / "manifest.txt");
  CHECK(back.order() == rom.order());
  CHECK(back.m == 0);
  CHECK(MatrixXd(back.G).isApprox(rom.G, 0.0));
  CHECK(back.B == rom.B);
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("kind = rom") != std::string::npos);
  CHECK(manifest.find("provenance = dense") != std::string::npos);
  CHECK(manifest.find("apriori_bound = ") != std::string::npos);
  CHECK(manifest.find("hsv = ") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("load_model: netlist path and missing file") {
  const fs::path dir = fresh_dir("load_netlist");
  const fs::path nlfile = dir / "net.sp";
  btmor::write_file_atomic(nlfile, btmor::generate_ladder({4, 1, 2}));
  const btmor::DescriptorSystem sys = btmor::load_model(nlfile);
  CHECK(sys.order() == 9);
  CHECK_THROWS_AS(btmor::load_model(dir / "nope.sp"), btmor::ValidationError);
  fs::remove_all(dir);
}

TEST_CASE("cli: reduce writes a rom bundle, summary and trace; exit 0") {
  const fs::path dir = fresh_dir("cli_reduce");
  const fs::path net = dir / "net.sp";
  btmor::write_file_atomic(net, btmor::generate_ladder({10, 2, 5}));
  const fs::path out = dir / "rom";
  const int code = run_cli("reduce " + net.string() + " --out-dir " + out.string() +
                           " --method eksm > " + (dir / "stdout.txt").string());
  CHECK(code == 0);
  for (const char* name : {"G.mtx", "C.mtx", "B.mtx", "L.mtx", "manifest.txt", "trace.csv",
                           "summary.txt", "summary.json"}) {
    CHECK(fs::exists(out / name));
  }
  const std::string summary = slurp(out / "summary.txt");
  CHECK(summary.find("status=ok") != std::string::npos);
  CHECK(summary.find("N=21") != std::string::npos);
  CHECK(summary.find("stop_reason=") != std::string::npos);

  // determinism: a rerun reproduces the rom bundle and trace byte for byte
  const fs::path out2 = dir / "rom2";
  CHECK(run_cli("reduce " + net.string() + " --out-dir " + out2.string() +
                " --method eksm > /dev/null") == 0);
  for (const char* name : {"G.mtx", "C.mtx", "B.mtx", "L.mtx", "manifest.txt", "trace.csv"}) {
    CHECK(slurp(out / name) == slurp(out2 / name));
  }
  fs::remove_all(dir);
}

TEST_CASE("cli: misconfigured tol exits 2, singular C exits 3") {
  const fs::path dir = fresh_dir("cli_errors");
  const fs::path net = dir / "net.sp";
  btmor::write_file_atomic(net, btmor::generate_ladder({4, 1, 8}));
  CHECK(run_cli("reduce " + net.string() + " --tol -1 --out-dir " + dir.string() +
                " 2> /dev/null") == 2);
  CHECK(run_cli("reduce " + net.string() + " --tol 0 --out-dir " + dir.string() +
                " 2> /dev/null") == 2);

  // bridge capacitor only: C has no empty rows yet stays singular
  const fs::path bad = dir / "bad.sp";
  btmor::write_file_atomic(bad, "R1 1 0 50\nR2 2 0 50\nC1 1 2 1e-12\nP1 in 1\n");
  CHECK(run_cli("reduce " + bad.string() + " --out-dir " + dir.string() + " 2> /dev/null") ==
        3);
  fs::remove_all(dir);
}

TEST_CASE("cli: compare of a model against itself reports zero error") {
  const fs::path dir = fresh_dir("cli_compare");
  const fs::path net = dir / "net.sp";
  btmor::write_file_atomic(net, btmor::generate_ladder({6, 1, 11}));
  const fs::path outfile = dir / "out.txt";
  const int code = run_cli("compare " + net.string() + " " + net.string() + " --out-dir " +
                           dir.string() + " > " + outfile.string());
  CHECK(code == 0);
  const std::string out = slurp(outfile);
  CHECK(out.find("max_relative_error=0\n") != std::string::npos);
  CHECK(fs::exists(dir / "compare.csv"));

  // port-count mismatch exits 2
  const fs::path net2 = dir / "net2.sp";
  btmor::write_file_atomic(net2, btmor::generate_ladder({6, 2, 11}));
  CHECK(run_cli("compare " + net.string() + " " + net2.string() + " --out-dir " +
                dir.string() + " 2> /dev/null") == 2);
  fs::remove_all(dir);
}

TEST_CASE("cli: hsv prints the scalar spectrum; empty circuit exits 2") {
  const fs::path dir = fresh_dir("cli_hsv");
  // scalar RC with R = C = 1 at 1 rad/s: sigma = 1/2 like the unit fixture
  const fs::path net = dir / "one.sp";
  btmor::write_file_atomic(net, "R1 1 0 1\nC1 1 0 1\nP1 in 1\n");
  const fs::path outfile = dir / "hsv.txt";
  CHECK(run_cli("hsv " + net.string() + " --out-dir " + dir.string() + " > " +
                outfile.string()) == 0);
  const std::string out = slurp(outfile);
  CHECK(out.find("r,sigma,tail_bound") != std::string::npos);
  // single state: one row "1,<sigma ~ 0.5>,0"
  std::istringstream rows(out.substr(out.find('\n') + 1));
  std::string row;
  REQUIRE(std::getline(rows, row));
  CHECK(row.rfind("1,", 0) == 0);
  CHECK(std::strtod(row.c_str() + 2, nullptr) == doctest::Approx(0.5));
  CHECK(row.substr(row.rfind(',')) == ",0");
  CHECK_FALSE(std::getline(rows, row));

  const fs::path empty = dir / "empty.sp";
  btmor::write_file_atomic(empty, "* nothing here\n");
  CHECK(run_cli("hsv " + empty.string() + " --out-dir " + dir.string() + " 2> /dev/null") ==
        2);
  fs::remove_all(dir);
}

TEST_CASE("cli: sweep exports touchstone that parses back") {
  const fs::path dir = fresh_dir("cli_sweep");
  const fs::path net = dir / "net.sp";
  btmor::write_file_atomic(net, btmor::generate_coupled_lines({3, 4, 0.5, 21}));
  const fs::path snp = dir / "model.s3p";
  CHECK(run_cli("sweep " + net.string() + " --format touchstone --points 5 --out " +
                snp.string()) == 0);
  const btmor::FrequencySweep back = btmor::parse_touchstone(slurp(snp), 3);
  CHECK(back.samples.size() == 5);
  CHECK(back.z0 == 50.0);
  // impedance csv to stdout
  const fs::path csv = dir / "sweep.csv";
  CHECK(run_cli("sweep " + net.string() + " --points 4 --out " + csv.string()) == 0);
  CHECK(btmor::parse_sweep_csv(slurp(csv)).kind == btmor::SweepKind::impedance);
  fs::remove_all(dir);
}

TEST_CASE("cli: gen is deterministic per seed and parses back") {
  const fs::path dir = fresh_dir("cli_gen");
  const fs::path f1 = dir / "a.sp", f2 = dir / "b.sp";
  const std::string args = "gen --kind coupled_lines --lines 3 --sections 5 --density 0.4 "
                           "--seed 42 --out ";
  CHECK(run_cli(args + f1.string()) == 0);
  CHECK(run_cli(args + f2.string()) == 0);
  CHECK(slurp(f1) == slurp(f2));
  const btmor::DescriptorSystem sys = btmor::load_model(f1);
  CHECK(sys.order() == 3 * 11);
  fs::remove_all(dir);
}

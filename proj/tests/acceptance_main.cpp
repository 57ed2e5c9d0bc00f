// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: every criterion prints one PASS/FAIL line; the binary
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "btmor/bundle.hpp"
#include "btmor/dense_bt.hpp"
#include "btmor/descriptor.hpp"
#include "btmor/eksm.hpp"
#include "btmor/freq.hpp"
#include "btmor/generate.hpp"
#include "btmor/matrix_market.hpp"
#include "btmor/netlist.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace btmor;
using Eigen::MatrixXd;

namespace {

struct Harness {
  bool all_ok = true;

  void run(int id, const std::string& label, const std::function<std::string()>& body) {
    std::string detail;
    bool ok = true;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      detail = body();
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!ok) {
      all_ok = false;
    }
    std::printf("[%s] criterion %d: %s (%s; %.1f s)\n", ok ? "PASS" : "FAIL", id,
                label.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
  }
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) {
    throw Failure(msg);
  }
}

double rel(const MatrixXd& got, const MatrixXd& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

// The generated desk-scale fleet shared by criteria 2 and 3: coupled RLCk
// lines, RLC ladders and RC meshes, N = 13..400.
std::vector<DescriptorSystem> generated_fleet() {
  std::vector<DescriptorSystem> fleet;
  const int coupled[][3] = {{2, 5, 504}, {4, 7, 506}, {2, 8, 507}, {3, 9, 508}, {2, 7, 513},
                            {2, 6, 519}, {3, 7, 520}, {3, 10, 523}, {4, 6, 533}, {3, 11, 538}};
  for (const auto& c : coupled) {
    fleet.push_back(test::coupled_system(c[0], c[1], 0.35, static_cast<std::uint64_t>(c[2])));
  }
  const int ladders[][3] = {{6, 2, 600}, {9, 3, 603},  {11, 3, 605},
                            {12, 2, 606}, {16, 2, 610}, {10, 2, 616}};
  for (const auto& l : ladders) {
    fleet.push_back(test::ladder_system(l[0], l[1], static_cast<std::uint64_t>(l[2])));
  }
  fleet.push_back(test::mesh_system(3, 4, 4, 234));
  fleet.push_back(test::mesh_system(4, 6, 3, 246));
  fleet.push_back(test::mesh_system(5, 5, 3, 255));
  fleet.push_back(test::mesh_system(6, 5, 4, 265));
  return fleet;
}

std::string criterion_1() {
  test::Rng rng(2024);
  int cases = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng.next() % 29);
    const MatrixXd a = test::random_stable_matrix(k, rng);
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng.next() % k);
    const MatrixXd w = test::random_psd(k, rank, rng);
    const MatrixXd got = solve_lyapunov_dense(a, w);
    const MatrixXd want = test::lyapunov_kron_oracle(a, w);
    worst = std::max(worst, rel(got, want));
    ++cases;
  }
  require(cases >= 50, "needs at least 50 cases");
  require(worst <= 1e-8, "worst relative error " + format_double(worst) + " exceeds 1e-8");
  std::ostringstream out;
  out << cases << " cases, worst rel err " << format_double(worst);
  return out.str();
}

std::string criterion_2() {
  const std::vector<DescriptorSystem> fleet = generated_fleet();
  require(fleet.size() >= 20, "needs at least 20 systems");
  const FrequencyGrid grid = FrequencyGrid::linear(1e8, 2e10, 200);
  double worst_margin = 0.0;
  int systems = 0, roms = 0;
  for (const DescriptorSystem& sys : fleet) {
    require(sys.order() <= 200, "fleet system exceeds N = 200");
    const GramianPair gram = solve_gramians_dense(sys);
    const MatrixXd zp = gramian_sqrt_factor(gram.P);
    const MatrixXd zq = gramian_sqrt_factor(gram.Q);
    const HsvSpectrum hsv = hankel_singular_values(zq, zp);
    const FrequencySweep full = evaluate_tf(sys, grid);
    // Arithmetic allowance: at full rank the bound is exactly zero while
    // the two sweeps still differ by rounding, so the check carries a 1e-8
    // floor relative to the response scale.
    double h_scale = 0.0;
    for (const auto& s : full.samples) {
      h_scale = std::max(h_scale, spectral_norm(s));
    }
    const double noise_floor = 1e-8 * h_scale;
    for (Eigen::Index r = 1; r <= hsv_numerical_rank(hsv); ++r) {
      const Rom rom = balance_truncate(sys, zp, zq, r);
      const FrequencySweep red = evaluate_tf(rom, grid);
      double worst = 0.0;
      for (int i = 0; i < grid.points; ++i) {
        const Eigen::MatrixXcd diff =
            full.samples[static_cast<std::size_t>(i)] - red.samples[static_cast<std::size_t>(i)];
        worst = std::max(worst, spectral_norm(diff));
      }
      const double bound = hsv.tail_bound(r) * (1.0 + 1e-6);
      require(worst <= bound + noise_floor,
              "bound violated: N=" + std::to_string(sys.order()) + " r=" + std::to_string(r) +
                  " error " + format_double(worst) + " > " + format_double(bound));
      if (bound > 0.0) {
        worst_margin = std::max(worst_margin, worst / bound);
      }
      ++roms;
    }
    ++systems;
  }
  std::ostringstream out;
  out << systems << " systems, " << roms << " truncation orders, worst error/bound ratio "
      << format_double(worst_margin);
  return out.str();
}

std::string criterion_3() {
  EksmConfig cfg;  // stock settings: tol = 1e-2, target_error = 1e-2, 20 points
  cfg.f_min = 1e8;
  cfg.f_max = 1e10;
  double worst_agreement = 0.0, worst_vs_original = 0.0;
  for (const DescriptorSystem& sys : generated_fleet()) {
    const EksmResult res = reduce_eksm(sys, cfg);
    const Rom dense_rom = reduce_dense(sys, OrderRequest::fixed(res.rom.order()));
    require(dense_rom.order() == res.rom.order(), "order mismatch between methods");
    const FrequencyGrid grid = cfg.grid();
    const double agreement =
        max_relative_error(evaluate_tf(dense_rom, grid), evaluate_tf(res.rom, grid));
    const double vs_original =
        max_relative_error(evaluate_tf(sys, grid), evaluate_tf(res.rom, grid));
    worst_agreement = std::max(worst_agreement, agreement);
    worst_vs_original = std::max(worst_vs_original, vs_original);
  }
  // N = 400 runtime gate, same checks.
  const DescriptorSystem big = test::mesh_system(20, 20, 4, 801);  // N = 400
  const auto t0 = std::chrono::steady_clock::now();
  const EksmResult big_res = reduce_eksm(big, cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(secs < 120.0, "N=400 reduction took " + format_double(secs) + " s >= 120 s");
  const Rom big_dense = reduce_dense(big, OrderRequest::fixed(big_res.rom.order()));
  worst_agreement =
      std::max(worst_agreement, max_relative_error(evaluate_tf(big_dense, cfg.grid()),
                                                   evaluate_tf(big_res.rom, cfg.grid())));
  worst_vs_original =
      std::max(worst_vs_original, max_relative_error(evaluate_tf(big, cfg.grid()),
                                                     evaluate_tf(big_res.rom, cfg.grid())));

  require(worst_agreement <= 1e-6,
          "EKSM vs dense ROM disagreement " + format_double(worst_agreement) + " > 1e-6");
  require(worst_vs_original <= 1e-2,
          "EKSM error vs original " + format_double(worst_vs_original) + " > 1e-2");
  std::ostringstream out;
  out << "worst ROM-vs-ROM " << format_double(worst_agreement) << ", worst vs original "
      << format_double(worst_vs_original) << ", N=400 r=" << big_res.rom.order() << " in "
      << format_double(secs) << " s";
  return out.str();
}

std::string criterion_4() {
  double worst = 0.0;
  int checked = 0;
  for (const std::uint64_t seed : {3ull, 4ull, 5ull}) {
    const DescriptorSystem sys = test::ladder_system(4, 1, seed);  // N = 9
    const GramianPair gram = solve_gramians_dense(sys);
    const HsvSpectrum hsv = hankel_singular_values(gram);
    require(hsv_numerical_rank(hsv) == sys.order(),
            "fixture is not numerically minimal; pick another seed");
    const Rom bal = reduce_dense(sys, OrderRequest::fixed(sys.order()));
    Eigen::SparseMatrix<double> gs = bal.G.sparseView(), cs = bal.C.sparseView();
    const DescriptorSystem bal_sys =
        make_descriptor(gs, cs, bal.B, bal.L, bal.order(), 0, sys.in_ports, sys.out_ports);
    const GramianPair gb = solve_gramians_dense(bal_sys);
    MatrixXd sigma = MatrixXd::Zero(bal.order(), bal.order());
    for (Eigen::Index i = 0; i < bal.order(); ++i) {
      sigma(i, i) = hsv.sigmas[static_cast<std::size_t>(i)];
    }
    worst = std::max({worst, rel(gb.P, sigma), rel(gb.Q, sigma), rel(gb.P, gb.Q)});
    ++checked;
  }
  require(worst <= 1e-6, "balanced Gramians deviate by " + format_double(worst));
  std::ostringstream out;
  out << checked << " systems, worst deviation " << format_double(worst);
  return out.str();
}

std::string criterion_5() {
  // Constructed sequence: the run must stop exactly on the third consecutive
  // sub-tol value, not earlier and not later.
  StoppingRule rule(1e-2);
  const std::vector<double> seq = {std::numeric_limits<double>::infinity(),
                                   5e-3, 5e-3, 0.5, 5e-3, 5e-3, 5e-3, 5e-3};
  int stop_at = -1;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (rule.update(seq[i])) {
      stop_at = static_cast<int>(i);
      break;
    }
  }
  require(stop_at == 6, "stopped at index " + std::to_string(stop_at) + ", expected 6");

  // Real run: stop reason three_below_tol implies three trailing sub-tol
  // records and a fourth-from-last at or above tol.
  EksmConfig cfg;
  cfg.f_min = 1e8;
  cfg.f_max = 1e10;
  const DescriptorSystem sys = test::ladder_system(12, 1, 77);
  const EksmResult res = reduce_eksm(sys, cfg);
  require(res.trace.stop_reason == StopReason::three_below_tol, "run did not converge");
  const auto& recs = res.trace.records;
  require(recs.size() >= 3, "trace too short");
  for (std::size_t i = recs.size() - 3; i < recs.size(); ++i) {
    require(recs[i].criterion < cfg.tol, "trailing record not below tol");
  }
  if (recs.size() >= 4) {
    require(recs[recs.size() - 4].criterion >= cfg.tol,
            "stopped later than the third consecutive sub-tol value");
  }

  // tol = 0: the criterion can never go below, so the run hits maxiter.
  EksmConfig zero = cfg;
  zero.tol = 0.0;
  zero.maxiter = 6;
  const EksmResult res0 = reduce_eksm(test::ladder_system(6, 1, 78), zero);
  require(res0.trace.stop_reason == StopReason::maxiter, "tol = 0 did not reach maxiter");
  require(res0.trace.records.size() == 6, "tol = 0 trace length is not maxiter");
  std::ostringstream out;
  out << "constructed stop index 6, trace len " << recs.size() << ", tol=0 len "
      << res0.trace.records.size();
  return out.str();
}

std::string criterion_6() {
  double worst = 0.0;
  for (const std::uint64_t seed : {11ull, 12ull}) {
    const DescriptorSystem sys = test::coupled_system(2, 6, 0.4, seed);  // N = 26
    require(sys.order() <= 60, "fixture too large");
    const GramianPair dense = solve_gramians_dense(sys);
    EksmConfig cfg;
    cfg.f_min = 1e8;
    cfg.f_max = 1e10;
    cfg.tol = 1e-13;
    cfg.maxiter = 80;
    cfg.basis_cap = sys.order();
    const EksmResult res = reduce_eksm(sys, cfg);
    worst = std::max(worst, rel(res.zp * res.zp.transpose(), dense.P));
    worst = std::max(worst, rel(res.zq * res.zq.transpose(), dense.Q));
  }
  require(worst <= 1e-8, "full-width Gramian mismatch " + format_double(worst));
  return "worst Gramian mismatch " + format_double(worst);
}

std::string criterion_7() {
  // Netlist -> MNA dimension bookkeeping.
  const DescriptorSystem ladder = test::ladder_system(3, 1, 9);
  require(ladder.n == 4 && ladder.m == 3 && ladder.order() == 7, "ladder N != n + m");
  const DescriptorSystem mesh = test::mesh_system(3, 4, 2, 9);
  require(mesh.n == 12 && mesh.m == 0 && mesh.order() == 12, "mesh N != n + m");
  const DescriptorSystem lines = test::coupled_system(3, 4, 0.5, 9);
  require(lines.n == 15 && lines.m == 12 && lines.order() == 27, "lines N != n + m");

  // Export/reparse round trips at 1e-12.
  const FrequencyGrid grid = FrequencyGrid::linear(1e8, 9.5e9, 20);
  const FrequencySweep h = evaluate_tf(lines, grid);
  const FrequencySweep h_back = parse_sweep_csv(export_sweep(h, SweepFormat::csv));
  const FrequencySweep s = h_to_s(h, 50.0);
  const FrequencySweep s_back = parse_touchstone(export_sweep(s, SweepFormat::touchstone), 3);
  double dev = 0.0;
  for (std::size_t i = 0; i < h.samples.size(); ++i) {
    dev = std::max(dev, (h.samples[i] - h_back.samples[i]).cwiseAbs().maxCoeff() /
                            h.samples[i].cwiseAbs().maxCoeff());
    dev = std::max(dev, (s.samples[i] - s_back.samples[i]).cwiseAbs().maxCoeff() /
                            std::max(s.samples[i].cwiseAbs().maxCoeff(), 1e-300));
  }
  require(dev <= 1e-12, "round-trip deviation " + format_double(dev));

  // Byte-identical reruns: generator text and ROM bundles.
  require(generate_coupled_lines({3, 5, 0.4, 33}) == generate_coupled_lines({3, 5, 0.4, 33}),
          "generator text differs between runs");
  EksmConfig cfg;
  cfg.f_min = 1e8;
  cfg.f_max = 1e10;
  const fs::path base = fs::temp_directory_path() / "btmor_acceptance_c7";
  fs::remove_all(base);
  for (const char* run : {"a", "b"}) {
    const EksmResult res = reduce_eksm(lines, cfg);
    save_rom_bundle(base / run, res.rom);
    write_file_atomic(base / run / "trace.csv", res.trace.to_csv());
  }
  for (const char* name : {"G.mtx", "C.mtx", "B.mtx", "L.mtx", "manifest.txt", "trace.csv"}) {
    std::ifstream fa(base / "a" / name, std::ios::binary);
    std::ifstream fb(base / "b" / name, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    require(fa && fb && sa.str() == sb.str(),
            std::string("rerun bundle differs in ") + name);
  }
  fs::remove_all(base);
  std::ostringstream out;
  out << "dims exact, round-trip dev " << format_double(dev) << ", reruns byte-identical";
  return out.str();
}

std::string criterion_8() {
  const DescriptorSystem sys = test::coupled_system(4, 150, 0.3, 901);  // N = 1204
  require(sys.order() >= 1000, "benchmark smaller than N = 1000");
  require(sys.num_inputs() == 4, "benchmark is not 4-port");
  EksmConfig cfg;  // target_error = 1e-2 default
  cfg.f_min = 1e8;
  cfg.f_max = 1e10;
  const EksmResult res = reduce_eksm(sys, cfg);
  const Eigen::Index limit = sys.order() / 20;
  require(res.rom.order() <= limit,
          "rom order " + std::to_string(res.rom.order()) + " exceeds N/20 = " +
              std::to_string(limit));
  std::ostringstream out;
  out << "N = " << sys.order() << ", r = " << res.rom.order() << " <= " << limit << " ("
      << to_string(res.trace.stop_reason) << ", " << res.rom.iterations << " iterations)";
  return out.str();
}

}  // namespace

int main() {
  Harness h;
  const auto t1 = std::chrono::steady_clock::now();
  h.run(1, "dense Lyapunov solver matches the Kronecker brute-force oracle", criterion_1);
  const double c1_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
  if (c1_secs >= 10.0) {
    std::printf("[FAIL] criterion 1 runtime: %.1f s >= 10 s\n", c1_secs);
    h.all_ok = false;
  }
  h.run(2, "sampled truncation error stays under 2*sum(tail HSVs) for every order",
        criterion_2);
  h.run(3, "EKSM ROM agrees with the dense-BT ROM and meets the error ceiling", criterion_3);
  h.run(4, "full balanced realization has equal diagonal Gramians", criterion_4);
  h.run(5, "stopping rule fires on the third consecutive sub-tol value", criterion_5);
  h.run(6, "full-width EKSM Gramians match dense Gramians", criterion_6);
  h.run(7, "format round trips and deterministic reruns", criterion_7);
  h.run(8, "4-port coupled-line benchmark compresses at least 20x", criterion_8);
  if (!h.all_ok) {
    std::printf("acceptance: FAILURES PRESENT\n");
    return 1;
  }
  std::printf("acceptance: all criteria passed\n");
  return 0;
}

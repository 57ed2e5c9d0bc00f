// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <Eigen/Core>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "btmor/bundle.hpp"
#include "btmor/dense_bt.hpp"
#include "btmor/descriptor.hpp"
#include "btmor/eksm.hpp"
#include "btmor/errors.hpp"
#include "btmor/freq.hpp"
#include "btmor/generate.hpp"
#include "btmor/matrix_market.hpp"
#include "btmor/netlist.hpp"

namespace {

using nlohmann::json;

// Documented ceiling for the dense Gramian path.
constexpr Eigen::Index kDenseOrderCeiling = 2000;

struct RunConfig {
  double tol = 1e-2;
  double target_error = 1e-2;
  double f_min = 1e8;
  double f_max = 1e10;
  int points = 20;
  int maxiter = 50;
  long basis_cap = 0;
  double z0 = 50.0;
  std::string method = "eksm";
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  double c_min = 1e-18;
  long fixed_order = 0;  // 0: use target_error
};

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--tol", cfg.tol, "EKSM convergence threshold");
  cmd->add_option("--target-error", cfg.target_error, "relative HSV tail kept out of the ROM");
  cmd->add_option("--fmin", cfg.f_min, "lowest frequency [Hz]");
  cmd->add_option("--fmax", cfg.f_max, "highest frequency [Hz]");
  cmd->add_option("--points", cfg.points, "frequency point count");
  cmd->add_option("--maxiter", cfg.maxiter, "EKSM iteration limit");
  cmd->add_option("--basis-cap", cfg.basis_cap, "EKSM basis column cap per side (0 = auto)");
  cmd->add_option("--z0", cfg.z0, "reference impedance [ohm]");
  cmd->add_option("--method", cfg.method, "reduction method: eksm or dense")
      ->check(CLI::IsMember({"eksm", "dense"}));
  cmd->add_option("--seed", cfg.seed, "generator seed");
  cmd->add_option("--out-dir", cfg.out_dir, "output directory");
  cmd->add_option("--cmin", cfg.c_min,
                  "capacitance added to empty C rows before reduction (0 disables)");
  cmd->add_option("--order", cfg.fixed_order, "fixed ROM order (0 = use --target-error)");
  cmd->set_config("--config", "", "read options from a config file (flags win)");
}

btmor::EksmConfig eksm_config(const RunConfig& cfg) {
  btmor::EksmConfig ec;
  ec.tol = cfg.tol;
  ec.target_error = cfg.target_error;
  ec.f_min = cfg.f_min;
  ec.f_max = cfg.f_max;
  ec.points = cfg.points;
  ec.maxiter = cfg.maxiter;
  ec.basis_cap = cfg.basis_cap;
  return ec;
}

void validate_common(const RunConfig& cfg) {
  if (!(cfg.tol > 0.0)) {
    throw btmor::ValidationError("tol must be positive");
  }
  if (!(cfg.z0 > 0.0)) {
    throw btmor::ValidationError("z0 must be positive");
  }
  eksm_config(cfg).validate();
}

btmor::OrderRequest order_request(const RunConfig& cfg) {
  return cfg.fixed_order > 0 ? btmor::OrderRequest::fixed(cfg.fixed_order)
                             : btmor::OrderRequest::target(cfg.target_error);
}

std::string ports_csv(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    out += out.empty() ? n : " " + n;
  }
  return out;
}

int run_reduce(const std::string& input, const RunConfig& cfg) {
  validate_common(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  btmor::DescriptorSystem sys = btmor::load_model(input);
  for (const std::string& w : sys.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  sys = btmor::regularize(sys, cfg.c_min);

  btmor::Rom rom;
  std::optional<btmor::ConvergenceTrace> trace;
  Eigen::Index peak_basis_p = 0, peak_basis_q = 0;
  if (cfg.method == "dense") {
    if (sys.order() > kDenseOrderCeiling) {
      throw btmor::ValidationError("dense method is limited to N <= " +
                                   std::to_string(kDenseOrderCeiling) +
                                   "; use --method eksm");
    }
    rom = btmor::reduce_dense(sys, order_request(cfg));
  } else {
    btmor::EksmResult res = btmor::reduce_eksm(sys, eksm_config(cfg));
    if (cfg.fixed_order > 0) {
      // Rebuild at the requested order from the converged factors, clamped to
      // the admissible rank.
      const btmor::HsvSpectrum hsv_conv = btmor::hankel_singular_values(res.zq, res.zp);
      const Eigen::Index r = std::max<Eigen::Index>(
          1, std::min<Eigen::Index>(cfg.fixed_order, btmor::hsv_numerical_rank(hsv_conv)));
      rom = btmor::balance_truncate(sys, res.zp, res.zq, r);
      rom.provenance = btmor::RomProvenance::eksm;
      rom.iterations = res.rom.iterations;
    } else {
      rom = res.rom;
    }
    trace = res.trace;
    peak_basis_p = res.trace.records.back().basis_p;
    peak_basis_q = res.trace.records.back().basis_q;
  }

  const std::filesystem::path out_dir(cfg.out_dir);
  btmor::save_rom_bundle(out_dir, rom);
  if (trace) {
    btmor::write_file_atomic(out_dir / "trace.csv", trace->to_csv());
  }
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream summary;
  summary << "status=ok\n";
  summary << "input=" << input << "\n";
  summary << "method=" << cfg.method << "\n";
  summary << "N=" << sys.order() << "\n";
  summary << "n=" << sys.n << "\n";
  summary << "m=" << sys.m << "\n";
  summary << "p=" << sys.num_inputs() << "\n";
  summary << "q=" << sys.num_outputs() << "\n";
  summary << "r=" << rom.order() << "\n";
  summary << "apriori_bound=" << btmor::format_double(rom.apriori_bound) << "\n";
  if (trace) {
    summary << "iterations=" << rom.iterations << "\n";
    summary << "stop_reason=" << btmor::to_string(trace->stop_reason) << "\n";
    summary << "peak_basis_p=" << peak_basis_p << "\n";
    summary << "peak_basis_q=" << peak_basis_q << "\n";
  }
  summary << "wall_time_s=" << btmor::format_double(wall_s) << "\n";
  summary << "out_dir=" << cfg.out_dir << "\n";
  std::cout << summary.str();
  btmor::write_file_atomic(out_dir / "summary.txt", summary.str());

  json js;
  js["status"] = "ok";
  js["input"] = input;
  js["method"] = cfg.method;
  js["N"] = sys.order();
  js["n"] = sys.n;
  js["m"] = sys.m;
  js["p"] = sys.num_inputs();
  js["q"] = sys.num_outputs();
  js["r"] = rom.order();
  js["apriori_bound"] = rom.apriori_bound;
  if (trace) {
    js["iterations"] = rom.iterations;
    js["stop_reason"] = btmor::to_string(trace->stop_reason);
    js["peak_basis_p"] = peak_basis_p;
    js["peak_basis_q"] = peak_basis_q;
  }
  js["wall_time_s"] = wall_s;
  js["out_dir"] = cfg.out_dir;
  btmor::write_file_atomic(out_dir / "summary.json", js.dump(2) + "\n");
  return 0;
}

int run_compare(const std::string& input_a, const std::string& input_b, const RunConfig& cfg) {
  validate_common(cfg);
  const btmor::DescriptorSystem a = btmor::load_model(input_a);
  const btmor::DescriptorSystem b = btmor::load_model(input_b);
  if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs()) {
    throw btmor::ValidationError("models have incompatible port counts: " +
                                 std::to_string(a.num_inputs()) + "x" +
                                 std::to_string(a.num_outputs()) + " vs " +
                                 std::to_string(b.num_inputs()) + "x" +
                                 std::to_string(b.num_outputs()));
  }
  const btmor::FrequencyGrid grid =
      btmor::FrequencyGrid::linear(cfg.f_min, cfg.f_max, cfg.points);
  const btmor::FrequencySweep sweep_a = btmor::evaluate_tf(a, grid);
  const btmor::FrequencySweep sweep_b = btmor::evaluate_tf(b, grid);
  const double mre = btmor::max_relative_error(sweep_a, sweep_b);

  const bool square = a.num_inputs() == a.num_outputs();
  double worst_s_dev = 0.0;
  std::vector<double> s_dev_per_point;
  if (square) {
    const btmor::FrequencySweep s_a = btmor::h_to_s(sweep_a, cfg.z0);
    const btmor::FrequencySweep s_b = btmor::h_to_s(sweep_b, cfg.z0);
    for (std::size_t i = 0; i < s_a.samples.size(); ++i) {
      const double dev = (s_a.samples[i] - s_b.samples[i]).cwiseAbs().maxCoeff();
      s_dev_per_point.push_back(dev);
      worst_s_dev = std::max(worst_s_dev, dev);
    }
  }

  const std::vector<double> freqs = grid.frequencies();
  std::ostringstream csv;
  csv << "f_hz,rel_error" << (square ? ",s_entry_dev" : "") << "\n";
  std::cout << "f_hz rel_error" << (square ? " s_entry_dev" : "") << "\n";
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double denom = btmor::spectral_norm(sweep_a.samples[i]);
    const Eigen::MatrixXcd diff = sweep_a.samples[i] - sweep_b.samples[i];
    const double err = denom == 0.0 ? std::numeric_limits<double>::infinity()
                                    : btmor::spectral_norm(diff) / denom;
    csv << btmor::format_double(freqs[i]) << "," << btmor::format_double(err);
    std::cout << btmor::format_double(freqs[i]) << " " << btmor::format_double(err);
    if (square) {
      csv << "," << btmor::format_double(s_dev_per_point[i]);
      std::cout << " " << btmor::format_double(s_dev_per_point[i]);
    }
    csv << "\n";
    std::cout << "\n";
  }
  std::cout << "max_relative_error=" << btmor::format_double(mre) << "\n";
  if (square) {
    std::cout << "worst_s_entry_deviation=" << btmor::format_double(worst_s_dev) << "\n";
  }
  const std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);
  btmor::write_file_atomic(out_dir / "compare.csv", csv.str());
  return 0;
}

int run_hsv(const std::string& input, const RunConfig& cfg) {
  validate_common(cfg);
  btmor::DescriptorSystem sys = btmor::load_model(input);
  sys = btmor::regularize(sys, cfg.c_min);
  if (sys.order() > kDenseOrderCeiling) {
    throw btmor::ValidationError("hsv uses the dense path, limited to N <= " +
                                 std::to_string(kDenseOrderCeiling));
  }
  const btmor::GramianPair gram = btmor::solve_gramians_dense(sys);
  const btmor::HsvSpectrum hsv = btmor::hankel_singular_values(gram);
  std::ostringstream csv;
  csv << "r,sigma,tail_bound\n";
  for (Eigen::Index r = 1; r <= hsv.size(); ++r) {
    csv << r << "," << btmor::format_double(hsv.sigmas[static_cast<std::size_t>(r - 1)]) << ","
        << btmor::format_double(hsv.tail_bound(r)) << "\n";
  }
  std::cout << csv.str();
  const std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);
  btmor::write_file_atomic(out_dir / "hsv.csv", csv.str());
  return 0;
}

int run_sweep(const std::string& input, const RunConfig& cfg, const std::string& format,
              bool scattering, const std::string& out_file) {
  validate_common(cfg);
  btmor::DescriptorSystem sys = btmor::load_model(input);
  const btmor::FrequencyGrid grid =
      btmor::FrequencyGrid::linear(cfg.f_min, cfg.f_max, cfg.points);
  btmor::FrequencySweep sweep = btmor::evaluate_tf(sys, grid);
  if (scattering || format == "touchstone") {
    sweep = btmor::h_to_s(sweep, cfg.z0);
  }
  btmor::SweepFormat fmt = btmor::SweepFormat::csv;
  if (format == "touchstone") {
    fmt = btmor::SweepFormat::touchstone;
  } else if (format == "plot") {
    fmt = btmor::SweepFormat::plot_csv;
  }
  const std::string text = btmor::export_sweep(sweep, fmt);
  if (out_file.empty()) {
    std::cout << text;
  } else {
    btmor::write_file_atomic(out_file, text);
  }
  return 0;
}

struct GenConfig {
  std::string kind = "ladder";
  int sections = 8;
  int lines = 4;
  int rows = 4;
  int cols = 4;
  int ports = 1;
  double density = 0.3;
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen(const GenConfig& g) {
  std::string text;
  if (g.kind == "ladder") {
    text = btmor::generate_ladder({g.sections, g.ports, g.seed});
  } else if (g.kind == "mesh") {
    text = btmor::generate_mesh({g.rows, g.cols, g.ports, g.seed});
  } else if (g.kind == "coupled_lines") {
    text = btmor::generate_coupled_lines({g.lines, g.sections, g.density, g.seed});
  } else {
    throw btmor::ValidationError("unknown generator kind '" + g.kind + "'");
  }
  if (g.out.empty()) {
    std::cout << text;
  } else {
    btmor::write_file_atomic(g.out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("BTMOR_THREADS")) {
    Eigen::setNbThreads(std::atoi(threads));
  }

  CLI::App app{"balanced-truncation model order reduction for multi-port RLCk circuits"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string input, input_b;

  CLI::App* reduce = app.add_subcommand("reduce", "reduce a netlist or matrix bundle to a ROM");
  reduce->add_option("input", input, "netlist file or bundle manifest")->required();
  add_common_options(reduce, cfg);

  CLI::App* compare = app.add_subcommand("compare", "compare two models over a frequency grid");
  compare->add_option("model_a", input, "reference model")->required();
  compare->add_option("model_b", input_b, "model under test")->required();
  add_common_options(compare, cfg);

  CLI::App* hsv = app.add_subcommand("hsv", "print the Hankel singular value spectrum");
  hsv->add_option("input", input, "netlist file or bundle manifest")->required();
  add_common_options(hsv, cfg);

  std::string sweep_format = "csv", sweep_out;
  bool sweep_scattering = false;
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate a model over a frequency grid");
  sweep->add_option("input", input, "netlist file or bundle manifest")->required();
  sweep->add_option("--format", sweep_format, "csv, touchstone or plot")
      ->check(CLI::IsMember({"csv", "touchstone", "plot"}));
  sweep->add_flag("--s-params", sweep_scattering, "convert to scattering parameters");
  sweep->add_option("--out", sweep_out, "output path (stdout when omitted)");
  add_common_options(sweep, cfg);

  GenConfig gen_cfg;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic benchmark netlist");
  gen->add_option("--kind", gen_cfg.kind, "ladder, mesh or coupled_lines")
      ->check(CLI::IsMember({"ladder", "mesh", "coupled_lines"}));
  gen->add_option("--sections", gen_cfg.sections, "sections per ladder/line");
  gen->add_option("--lines", gen_cfg.lines, "number of coupled lines");
  gen->add_option("--rows", gen_cfg.rows, "mesh rows");
  gen->add_option("--cols", gen_cfg.cols, "mesh columns");
  gen->add_option("--ports", gen_cfg.ports, "port count (ladder/mesh)");
  gen->add_option("--density", gen_cfg.density, "mutual-coupling density for coupled_lines");
  gen->add_option("--seed", gen_cfg.seed, "generator seed");
  gen->add_option("--out", gen_cfg.out, "output netlist path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (reduce->parsed()) {
      return run_reduce(input, cfg);
    }
    if (compare->parsed()) {
      return run_compare(input, input_b, cfg);
    }
    if (hsv->parsed()) {
      return run_hsv(input, cfg);
    }
    if (sweep->parsed()) {
      return run_sweep(input, cfg, sweep_format, sweep_scattering, sweep_out);
    }
    if (gen->parsed()) {
      return run_gen(gen_cfg);
    }
  } catch (const btmor::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const btmor::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

// SPDX-License-Identifier: Apache-2.0

#include "btmor/freq.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "btmor/errors.hpp"
#include "btmor/linalg.hpp"
#include "btmor/matrix_market.hpp"

namespace btmor {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Complex = std::complex<double>;

void validate_grid(double f_min, double f_max, int points) {
  if (!(f_min > 0.0) || !(f_max > f_min)) {
    throw ValidationError("frequency grid requires 0 < f_min < f_max");
  }
  if (points < 2) {
    throw ValidationError("frequency grid requires at least 2 points");
  }
}

}  // namespace

FrequencyGrid FrequencyGrid::linear(double f_min, double f_max, int points) {
  validate_grid(f_min, f_max, points);
  return FrequencyGrid{f_min, f_max, points, GridSpacing::linear};
}

FrequencyGrid FrequencyGrid::logarithmic(double f_min, double f_max, int points) {
  validate_grid(f_min, f_max, points);
  return FrequencyGrid{f_min, f_max, points, GridSpacing::logarithmic};
}

std::vector<double> FrequencyGrid::frequencies() const {
  validate_grid(f_min, f_max, points);
  std::vector<double> f(static_cast<std::size_t>(points));
  f.front() = f_min;
  f.back() = f_max;
  for (int i = 1; i + 1 < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    f[static_cast<std::size_t>(i)] =
        spacing == GridSpacing::linear
            ? f_min + t * (f_max - f_min)
            : std::exp(std::log(f_min) + t * (std::log(f_max) - std::log(f_min)));
  }
  return f;
}

namespace {

Eigen::MatrixXcd eval_sparse_at(const DescriptorSystem& sys, Complex s, double report_f) {
  Eigen::SparseMatrix<Complex> pencil =
      (s * sys.C.cast<Complex>() - sys.G.cast<Complex>()).eval();
  pencil.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(pencil);
  Eigen::MatrixXcd x;
  if (lu.info() == Eigen::Success) {
    x = lu.solve(sys.B.cast<Complex>().eval());
  }
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    std::ostringstream msg;
    msg << "evaluate_tf: pencil (sC - G) is singular at f = " << format_double(report_f)
        << " Hz";
    throw NumericalError(msg.str());
  }
  return sys.L.cast<Complex>() * x;
}

Eigen::MatrixXcd eval_dense_at(const Rom& rom, Complex s, double report_f) {
  const Eigen::MatrixXcd pencil = s * rom.C.cast<Complex>() - rom.G.cast<Complex>();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(pencil);
  if (!lu.isInvertible()) {
    std::ostringstream msg;
    msg << "evaluate_tf: reduced pencil (sC - G) is singular at f = "
        << format_double(report_f) << " Hz";
    throw NumericalError(msg.str());
  }
  return rom.L.cast<Complex>() * lu.solve(rom.B.cast<Complex>().eval());
}

template <typename Model, typename Eval>
FrequencySweep sweep_impl(const Model& model, const FrequencyGrid& grid, Eval&& eval) {
  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.kind = SweepKind::impedance;
  const std::vector<double> freqs = grid.frequencies();
  sweep.samples.reserve(freqs.size());
  for (const double f : freqs) {
    sweep.samples.push_back(eval(model, Complex(0.0, 2.0 * kPi * f), f));
  }
  return sweep;
}

}  // namespace

FrequencySweep evaluate_tf(const DescriptorSystem& sys, const FrequencyGrid& grid) {
  return sweep_impl(sys, grid, [](const DescriptorSystem& s, Complex z, double f) {
    return eval_sparse_at(s, z, f);
  });
}

FrequencySweep evaluate_tf(const Rom& rom, const FrequencyGrid& grid) {
  return sweep_impl(rom, grid,
                    [](const Rom& r, Complex z, double f) { return eval_dense_at(r, z, f); });
}

Eigen::MatrixXcd evaluate_at(const DescriptorSystem& sys, Complex s) {
  return eval_sparse_at(sys, s, std::abs(s) / (2.0 * kPi));
}

Eigen::MatrixXcd evaluate_at(const Rom& rom, Complex s) {
  return eval_dense_at(rom, s, std::abs(s) / (2.0 * kPi));
}

double max_relative_error(const FrequencySweep& ref, const FrequencySweep& other) {
  if (!(ref.grid == other.grid)) {
    throw ValidationError("max_relative_error: sweeps use different grids");
  }
  if (ref.num_outputs() != other.num_outputs() || ref.num_inputs() != other.num_inputs()) {
    throw ValidationError("max_relative_error: sweeps have different port shapes");
  }
  double sup_ref = 0.0, sup_diff = 0.0;
  for (std::size_t i = 0; i < ref.samples.size(); ++i) {
    sup_ref = std::max(sup_ref, spectral_norm(ref.samples[i]));
    const Eigen::MatrixXcd diff = ref.samples[i] - other.samples[i];
    sup_diff = std::max(sup_diff, spectral_norm(diff));
  }
  if (sup_ref == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return sup_diff / sup_ref;
}

FrequencySweep h_to_s(const FrequencySweep& sweep, double z0) {
  if (sweep.kind != SweepKind::impedance) {
    throw ValidationError("h_to_s: input sweep is not an impedance sweep");
  }
  if (sweep.num_outputs() != sweep.num_inputs()) {
    throw ValidationError("h_to_s: scattering conversion needs q == p");
  }
  if (!(z0 > 0.0)) {
    throw ValidationError("h_to_s: reference impedance must be positive");
  }
  FrequencySweep out;
  out.grid = sweep.grid;
  out.kind = SweepKind::scattering;
  out.z0 = z0;
  const Eigen::Index p = sweep.num_inputs();
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(p, p);
  const std::vector<double> freqs = sweep.grid.frequencies();
  out.samples.reserve(sweep.samples.size());
  for (std::size_t i = 0; i < sweep.samples.size(); ++i) {
    const Eigen::MatrixXcd& z = sweep.samples[i];
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(z + z0 * eye);
    if (!lu.isInvertible()) {
      throw NumericalError("h_to_s: (Z + z0 I) is singular at f = " +
                           format_double(freqs[i]) + " Hz");
    }
    out.samples.push_back((z - z0 * eye) * lu.inverse());
  }
  return out;
}

namespace {

const char* kind_name(SweepKind kind) {
  return kind == SweepKind::impedance ? "impedance_H" : "scattering_S";
}

std::string export_csv(const FrequencySweep& sweep) {
  std::ostringstream out;
  out << "# btmor sweep kind=" << kind_name(sweep.kind) << " z0=" << format_double(sweep.z0)
      << "\n";
  out << "f_hz";
  const Eigen::Index q = sweep.num_outputs(), p = sweep.num_inputs();
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      out << ",re_" << i + 1 << "_" << j + 1 << ",im_" << i + 1 << "_" << j + 1;
    }
  }
  out << "\n";
  const std::vector<double> freqs = sweep.grid.frequencies();
  for (std::size_t k = 0; k < sweep.samples.size(); ++k) {
    out << format_double(freqs[k]);
    for (Eigen::Index i = 0; i < q; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        out << "," << format_double(sweep.samples[k](i, j).real()) << ","
            << format_double(sweep.samples[k](i, j).imag());
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string export_plot_csv(const FrequencySweep& sweep) {
  std::ostringstream out;
  out << "f_hz,out_port,in_port,magnitude_db,phase_deg\n";
  const std::vector<double> freqs = sweep.grid.frequencies();
  for (std::size_t k = 0; k < sweep.samples.size(); ++k) {
    for (Eigen::Index i = 0; i < sweep.num_outputs(); ++i) {
      for (Eigen::Index j = 0; j < sweep.num_inputs(); ++j) {
        const Complex v = sweep.samples[k](i, j);
        const double mag = std::abs(v);
        out << format_double(freqs[k]) << "," << i + 1 << "," << j + 1 << ","
            << format_double(20.0 * std::log10(std::max(mag, 1e-300))) << ","
            << format_double(std::arg(v) * 180.0 / kPi) << "\n";
      }
    }
  }
  return out.str();
}

std::string export_touchstone(const FrequencySweep& sweep) {
  if (sweep.kind != SweepKind::scattering) {
    throw ValidationError("export_sweep: touchstone output needs a scattering sweep");
  }
  if (sweep.num_outputs() != sweep.num_inputs()) {
    throw ValidationError("export_sweep: touchstone output needs q == p");
  }
  const Eigen::Index n = sweep.num_inputs();
  std::ostringstream out;
  out << "! " << n << "-port S-parameter data\n";
  out << "# Hz S RI R " << format_double(sweep.z0) << "\n";
  const std::vector<double> freqs = sweep.grid.frequencies();
  for (std::size_t k = 0; k < sweep.samples.size(); ++k) {
    const Eigen::MatrixXcd& s = sweep.samples[k];
    if (n == 1) {
      out << format_double(freqs[k]) << " " << format_double(s(0, 0).real()) << " "
          << format_double(s(0, 0).imag()) << "\n";
    } else if (n == 2) {
      // Touchstone v1 2-port order: S11 S21 S12 S22 on one line.
      out << format_double(freqs[k]);
      for (const auto& v : {s(0, 0), s(1, 0), s(0, 1), s(1, 1)}) {
        out << " " << format_double(v.real()) << " " << format_double(v.imag());
      }
      out << "\n";
    } else {
      // Row per line, wrapped at four complex pairs.
      for (Eigen::Index i = 0; i < n; ++i) {
        std::ostringstream line;
        if (i == 0) {
          line << format_double(freqs[k]);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j > 0 && j % 4 == 0) {
            out << line.str() << "\n";
            line.str("");
          }
          line << (line.tellp() > 0 ? " " : "") << format_double(s(i, j).real()) << " "
               << format_double(s(i, j).imag());
        }
        out << line.str() << "\n";
      }
    }
  }
  return out.str();
}

// Reconstruct the parametric grid from explicit frequencies; sweeps carry
// (f_min, f_max, points, spacing), so irregular spacings are rejected.
FrequencyGrid grid_from_frequencies(const std::vector<double>& f) {
  if (f.size() < 2) {
    throw ValidationError("sweep parse: need at least 2 frequency points");
  }
  const int l = static_cast<int>(f.size());
  for (const GridSpacing spacing : {GridSpacing::linear, GridSpacing::logarithmic}) {
    if (spacing == GridSpacing::logarithmic && !(f.front() > 0.0)) {
      continue;
    }
    FrequencyGrid g{f.front(), f.back(), l, spacing};
    const std::vector<double> expect = g.frequencies();
    bool match = true;
    for (std::size_t i = 0; i < f.size() && match; ++i) {
      match = std::abs(expect[i] - f[i]) <= 1e-9 * std::abs(f.back());
    }
    if (match) {
      return g;
    }
  }
  throw ValidationError("sweep parse: frequency spacing is neither linear nor logarithmic");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    out.push_back(item);
  }
  return out;
}

}  // namespace

std::string export_sweep(const FrequencySweep& sweep, SweepFormat format) {
  if (sweep.samples.size() != static_cast<std::size_t>(sweep.grid.points)) {
    throw ValidationError("export_sweep: sample count does not match the grid");
  }
  switch (format) {
    case SweepFormat::csv:
      return export_csv(sweep);
    case SweepFormat::touchstone:
      return export_touchstone(sweep);
    case SweepFormat::plot_csv:
      return export_plot_csv(sweep);
  }
  throw ValidationError("export_sweep: unknown format");
}

FrequencySweep parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  SweepKind kind = SweepKind::impedance;
  double z0 = 0.0;
  Eigen::Index q = 0, p = 0;
  std::vector<double> freqs;
  std::vector<Eigen::MatrixXcd> samples;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        if (tok.rfind("kind=", 0) == 0) {
          kind = tok.substr(5) == "scattering_S" ? SweepKind::scattering
                                                 : SweepKind::impedance;
        } else if (tok.rfind("z0=", 0) == 0) {
          z0 = std::strtod(tok.c_str() + 3, nullptr);
        }
      }
      continue;
    }
    const std::vector<std::string> cells = split(line, ',');
    if (!saw_header) {
      if (cells.empty() || cells.front() != "f_hz") {
        throw ValidationError("sweep csv: missing f_hz header");
      }
      for (const std::string& cell : cells) {
        if (cell.rfind("re_", 0) == 0) {
          const std::vector<std::string> parts = split(cell.substr(3), '_');
          if (parts.size() != 2) {
            throw ValidationError("sweep csv: bad column label '" + cell + "'");
          }
          q = std::max<Eigen::Index>(q, std::stol(parts[0]));
          p = std::max<Eigen::Index>(p, std::stol(parts[1]));
        }
      }
      if (q == 0 || p == 0 || cells.size() != static_cast<std::size_t>(1 + 2 * q * p)) {
        throw ValidationError("sweep csv: inconsistent header");
      }
      saw_header = true;
      continue;
    }
    if (cells.size() != static_cast<std::size_t>(1 + 2 * q * p)) {
      throw ValidationError("sweep csv: row width does not match header");
    }
    freqs.push_back(std::strtod(cells[0].c_str(), nullptr));
    Eigen::MatrixXcd s(q, p);
    std::size_t c = 1;
    for (Eigen::Index i = 0; i < q; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        const double re = std::strtod(cells[c].c_str(), nullptr);
        const double im = std::strtod(cells[c + 1].c_str(), nullptr);
        s(i, j) = Complex(re, im);
        c += 2;
      }
    }
    samples.push_back(std::move(s));
  }
  if (!saw_header || samples.empty()) {
    throw ValidationError("sweep csv: no data rows");
  }
  FrequencySweep sweep;
  sweep.grid = grid_from_frequencies(freqs);
  sweep.samples = std::move(samples);
  sweep.kind = kind;
  sweep.z0 = z0;
  return sweep;
}

FrequencySweep parse_touchstone(const std::string& text, int nports) {
  if (nports < 1) {
    throw ValidationError("touchstone parse: port count must be at least 1");
  }
  const Eigen::Index n = nports;
  double unit = 1e9;  // touchstone v1 default is GHz
  double z0 = 50.0;
  std::string format = "MA";
  bool saw_options = false;
  std::vector<double> numbers;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto bang = line.find('!');
    if (bang != std::string::npos) {
      line.erase(bang);
    }
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) {
      continue;
    }
    if (first == "#") {
      saw_options = true;
      std::string tok;
      while (ls >> tok) {
        std::string upper_tok = tok;
        std::transform(upper_tok.begin(), upper_tok.end(), upper_tok.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        if (upper_tok == "HZ") {
          unit = 1.0;
        } else if (upper_tok == "KHZ") {
          unit = 1e3;
        } else if (upper_tok == "MHZ") {
          unit = 1e6;
        } else if (upper_tok == "GHZ") {
          unit = 1e9;
        } else if (upper_tok == "RI" || upper_tok == "MA" || upper_tok == "DB") {
          format = upper_tok;
        } else if (upper_tok == "R") {
          if (!(ls >> z0)) {
            throw ValidationError("touchstone parse: R option without a value");
          }
        } else if (upper_tok == "S") {
          // scattering data, the only parameter type handled here
        } else {
          throw ValidationError("touchstone parse: unsupported option '" + tok + "'");
        }
      }
      continue;
    }
    // Data line: first token plus the rest are plain numbers.
    ls.clear();
    ls.seekg(0);
    double v = 0.0;
    while (ls >> v) {
      numbers.push_back(v);
    }
  }
  if (!saw_options) {
    throw ValidationError("touchstone parse: missing # option line");
  }
  const std::size_t chunk = 1 + 2 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (numbers.empty() || numbers.size() % chunk != 0) {
    throw ValidationError("touchstone parse: data size does not match the port count");
  }

  std::vector<double> freqs;
  std::vector<Eigen::MatrixXcd> samples;
  for (std::size_t base = 0; base < numbers.size(); base += chunk) {
    freqs.push_back(numbers[base] * unit);
    Eigen::MatrixXcd s(n, n);
    for (Eigen::Index k = 0; k < n * n; ++k) {
      const double a = numbers[base + 1 + 2 * static_cast<std::size_t>(k)];
      const double b = numbers[base + 2 + 2 * static_cast<std::size_t>(k)];
      Complex v;
      if (format == "RI") {
        v = Complex(a, b);
      } else if (format == "MA") {
        v = std::polar(a, b * kPi / 180.0);
      } else {
        v = std::polar(std::pow(10.0, a / 20.0), b * kPi / 180.0);
      }
      Eigen::Index i, j;
      if (n == 2) {
        // v1 2-port order is column-major: S11 S21 S12 S22.
        i = k % 2;
        j = k / 2;
      } else {
        i = k / n;
        j = k % n;
      }
      s(i, j) = v;
    }
    samples.push_back(std::move(s));
  }

  FrequencySweep sweep;
  sweep.grid = grid_from_frequencies(freqs);
  sweep.samples = std::move(samples);
  sweep.kind = SweepKind::scattering;
  sweep.z0 = z0;
  return sweep;
}

}  // namespace btmor

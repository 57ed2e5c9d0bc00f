// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_FREQ_HPP
#define BTMOR_FREQ_HPP

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "btmor/dense_bt.hpp"
#include "btmor/descriptor.hpp"

namespace btmor {

enum class GridSpacing { linear, logarithmic };

// Frequency grid over [f_min, f_max] hertz, endpoints included.
struct FrequencyGrid {
  double f_min = 0.0;
  double f_max = 0.0;
  int points = 0;
  GridSpacing spacing = GridSpacing::linear;

  static FrequencyGrid linear(double f_min, double f_max, int points);
  static FrequencyGrid logarithmic(double f_min, double f_max, int points);

  std::vector<double> frequencies() const;
  bool operator==(const FrequencyGrid&) const = default;
};

enum class SweepKind { impedance, scattering };

// Per-frequency complex q x p transfer-function samples.
struct FrequencySweep {
  FrequencyGrid grid;
  std::vector<Eigen::MatrixXcd> samples;
  SweepKind kind = SweepKind::impedance;
  double z0 = 0.0;  // reference impedance, meaningful for scattering sweeps

  Eigen::Index num_outputs() const { return samples.empty() ? 0 : samples.front().rows(); }
  Eigen::Index num_inputs() const { return samples.empty() ? 0 : samples.front().cols(); }
};

// H(s) = L (sC - G)^-1 B at s = j*2*pi*f for every grid frequency. One
// complex LU per point; a singular pencil at a grid point is reported with
// that frequency.
FrequencySweep evaluate_tf(const DescriptorSystem& sys, const FrequencyGrid& grid);
FrequencySweep evaluate_tf(const Rom& rom, const FrequencyGrid& grid);

// Single-point evaluations at arbitrary complex s.
Eigen::MatrixXcd evaluate_at(const DescriptorSystem& sys, std::complex<double> s);
Eigen::MatrixXcd evaluate_at(const Rom& rom, std::complex<double> s);

// Sampled-H-infinity error ratio: max_i ||ref_i - other_i||_2 divided by
// max_i ||ref_i||_2 (spectral norms over the shared grid). Returns +inf when
// the reference sweep is identically zero.
double max_relative_error(const FrequencySweep& ref, const FrequencySweep& other);

// Impedance to scattering: S = (Z - z0 I)(Z + z0 I)^-1 per point.
FrequencySweep h_to_s(const FrequencySweep& sweep, double z0);

enum class SweepFormat { csv, touchstone, plot_csv };

// Serialize a sweep. csv: one row per frequency with Re/Im columns per (i,j)
// entry. touchstone: Touchstone v1 (requires a scattering sweep with equal
// port counts). plot_csv: long format f, i, j, magnitude_dB, phase_deg.
std::string export_sweep(const FrequencySweep& sweep, SweepFormat format);

// Inverse parsers used by the CLI and the round-trip checks.
FrequencySweep parse_sweep_csv(const std::string& text);
FrequencySweep parse_touchstone(const std::string& text, int nports);

}  // namespace btmor

#endif  // BTMOR_FREQ_HPP

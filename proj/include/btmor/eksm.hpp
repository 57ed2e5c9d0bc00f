// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_EKSM_HPP
#define BTMOR_EKSM_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "btmor/dense_bt.hpp"
#include "btmor/descriptor.hpp"
#include "btmor/freq.hpp"
#include "btmor/linalg.hpp"

namespace btmor {

enum class GramianSide { controllability, observability };

// Shared sparse factorizations of G and C with the four operator products the
// extended Krylov recursion needs. The dense C^-1 G is never formed: every
// product is a sparse multiply plus a sparse solve.
class SystemOperators {
public:
  explicit SystemOperators(const DescriptorSystem& sys);

  // Gc x = C^-1 G x (controllability) or Gc^T x (observability).
  Eigen::MatrixXd apply(GramianSide side, const Eigen::MatrixXd& x) const;
  // Gc^-1 x = G^-1 C x (controllability) or Gc^-T x (observability).
  Eigen::MatrixXd apply_inverse(GramianSide side, const Eigen::MatrixXd& x) const;
  // Lyapunov input block: C^-1 B (controllability) or L^T (observability).
  Eigen::MatrixXd start_block(GramianSide side) const;

  Eigen::Index dim() const { return g_.rows(); }

private:
  Eigen::SparseMatrix<double> g_, c_;
  Eigen::MatrixXd b_, lt_;
  Factorization fg_, fc_;
};

// One side of the dual extended Krylov iteration. The newest block sits in
// the trailing columns of the basis, forward (Gc-image) part first; the two
// widths drive the next expansion and survive deflation.
struct EksState {
  GramianSide side = GramianSide::controllability;
  Eigen::MatrixXd basis;  // orthonormal columns, N x k
  Eigen::MatrixXd start;  // C^-1 B or L^T
  int iteration = 1;
  Eigen::Index newest_forward = 0;
  Eigen::Index newest_inverse = 0;
};

// Basis from the block pair {start, Gc^-1 start}, orthonormalized with
// deflation and clipped to max_cols columns (negative = unlimited).
EksState eks_init(const SystemOperators& ops, GramianSide side, Eigen::Index max_cols = -1);

// Append the next block: Gc applied to the newest forward columns, Gc^-1 to
// the newest inverse columns, orthogonalized against the basis. Appends at
// most max_new columns (negative = unlimited); returns how many were added
// (0 = stagnation, the subspace has no new directions). *truncated reports
// whether the limit cut off surviving directions, i.e. a basis cap actually
// blocked growth.
Eigen::Index eks_expand(EksState& state, const SystemOperators& ops,
                        Eigen::Index max_new = -1, bool* truncated = nullptr);

// Galerkin projection: solve (K^T Gc K) X + X (K^T Gc K)^T = -(K^T Bc)(K^T Bc)^T.
Eigen::MatrixXd project_and_solve(const EksState& state, const SystemOperators& ops);

// Back-projected low-rank Gramian factor Z = K U S^1/2 with [U,S,~] = svd(X).
Eigen::MatrixXd lowrank_factor(const EksState& state, const Eigen::MatrixXd& x_small);

// max over grid points of ||current - previous||_2 / ||current||_2.
double sample_change(const std::vector<Eigen::MatrixXcd>& current,
                     const std::vector<Eigen::MatrixXcd>& previous);

struct EksmConfig {
  double tol = 1e-2;           // convergence threshold on the sampled change
  double target_error = 1e-2;  // relative HSV tail for the final order
  double f_min = 1e8;
  double f_max = 1e10;
  int points = 20;
  GridSpacing spacing = GridSpacing::linear;
  int maxiter = 50;
  Eigen::Index basis_cap = 0;  // 0 picks min(N, 2000) columns per side

  void validate() const;
  FrequencyGrid grid() const;
  Eigen::Index effective_basis_cap(Eigen::Index n_states) const;
};

struct TraceRecord {
  int iteration = 0;
  Eigen::Index basis_p = 0;
  Eigen::Index basis_q = 0;
  double criterion = 0.0;
  Eigen::Index probe_order = 0;
};

enum class StopReason { three_below_tol, maxiter, basis_cap };

const char* to_string(StopReason reason);

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  StopReason stop_reason = StopReason::maxiter;

  // Columns: j, basis_p, basis_q, criterion, probe_r.
  std::string to_csv() const;
};

// Stop once the criterion has stayed below tol for three consecutive
// iterations.
class StoppingRule {
public:
  explicit StoppingRule(double tol, int required = 3) : tol_(tol), required_(required) {}

  // Feed one criterion value; true means stop now.
  bool update(double criterion) {
    run_ = criterion < tol_ ? run_ + 1 : 0;
    return run_ >= required_;
  }
  int run_length() const { return run_; }

private:
  double tol_;
  int required_;
  int run_ = 0;
};

struct ProbeResult {
  Rom rom;
  double criterion = 0.0;
  std::vector<Eigen::MatrixXcd> samples;
  Eigen::MatrixXd zp, zq;
};

// Build the probe ROM from the current small solutions and measure the
// sampled transfer-function change against the previous pass (infinity for
// the baseline pass).
ProbeResult probe_rom(const EksState& state_p, const EksState& state_q,
                      const Eigen::MatrixXd& x_p, const Eigen::MatrixXd& x_q,
                      const DescriptorSystem& sys, const EksmConfig& config,
                      const std::vector<Eigen::MatrixXcd>* previous_samples);

struct EksmResult {
  Rom rom;
  ConvergenceTrace trace;
  Eigen::MatrixXd zp, zq;  // converged low-rank Gramian factors
};

// Dual-Gramian extended Krylov reduction: both subspaces expand in lockstep,
// each pass solves both projected Lyapunov equations and probes the ROM, and
// the run stops on three consecutive sub-tol changes, maxiter, or the basis
// cap.
EksmResult reduce_eksm(const DescriptorSystem& sys, const EksmConfig& config);

}  // namespace btmor

#endif  // BTMOR_EKSM_HPP

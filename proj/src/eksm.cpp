// SPDX-License-Identifier: Apache-2.0

#include "btmor/eksm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "btmor/errors.hpp"
#include "btmor/matrix_market.hpp"

namespace btmor {

SystemOperators::SystemOperators(const DescriptorSystem& sys)
    : g_(sys.G),
      c_(sys.C),
      b_(sys.B),
      lt_(sys.L.transpose()),
      fg_(factorize(sys.G, "G")),
      fc_(factorize(sys.C, "C")) {}

Eigen::MatrixXd SystemOperators::apply(GramianSide side, const Eigen::MatrixXd& x) const {
  if (side == GramianSide::controllability) {
    return fc_.solve(g_ * x);  // C^-1 (G x)
  }
  return g_.transpose() * fc_.solve_transpose(x);  // G^T (C^-T x)
}

Eigen::MatrixXd SystemOperators::apply_inverse(GramianSide side,
                                               const Eigen::MatrixXd& x) const {
  if (side == GramianSide::controllability) {
    return fg_.solve(c_ * x);  // G^-1 (C x)
  }
  return c_.transpose() * fg_.solve_transpose(x);  // C^T (G^-T x)
}

Eigen::MatrixXd SystemOperators::start_block(GramianSide side) const {
  if (side == GramianSide::controllability) {
    return fc_.solve(b_);
  }
  return lt_;
}

namespace {

// Split survivors of a two-segment block into forward/inverse widths.
std::pair<Eigen::Index, Eigen::Index> split_counts(const std::vector<Eigen::Index>& kept,
                                                   Eigen::Index first_width) {
  Eigen::Index forward = 0;
  for (const Eigen::Index idx : kept) {
    if (idx < first_width) {
      ++forward;
    }
  }
  return {forward, static_cast<Eigen::Index>(kept.size()) - forward};
}

}  // namespace

EksState eks_init(const SystemOperators& ops, GramianSide side, Eigen::Index max_cols) {
  EksState state;
  state.side = side;
  state.start = ops.start_block(side);
  const Eigen::Index p = state.start.cols();
  Eigen::MatrixXd block(ops.dim(), 2 * p);
  block.leftCols(p) = state.start;
  block.rightCols(p) = ops.apply_inverse(side, state.start);
  OrthResult r = orth_tracked(block);
  if (r.q.cols() == 0) {
    throw NumericalError("eks_init: starting block deflated to an empty basis");
  }
  if (max_cols >= 0 && r.q.cols() > max_cols) {
    if (max_cols == 0) {
      throw ValidationError("eks_init: basis cap leaves no room for the starting block");
    }
    r.q.conservativeResize(Eigen::NoChange, max_cols);
    r.kept.resize(static_cast<std::size_t>(max_cols));
  }
  state.basis = std::move(r.q);
  std::tie(state.newest_forward, state.newest_inverse) = split_counts(r.kept, p);
  state.iteration = 1;
  return state;
}

Eigen::Index eks_expand(EksState& state, const SystemOperators& ops, Eigen::Index max_new,
                        bool* truncated) {
  if (truncated != nullptr) {
    *truncated = false;
  }
  const Eigen::Index nf = state.newest_forward;
  const Eigen::Index ni = state.newest_inverse;
  const Eigen::Index base = state.basis.cols() - nf - ni;
  if (nf + ni == 0) {
    ++state.iteration;
    return 0;
  }
  Eigen::MatrixXd candidates(ops.dim(), nf + ni);
  if (nf > 0) {
    candidates.leftCols(nf) = ops.apply(state.side, state.basis.middleCols(base, nf));
  }
  if (ni > 0) {
    candidates.rightCols(ni) =
        ops.apply_inverse(state.side, state.basis.middleCols(base + nf, ni));
  }
  OrthResult r = orth_tracked(candidates, &state.basis);
  Eigen::Index added = r.q.cols();
  if (max_new >= 0 && added > max_new) {
    if (truncated != nullptr) {
      *truncated = true;
    }
    added = max_new;
    if (added == 0) {
      // The cap blocked all growth; keep the newest block intact so a later
      // call with room can still expand.
      ++state.iteration;
      return 0;
    }
    r.q.conservativeResize(Eigen::NoChange, added);
    r.kept.resize(static_cast<std::size_t>(added));
  }
  if (added > 0) {
    state.basis.conservativeResize(Eigen::NoChange, base + nf + ni + added);
    state.basis.rightCols(added) = r.q;
  }
  std::tie(state.newest_forward, state.newest_inverse) = split_counts(r.kept, nf);
  ++state.iteration;
  return added;
}

Eigen::MatrixXd project_and_solve(const EksState& state, const SystemOperators& ops) {
  if (state.basis.cols() == 0) {
    throw ValidationError("project_and_solve: empty basis");
  }
  const Eigen::MatrixXd a_small =
      state.basis.transpose() * ops.apply(state.side, state.basis);
  const Eigen::MatrixXd r_small = state.basis.transpose() * state.start;
  return solve_lyapunov_dense(a_small, r_small * r_small.transpose());
}

Eigen::MatrixXd lowrank_factor(const EksState& state, const Eigen::MatrixXd& x_small) {
  const Svd dec = svd(x_small);
  return state.basis * (dec.u * dec.sigma.cwiseMax(0.0).cwiseSqrt().asDiagonal());
}

double sample_change(const std::vector<Eigen::MatrixXcd>& current,
                     const std::vector<Eigen::MatrixXcd>& previous) {
  if (current.size() != previous.size()) {
    throw ValidationError("sample_change: sample counts differ");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    const double denom = spectral_norm(current[i]);
    const Eigen::MatrixXcd diff = current[i] - previous[i];
    const double num = spectral_norm(diff);
    if (denom == 0.0) {
      if (num == 0.0) {
        continue;
      }
      return std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, num / denom);
  }
  return worst;
}

void EksmConfig::validate() const {
  if (tol < 0.0) {
    throw ValidationError("eksm config: tol must be nonnegative");
  }
  if (!(target_error > 0.0)) {
    throw ValidationError("eksm config: target_error must be positive");
  }
  if (!(f_min > 0.0) || !(f_max > f_min)) {
    throw ValidationError("eksm config: requires 0 < f_min < f_max");
  }
  if (points < 2) {
    throw ValidationError("eksm config: needs at least 2 frequency points");
  }
  if (maxiter < 1) {
    throw ValidationError("eksm config: maxiter must be at least 1");
  }
  if (basis_cap < 0) {
    throw ValidationError("eksm config: basis_cap must be nonnegative");
  }
}

FrequencyGrid EksmConfig::grid() const {
  return spacing == GridSpacing::linear ? FrequencyGrid::linear(f_min, f_max, points)
                                        : FrequencyGrid::logarithmic(f_min, f_max, points);
}

Eigen::Index EksmConfig::effective_basis_cap(Eigen::Index n_states) const {
  const Eigen::Index fallback = std::min<Eigen::Index>(n_states, 2000);
  return basis_cap > 0 ? basis_cap : fallback;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::three_below_tol:
      return "three_below_tol";
    case StopReason::maxiter:
      return "maxiter";
    case StopReason::basis_cap:
      return "basis_cap";
  }
  return "unknown";
}

std::string ConvergenceTrace::to_csv() const {
  std::ostringstream out;
  out << "j,basis_p,basis_q,criterion,probe_r\n";
  for (const TraceRecord& rec : records) {
    out << rec.iteration << "," << rec.basis_p << "," << rec.basis_q << ","
        << format_double(rec.criterion) << "," << rec.probe_order << "\n";
  }
  return out.str();
}

ProbeResult probe_rom(const EksState& state_p, const EksState& state_q,
                      const Eigen::MatrixXd& x_p, const Eigen::MatrixXd& x_q,
                      const DescriptorSystem& sys, const EksmConfig& config,
                      const std::vector<Eigen::MatrixXcd>* previous_samples) {
  ProbeResult out;
  out.zp = lowrank_factor(state_p, x_p);
  out.zq = lowrank_factor(state_q, x_q);
  const HsvSpectrum hsv = hankel_singular_values(out.zq, out.zp);
  Eigen::Index r = choose_order(hsv, OrderRequest::target(config.target_error));
  r = std::max<Eigen::Index>(1, std::min(r, hsv_numerical_rank(hsv)));
  out.rom = balance_truncate(sys, out.zp, out.zq, r);
  out.rom.provenance = RomProvenance::eksm;
  out.samples = evaluate_tf(out.rom, config.grid()).samples;
  out.criterion = previous_samples == nullptr
                      ? std::numeric_limits<double>::infinity()
                      : sample_change(out.samples, *previous_samples);
  return out;
}

EksmResult reduce_eksm(const DescriptorSystem& sys, const EksmConfig& config) {
  config.validate();
  if (sys.order() == 0) {
    throw ValidationError("reduce_eksm: empty system");
  }
  const Eigen::Index cap = config.effective_basis_cap(sys.order());
  const SystemOperators ops(sys);

  EksState state_p = eks_init(ops, GramianSide::controllability, cap);
  EksState state_q = eks_init(ops, GramianSide::observability, cap);

  ConvergenceTrace trace;
  StoppingRule rule(config.tol);
  std::vector<Eigen::MatrixXcd> previous_samples;
  bool have_previous = false;
  bool cap_blocked = false;
  ProbeResult probe;

  for (int iter = 1;; ++iter) {
    const Eigen::MatrixXd x_p = project_and_solve(state_p, ops);
    const Eigen::MatrixXd x_q = project_and_solve(state_q, ops);
    probe = probe_rom(state_p, state_q, x_p, x_q, sys, config,
                      have_previous ? &previous_samples : nullptr);
    trace.records.push_back(
        {iter, state_p.basis.cols(), state_q.basis.cols(), probe.criterion,
         probe.rom.order()});
    previous_samples = probe.samples;
    have_previous = true;

    if (rule.update(probe.criterion)) {
      trace.stop_reason = StopReason::three_below_tol;
      break;
    }
    if (cap_blocked) {
      trace.stop_reason = StopReason::basis_cap;
      break;
    }
    if (iter >= config.maxiter) {
      trace.stop_reason = StopReason::maxiter;
      break;
    }
    // Natural stagnation (no new directions) keeps iterating so the
    // criterion rule can fire; only a cap that cut off real growth stops the
    // run, after one final solve with the capped basis.
    bool trunc_p = false, trunc_q = false;
    eks_expand(state_p, ops, std::max<Eigen::Index>(0, cap - state_p.basis.cols()), &trunc_p);
    eks_expand(state_q, ops, std::max<Eigen::Index>(0, cap - state_q.basis.cols()), &trunc_q);
    cap_blocked = trunc_p || trunc_q;
  }

  EksmResult result;
  result.rom = probe.rom;
  result.rom.iterations = trace.records.back().iteration;
  result.trace = trace;
  result.zp = probe.zp;
  result.zq = probe.zq;
  return result;
}

}  // namespace btmor

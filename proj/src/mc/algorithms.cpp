#include <algorithm>
#include <cmath>
#include <string>

#include "sagopt/completion.hpp"
#include "sagopt/errors.hpp"
#include "sagopt/kernels.hpp"
#include "sagopt/steppers.hpp"

namespace sagopt::mc {

namespace {

bool finite(const Matrix& m) { return m.all_finite(); }

// Shared loop for the fixed-step and backtracking variants. Each iteration
// builds the extrapolated point Y (and Z for SFISTA), takes the gradient at
// the algorithm's evaluation point, and thresholds Y - c g.
class ProxRunner {
 public:
  ProxRunner(Algorithm a, const CompletionProblem& p, const RunOptions& opt)
      : a_(a), p_(p), opt_(opt), x_(opt.x0 ? *opt.x0 : p.m_obs()), xp_(x_), xpp_(x_), y_(p.rows(), p.cols()), z_(p.rows(), p.cols()),
        g_(p.rows(), p.cols()), w_(p.rows(), p.cols()) {
    if (x_.rows() != p.rows() || x_.cols() != p.cols())
      throw PreconditionError("matrix completion: starting point shape does not match the problem");
    ws_.full_only = opt.full_svd_only;
    k_ = a == Algorithm::sfista ? 2 : 1;
    f0_ = opt.initial_value ? *opt.initial_value : objective_value(x_, p_);
    tr_.algorithm = a;
    tr_.values.push_back(f0_);
    if (opt_.keep_iterates) tr_.iterates.push_back(x_);
  }

  // Step-size multiplier c for the current iteration given the base step s.
  double scale(double s) const {
    if (a_ != Algorithm::sfista) return s;
    const double k = static_cast<double>(k_);
    return k * s / (2.0 * k + 4.0);
  }

  // Builds Y (and Z) and the gradient; returns G at the gradient point.
  void prepare() {
    if (a_ == Algorithm::sfista) {
      sag_points(sag_weights(k_), x_.flat(), xp_.flat(), xpp_.flat(), y_.flat(), z_.flat());
      smooth_grad(z_, p_, g_);
    } else {
      const double beta = a_ == Algorithm::fista ? (t_prev_ - 1.0) / t_ : nag_momentum(k_);
      extrapolate(x_.flat(), xp_.flat(), beta, y_.flat());
      smooth_grad(y_, p_, g_);
    }
  }

  // Candidate X~ = prox_{lambda c}(Y - c g). Returns nullopt on a non-finite input.
  std::optional<SvtResult> candidate(double c) {
    std::copy(y_.flat().begin(), y_.flat().end(), w_.flat().begin());
    kernels::axpy(-c, g_.flat(), w_.flat());
    if (!finite(w_)) return std::nullopt;
    return svt(w_, p_.lambda_reg() * c, &ws_);
  }

  // Sufficient decrease at X~ in expanded form (G is quadratic):
  //   <P d, Y - Z> + 1/2 ||P d||^2 < ||d||^2 / (2c),  d = X~ - Y.
  // For FISTA/APG Y = Z and the first term drops.
  bool sufficient_decrease(const Matrix& xt, double c) const {
    const auto wt = p_.weights().flat();
    const auto xv = xt.flat();
    const auto yv = y_.flat();
    const auto zv = z_.flat();
    const bool has_z = a_ == Algorithm::sfista;
    double pd2 = 0.0, d2 = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) {
      const double d = xv[i] - yv[i];
      d2 += d * d;
      if (wt[i] != 0.0) {
        pd2 += d * d;
        if (has_z) cross += d * (yv[i] - zv[i]);
      }
    }
    if (d2 == 0.0) return true;
    return cross + 0.5 * pd2 < d2 / (2.0 * c);
  }

  // The same inequality evaluated directly from G values, with a small slack.
  bool audit(const Matrix& xt, double c) const {
    const double g_new = smooth_value(xt, p_);
    const double g_y = smooth_value(y_, p_);
    const auto xv = xt.flat();
    const auto yv = y_.flat();
    const auto gv = g_.flat();
    double lin = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) {
      const double d = xv[i] - yv[i];
      lin += d * gv[i];
      d2 += d * d;
    }
    const double rhs = g_y + lin + d2 / (2.0 * c);
    const double slack = 1e-9 * std::max({std::abs(g_y), std::abs(lin), d2 / (2.0 * c), 1e-300});
    return g_new <= rhs + slack;
  }

  // Accepts X~; returns false when the run diverged.
  bool accept(SvtResult&& r, double s, double c, std::size_t iter) {
    const double f = smooth_value(r.x, p_) + p_.lambda_reg() * r.nuclear_norm;
    tr_.steps.push_back(s);
    tr_.thresholds.push_back(p_.lambda_reg() * c);
    tr_.ranks.push_back(r.rank);
    if (!std::isfinite(f) || f > kDivergenceFactor * f0_) {
      mark_diverged(iter, std::isfinite(f) ? "objective exceeded 1e3 F(X0)" : "objective is not finite");
      return false;
    }
    tr_.values.push_back(f);
    std::swap(xpp_, xp_);
    std::swap(xp_, x_);
    x_ = std::move(r.x);
    if (opt_.keep_iterates) tr_.iterates.push_back(x_);
    ++k_;
    if (a_ == Algorithm::fista) {
      t_prev_ = t_;
      t_ = fista_t_next(t_);
    }
    return true;
  }

  void mark_diverged(std::size_t iter, const std::string& why) {
    tr_.outcome = Outcome::diverged;
    tr_.diverged_at = iter;
    tr_.detail = why + " at iteration " + std::to_string(iter);
  }

  McTrajectory finish() {
    tr_.x_final = x_;
    tr_.svt_full = ws_.full_calls();
    tr_.svt_partial = ws_.partial_calls();
    return std::move(tr_);
  }

  McTrajectory& trajectory() { return tr_; }

 private:
  Algorithm a_;
  const CompletionProblem& p_;
  RunOptions opt_;
  SvtWorkspace ws_;
  Matrix x_, xp_, xpp_;
  Matrix y_, z_, g_, w_;
  long k_ = 1;
  double t_prev_ = 1.0;
  double t_ = 1.0;
  double f0_ = 0.0;
  McTrajectory tr_;
};

}  // namespace

McTrajectory run(Algorithm a, const CompletionProblem& p, double s, std::size_t iters, const RunOptions& opt) {
  if (!(s > 0.0) || !std::isfinite(s)) throw PreconditionError("matrix completion: step size must be positive");
  ProxRunner r(a, p, opt);
  for (std::size_t it = 0; it < iters; ++it) {
    r.prepare();
    const double c = r.scale(s);
    std::optional<SvtResult> cand;
    try {
      cand = r.candidate(c);
    } catch (const NumericalFailure& e) {
      r.mark_diverged(it, std::string("SVD failed: ") + e.what());
      break;
    }
    if (!cand) {
      r.mark_diverged(it, "non-finite prox input");
      break;
    }
    if (!r.accept(std::move(*cand), s, c, it)) break;
  }
  return r.finish();
}

McTrajectory fista_run(const CompletionProblem& p, double s, std::size_t iters, const RunOptions& opt) {
  return run(Algorithm::fista, p, s, iters, opt);
}

McTrajectory apg_run(const CompletionProblem& p, double s, std::size_t iters, const RunOptions& opt) {
  return run(Algorithm::apg, p, s, iters, opt);
}

McTrajectory sfista_run(const CompletionProblem& p, double s, std::size_t iters, const RunOptions& opt) {
  return run(Algorithm::sfista, p, s, iters, opt);
}

McTrajectory backtracking_run(Algorithm a, const CompletionProblem& p, const BacktrackConfig& cfg,
                              std::size_t iters, const RunOptions& opt) {
  if (!(cfg.beta > 0.0) || !(cfg.beta < 1.0)) throw PreconditionError("backtracking: beta must lie in (0, 1)");
  if (!(cfg.s_init > 0.0) || !std::isfinite(cfg.s_init))
    throw PreconditionError("backtracking: s_init must be positive");
  ProxRunner r(a, p, opt);
  double s = cfg.s_init;
  for (std::size_t it = 0; it < iters; ++it) {
    r.prepare();
    std::size_t reductions = 0;
    std::optional<SvtResult> cand;
    for (;;) {
      const double c = r.scale(s);
      try {
        cand = r.candidate(c);
      } catch (const NumericalFailure&) {
        cand.reset();
      }
      if (cand && r.sufficient_decrease(cand->x, c)) break;
      if (reductions == cfg.max_halvings)
        throw StallError("backtracking: more than " + std::to_string(cfg.max_halvings) +
                             " step reductions at iteration " + std::to_string(it),
                         it);
      s *= cfg.beta;
      ++reductions;
    }
    McTrajectory& tr = r.trajectory();
    tr.reductions.push_back(reductions);
    tr.reduction_count += reductions;
    const double c = r.scale(s);
    if (!r.audit(cand->x, c)) ++tr.audit_violations;
    if (!r.accept(std::move(*cand), s, c, it)) break;
  }
  return r.finish();
}

}  // namespace sagopt::mc

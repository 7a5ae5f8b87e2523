#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sagopt/bench/config.hpp"
#include "sagopt/bench/data.hpp"
#include "sagopt/bench/result_table.hpp"
#include "sagopt/completion.hpp"

namespace sagopt::bench {

// Every experiment reads its parameters from a flat Config (missing keys take
// the documented defaults), records config_hash, seed and operation as table
// metadata, and reports sub-operation failures in a per-row status column
// instead of throwing. Wall time is never written to the table.

// Keys: scheme (nag|sag|both) objective (quadratic|logistic) t h_max ladder_len.
// Columns: scheme,t,h,L,slope,r2,status (one row per ladder rung).
ResultTable order_experiment(const Config& cfg);

// Keys: scheme z_max grid tol params ("k,m1,m2;k,m1,m2").
// Columns: scheme,z,max_root_modulus,stable_flag,kind,z_lo,z_hi. kind is
// "scan" for grid rows, "invariance" for parameter triples and "analytic" /
// "scanned" for the per-scheme summaries, which come last.
ResultTable stability_experiment(const Config& cfg);

// Keys: scheme mu s_grid iters burn_in.
// Columns: scheme,mu,s,z,outcome,reference_magnitude,max_after,iterations,non_finite.
ResultTable probe_experiment(const Config& cfg);

// Matrix-completion tables share the columns
//   method,kind,iter,s,value,rank,reductions,status
// kind: "iterate" (one per iteration of a run), "point" (one scan point),
// "boundary" (largest feasible step of a scan), "total" (backtracking sum).

// Keys: rows cols rank fraction lambda seed method (fista|apg|sfista|all) s iters.
ResultTable matcomp_fixed_experiment(const Config& cfg);
// Keys as above plus s_grid (ascending); scans with feasible_step_scan.
ResultTable feasible_experiment(const Config& cfg);
// Keys as above plus beta s_init max_halvings.
ResultTable backtrack_experiment(const Config& cfg);

// Keys: n_max. Columns: check,n,value,detail,status.
ResultTable verify_experiment(const Config& cfg);

DeskSpec desk_spec(const Config& cfg);
std::vector<mc::Algorithm> algorithms_from(const Config& cfg);

struct ScanPoint {
  double s = 0.0;
  bool feasible = false;
  double final_value = 0.0;
  std::size_t iterations = 0;
  std::string detail;
};

struct ScanResult {
  // 0 when the first grid point already diverges.
  double max_feasible = 0.0;
  // Evaluated points in grid order, ending at the first diverged one.
  std::vector<ScanPoint> points;
};

// Runs the grid in ascending order, `threads` points at a time, and stops at
// the first diverged point; no feasible point above it is reported. Requires
// a strictly ascending, positive grid.
ScanResult feasible_step_scan(mc::Algorithm method, const mc::CompletionProblem& p, std::span<const double> s_grid,
                              std::size_t iters, std::size_t threads = 0);

// Grid start, start + step, ..., up to stop (inclusive within 1e-9 step).
std::vector<double> linear_grid(double start, double stop, double step);

// True when every run of the experiment diverged (metadata outcome=diverged).
bool divergence_only(const ResultTable& t);

}  // namespace sagopt::bench

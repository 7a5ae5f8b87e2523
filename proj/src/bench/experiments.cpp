#include "sagopt/bench/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>

#include "sagopt/bench/parallel.hpp"
#include "sagopt/bench/rng.hpp"
#include "sagopt/errors.hpp"
#include "sagopt/lemma.hpp"
#include "sagopt/objective.hpp"
#include "sagopt/ode.hpp"
#include "sagopt/scheme.hpp"
#include "sagopt/stability.hpp"

namespace sagopt::bench {

namespace {

using I = std::int64_t;

void stamp(ResultTable& t, const Config& cfg, const std::string& operation, const std::string& default_seed = "0") {
  t.set_meta("config_hash", cfg.hash_hex());
  t.set_meta("seed", cfg.get("seed", default_seed));
  t.set_meta("operation", operation);
}

std::vector<Scheme> schemes_from(const Config& cfg) {
  const std::string s = cfg.get("scheme", "both");
  if (s == "both") return {Scheme::nag, Scheme::sag};
  if (auto p = parse_scheme(s)) return {*p};
  throw PreconditionError("scheme must be nag, sag or both, got '" + s + "'");
}

std::size_t positive_size(const Config& cfg, const std::string& key, std::int64_t fallback) {
  const std::int64_t v = cfg.get_int(key, fallback);
  if (v <= 0) throw PreconditionError("config: '" + key + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

void set_outcome(ResultTable& t, std::size_t runs, std::size_t diverged) {
  t.set_meta("outcome", runs > 0 && diverged == runs ? "diverged" : "ok");
}

}  // namespace

std::vector<double> linear_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw PreconditionError("linear_grid: need step > 0 and stop >= start");
  std::vector<double> g;
  for (std::size_t j = 0;; ++j) {
    const double v = start + static_cast<double>(j) * step;
    if (v > stop + 1e-9 * step) break;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    g.push_back(std::strtod(buf, nullptr));
  }
  return g;
}

bool divergence_only(const ResultTable& t) { return t.meta("outcome") == "diverged"; }

// ---------------------------------------------------------------- order

ResultTable order_experiment(const Config& cfg) {
  ResultTable t({"scheme", "t", "h", "L", "slope", "r2", "status"});
  stamp(t, cfg, "order");
  const double tt = cfg.get_double("t", 2.0);
  const double h_max = cfg.get_double("h_max", 0.04);
  const std::size_t len = positive_size(cfg, "ladder_len", 6);
  const std::string obj = cfg.get("objective", "quadratic");

  std::unique_ptr<Objective> f;
  Vec x0;
  if (obj == "quadratic") {
    f = std::make_unique<Quadratic>(Quadratic::isotropic(1.0, 1));
    x0 = {1.0};
  } else if (obj == "logistic") {
    f = std::make_unique<Logistic>(Logistic::demo());
    x0 = Vec(f->dim(), 1.0);
  } else {
    throw PreconditionError("objective must be quadratic or logistic, got '" + obj + "'");
  }
  t.set_meta("objective", obj);

  const std::vector<double> ladder = ode::dyadic_ladder(h_max, len);
  std::optional<ode::OdeSolution> sol;
  std::string solve_error;
  try {
    sol.emplace(ode::solve_limit_ode(*f, x0, tt + h_max, ladder.back() / 20.0));
  } catch (const std::exception& e) {
    solve_error = e.what();
  }
  const double nan = std::nan("");
  for (Scheme sc : schemes_from(cfg)) {
    const std::string name(to_string(sc));
    if (!sol) {
      for (double h : ladder) t.add_row({name, tt, h, nan, nan, nan, "error: " + solve_error});
      continue;
    }
    try {
      const ode::TruncationReport rep = ode::estimate_order(sc, *sol, tt, ladder);
      const std::string status = rep.exact ? "exact" : (rep.success ? "ok" : "poor_fit");
      for (std::size_t j = 0; j < ladder.size(); ++j)
        t.add_row({name, tt, ladder[j], rep.l_values[j], rep.slope, rep.r_squared, status});
    } catch (const std::exception& e) {
      for (double h : ladder) t.add_row({name, tt, h, nan, nan, nan, std::string("error: ") + e.what()});
    }
  }
  set_outcome(t, 0, 0);
  return t;
}

// ---------------------------------------------------------------- stability

ResultTable stability_experiment(const Config& cfg) {
  ResultTable t({"scheme", "z", "max_root_modulus", "stable_flag", "kind", "z_lo", "z_hi"});
  stamp(t, cfg, "stability");
  const double z_max = cfg.get_double("z_max", 6.0);
  const double grid = cfg.get_double("grid", 1e-3);
  const double tol = cfg.get_double("tol", 1e-9);
  const std::string empty;

  std::vector<stability::RegionScan> scans;
  for (Scheme sc : schemes_from(cfg)) {
    scans.push_back(stability::stable_region(sc, z_max, grid, tol));
    for (const auto& r : scans.back().rows)
      t.add_row({scans.back().scanned.scheme, r.z, r.max_modulus, I{r.stable}, "scan", empty, empty});
  }

  const std::string params = cfg.get("params", "");
  if (!params.empty()) {
    std::vector<std::array<double, 3>> triples;
    std::istringstream in(params);
    std::string item;
    while (std::getline(in, item, ';')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      Config tmp;
      tmp.set("p", item);
      const auto v = tmp.get_doubles("p", {});
      if (v.size() != 3) throw PreconditionError("params: each triple needs k,m1,m2, got '" + item + "'");
      triples.push_back({v[0], v[1], v[2]});
    }
    for (const auto& tr : triples) {
      const std::array<double, 3> one[] = {tr};
      try {
        const auto rep = stability::region_invariance_check(one, z_max, grid, tol);
        const auto& row = rep.rows.front();
        t.add_row({row.region.scheme, empty, empty, I{row.matches}, "invariance", row.region.z_lo, row.region.z_hi});
      } catch (const std::exception& e) {
        std::ostringstream label;
        label << "k=" << tr[0] << ",m1=" << tr[1] << ",m2=" << tr[2];
        t.add_row({label.str(), empty, empty, I{0}, std::string("error: ") + e.what(), empty, empty});
      }
    }
  }
  for (const auto& s : scans) {
    t.add_row({s.analytic.scheme, empty, empty, I{1}, "analytic", s.analytic.z_lo, s.analytic.z_hi});
    t.add_row({s.scanned.scheme, empty, empty, I{1}, "scanned", s.scanned.z_lo, s.scanned.z_hi});
  }
  set_outcome(t, 0, 0);
  return t;
}

// ---------------------------------------------------------------- probe

ResultTable probe_experiment(const Config& cfg) {
  ResultTable t({"scheme", "mu", "s", "z", "outcome", "reference_magnitude", "max_after", "iterations", "non_finite"});
  stamp(t, cfg, "probe");
  const double mu = cfg.get_double("mu", 1.0);
  const std::vector<double> s_grid = cfg.get_doubles("s_grid", {0.5, 1.0, 1.5, 2.0, 3.0, 3.5});
  const std::size_t iters = positive_size(cfg, "iters", 10000);
  const std::size_t burn_in = positive_size(cfg, "burn_in", 1000);
  std::size_t runs = 0, diverged = 0;
  const double nan = std::nan("");
  for (Scheme sc : schemes_from(cfg)) {
    for (double s : s_grid) {
      ++runs;
      try {
        const auto r = stability::empirical_probe(sc, mu, s, iters, burn_in);
        const bool div = r.outcome == stability::ProbeOutcome::diverged;
        diverged += div;
        t.add_row({std::string(to_string(sc)), mu, s, mu * s, div ? "diverged" : "bounded", r.reference_magnitude,
                   r.max_after, static_cast<I>(r.iterations), I{r.non_finite}});
      } catch (const std::exception& e) {
        t.add_row({std::string(to_string(sc)), mu, s, mu * s, std::string("error: ") + e.what(), nan, nan, I{0}, I{0}});
      }
    }
  }
  set_outcome(t, runs, diverged);
  return t;
}

// ---------------------------------------------------------------- matrix completion

DeskSpec desk_spec(const Config& cfg) {
  DeskSpec d;
  d.rows = positive_size(cfg, "rows", 200);
  d.cols = positive_size(cfg, "cols", 200);
  d.rank = positive_size(cfg, "rank", 4);
  d.fraction = cfg.get_double("fraction", 0.3);
  d.lambda = cfg.get_double("lambda", 1.0);
  d.seed = cfg.get_u64("seed", d.seed);
  return d;
}

std::vector<mc::Algorithm> algorithms_from(const Config& cfg) {
  const std::string m = cfg.get("method", "all");
  if (m == "all") return {mc::Algorithm::fista, mc::Algorithm::apg, mc::Algorithm::sfista};
  if (auto a = mc::parse_algorithm(m)) return {*a};
  throw PreconditionError("method must be fista, apg, sfista or all, got '" + m + "'");
}

namespace {

const std::vector<std::string> kMcColumns = {"method", "kind", "iter", "s", "value", "rank", "reductions", "status"};

void add_run_rows(ResultTable& t, const mc::McTrajectory& tr, bool backtracking) {
  const std::string name(mc::to_string(tr.algorithm));
  for (std::size_t k = 0; k < tr.values.size(); ++k) {
    const double s = k == 0 ? std::nan("") : tr.steps[k - 1];
    const I rank = k == 0 ? I{-1} : static_cast<I>(tr.ranks[k - 1]);
    const I red = backtracking && k > 0 ? static_cast<I>(tr.reductions[k - 1]) : I{0};
    t.add_row({name, "iterate", static_cast<I>(k), s, tr.values[k], rank, red, "ok"});
  }
  if (tr.outcome == mc::Outcome::diverged) {
    const std::size_t k = tr.values.size();
    t.add_row({name, "iterate", static_cast<I>(k), tr.steps.empty() ? std::nan("") : tr.steps.back(), std::nan(""),
               I{-1}, I{0}, "diverged: " + tr.detail});
  }
}

}  // namespace

ResultTable matcomp_fixed_experiment(const Config& cfg) {
  ResultTable t(kMcColumns);
  stamp(t, cfg, "matcomp_fixed", std::to_string(DeskSpec{}.seed));
  const mc::CompletionProblem p = make_problem(desk_spec(cfg));
  const double s = cfg.get_double("s", 0.5);
  const std::size_t iters = positive_size(cfg, "iters", 200);
  std::size_t runs = 0, diverged = 0;
  for (mc::Algorithm a : algorithms_from(cfg)) {
    ++runs;
    try {
      const auto tr = mc::run(a, p, s, iters);
      diverged += tr.outcome == mc::Outcome::diverged;
      add_run_rows(t, tr, false);
    } catch (const std::exception& e) {
      t.add_row({std::string(mc::to_string(a)), "iterate", I{0}, s, std::nan(""), I{-1}, I{0},
                 std::string("error: ") + e.what()});
    }
  }
  set_outcome(t, runs, diverged);
  return t;
}

ScanResult feasible_step_scan(mc::Algorithm method, const mc::CompletionProblem& p, std::span<const double> s_grid,
                              std::size_t iters, std::size_t threads) {
  if (s_grid.empty()) throw PreconditionError("feasible_step_scan: empty grid");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (!(s_grid[i] > 0.0)) throw PreconditionError("feasible_step_scan: grid values must be positive", i);
    if (i > 0 && !(s_grid[i] > s_grid[i - 1]))
      throw PreconditionError("feasible_step_scan: grid must be strictly ascending", i);
  }
  if (threads == 0) threads = thread_count();
  mc::RunOptions opt;
  opt.initial_value = mc::objective_value(p.m_obs(), p);
  ScanResult res;
  for (std::size_t start = 0; start < s_grid.size(); start += threads) {
    const std::size_t n = std::min(threads, s_grid.size() - start);
    std::vector<ScanPoint> batch(n);
    parallel_for(n, threads, [&](std::size_t i) {
      const double s = s_grid[start + i];
      const mc::McTrajectory tr = mc::run(method, p, s, iters, opt);
      ScanPoint& pt = batch[i];
      pt.s = s;
      pt.feasible = tr.outcome == mc::Outcome::completed;
      pt.final_value = tr.values.back();
      pt.iterations = tr.values.size() - 1;
      pt.detail = tr.detail;
    });
    for (const ScanPoint& pt : batch) {
      res.points.push_back(pt);
      if (!pt.feasible) return res;
      res.max_feasible = pt.s;
    }
  }
  return res;
}

ResultTable feasible_experiment(const Config& cfg) {
  ResultTable t(kMcColumns);
  stamp(t, cfg, "matcomp_scan", std::to_string(DeskSpec{}.seed));
  const mc::CompletionProblem p = make_problem(desk_spec(cfg));
  const std::vector<double> grid = cfg.get_doubles("s_grid", linear_grid(0.1, 6.0, 0.1));
  const std::size_t iters = positive_size(cfg, "iters", 200);
  std::size_t runs = 0, diverged = 0;
  for (mc::Algorithm a : algorithms_from(cfg)) {
    const std::string name(mc::to_string(a));
    try {
      const ScanResult r = feasible_step_scan(a, p, grid, iters, thread_count());
      for (const ScanPoint& pt : r.points) {
        ++runs;
        diverged += !pt.feasible;
        t.add_row({name, "point", static_cast<I>(pt.iterations), pt.s, pt.final_value, I{-1}, I{0},
                   pt.feasible ? std::string("feasible") : "diverged: " + pt.detail});
      }
      t.add_row({name, "boundary", static_cast<I>(iters), r.max_feasible, std::nan(""), I{-1}, I{0}, "ok"});
    } catch (const std::exception& e) {
      t.add_row({name, "boundary", I{0}, std::nan(""), std::nan(""), I{-1}, I{0}, std::string("error: ") + e.what()});
    }
  }
  set_outcome(t, runs, diverged);
  return t;
}

ResultTable backtrack_experiment(const Config& cfg) {
  ResultTable t(kMcColumns);
  stamp(t, cfg, "matcomp_backtrack", std::to_string(DeskSpec{}.seed));
  const mc::CompletionProblem p = make_problem(desk_spec(cfg));
  mc::BacktrackConfig bc;
  bc.beta = cfg.get_double("beta", 0.8);
  bc.s_init = cfg.get_double("s_init", 6.0);
  bc.max_halvings = positive_size(cfg, "max_halvings", 60);
  const std::size_t iters = positive_size(cfg, "iters", 200);
  std::size_t runs = 0, diverged = 0;
  for (mc::Algorithm a : algorithms_from(cfg)) {
    const std::string name(mc::to_string(a));
    ++runs;
    try {
      const auto tr = mc::backtracking_run(a, p, bc, iters);
      diverged += tr.outcome == mc::Outcome::diverged;
      add_run_rows(t, tr, true);
      const std::string audit =
          tr.audit_violations == 0 ? std::string("ok") : "audit: " + std::to_string(tr.audit_violations) + " violations";
      t.add_row({name, "total", static_cast<I>(tr.values.size() - 1), tr.steps.empty() ? bc.s_init : tr.steps.back(),
                 tr.values.back(), I{-1}, static_cast<I>(tr.reduction_count), audit});
    } catch (const StallError& e) {
      ++diverged;
      t.add_row({name, "total", static_cast<I>(e.iteration()), std::nan(""), std::nan(""), I{-1}, I{-1},
                 std::string("stalled: ") + e.what()});
    } catch (const std::exception& e) {
      t.add_row({name, "total", I{0}, std::nan(""), std::nan(""), I{-1}, I{-1}, std::string("error: ") + e.what()});
    }
  }
  set_outcome(t, runs, diverged);
  return t;
}

// ---------------------------------------------------------------- verify

ResultTable verify_experiment(const Config& cfg) {
  ResultTable t({"check", "n", "value", "detail", "status"});
  stamp(t, cfg, "verify");
  const auto n_max = static_cast<long>(positive_size(cfg, "n_max", 50));
  if (n_max < 4) throw PreconditionError("n_max must be >= 4");
  std::size_t failures = 0;
  const auto verdict = [&](bool ok) {
    failures += !ok;
    return std::string(ok ? "pass" : "fail");
  };

  const ode::Mat2 f_nm1{{{1.0, 0.0}, {1.0, 0.0}}};
  const ode::Mat2 f_n{{{0.5, 0.5}, {0.5, 0.5}}};
  const ode::Mat2 f_np1{{{0.0, 1.0}, {0.0, 1.0}}};
  for (long n = 2; n <= n_max; ++n) {
    const auto lm = ode::lemma_matrices(n);
    const auto idx = [](long l) { return static_cast<std::size_t>(l); };
    const double e1 = ode::mat2_max_abs_diff(lm.D[idx(n - 1)], f_nm1);
    const double e2 = ode::mat2_max_abs_diff(lm.D[idx(n)], f_n);
    const double e3 = ode::mat2_max_abs_diff(lm.D[idx(n + 1)], f_np1);
    t.add_row({"D_n_n-1", I{n}, e1, "[[1,0],[1,0]]", verdict(e1 <= 1e-12)});
    t.add_row({"D_n_n", I{n}, e2, "[[1/2,1/2],[1/2,1/2]]", verdict(e2 <= 1e-12)});
    t.add_row({"D_n_n+1", I{n}, e3, "[[0,1],[0,1]]", verdict(e3 <= 1e-12)});
    const double m3 = lm.norms[idx(n + 1)];
    t.add_row({"norm_D_n_n+1", I{n}, m3, "sqrt(2)", verdict(std::abs(m3 - std::sqrt(2.0)) <= 1e-12)});
  }
  const auto rep = ode::verify_lemma_bounds(n_max);
  t.add_row({"sup_ratio_max", I{n_max}, rep.M, "max_n sup_l ||D_nl|| / n", verdict(std::isfinite(rep.M))});
  t.add_row({"recursion", I{n_max}, rep.recursion_error, "D_n,l+1 = D_nl C_n-l", verdict(rep.recursion_error <= 1e-12)});
  t.add_row({"similarity_bound", I{n_max}, rep.tilde_ratio, "||P^-1 D P|| / (n+2)", verdict(rep.tilde_ratio <= 1.0 + 1e-12)});

  // Exact coefficient identity for (k, m1, m2) = (1/2, 0, 3).
  const auto coeffs = scheme_coefficients_exact(Rational(1, 2), Rational(0), Rational(3));
  const long n_identity = std::max<long>(n_max, 100);
  bool all_equal = true;
  for (long n = 2; n <= n_identity; ++n) {
    const auto w = normalized_recurrence(coeffs, n);
    const auto ref = sag_closed_form_weights(n);
    const bool eq = w.x == ref.x && w.grad == ref.grad;
    all_equal = all_equal && eq;
    if (!eq) t.add_row({"coefficient_identity", I{n}, std::nan(""), w.x[0].str(), verdict(false)});
  }
  t.add_row({"coefficient_identity", I{n_identity}, all_equal ? 1.0 : 0.0, "n = 2.." + std::to_string(n_identity),
             verdict(all_equal)});

  // Gronwall on sequences built to satisfy the hypothesis.
  SplitMix64 rng(cfg.get_u64("seed", 1));
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = 0.01 + 0.5 * rng.uniform();
    const double beta = 0.1 + 2.0 * rng.uniform();
    Vec eta{rng.uniform()};
    double partial = eta[0];
    for (int n = 1; n < 60; ++n) {
      eta.push_back(rng.uniform() * (beta + alpha * partial));
      partial += eta.back();
    }
    const bool ok = ode::check_discrete_gronwall(eta, alpha, beta);
    t.add_row({"gronwall", I{trial}, alpha, "beta=" + format_double(beta), verdict(ok)});
  }
  t.set_meta("outcome", failures == 0 ? "ok" : "failed");
  return t;
}

}  // namespace sagopt::bench

// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria (0 when all pass).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "sagopt/bench/data.hpp"
#include "sagopt/bench/experiments.hpp"
#include "sagopt/bench/rng.hpp"
#include "sagopt/completion.hpp"
#include "sagopt/errors.hpp"
#include "sagopt/lemma.hpp"
#include "sagopt/objective.hpp"
#include "sagopt/ode.hpp"
#include "sagopt/optimizer.hpp"
#include "sagopt/rational.hpp"
#include "sagopt/scheme.hpp"
#include "sagopt/stability.hpp"
#include "sagopt/steppers.hpp"
#include "sagopt/svd.hpp"

using namespace sagopt;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Matrix random_matrix(bench::SplitMix64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.flat()) v = scale * rng.gaussian();
  return m;
}

// 1. Truncation orders at t = 2 on x^2/2 with h = 0.04 * 2^-j, j = 0..5.
Verdict truncation_orders() {
  const Quadratic f = Quadratic::isotropic(1.0);
  const Vec x0{1.0};
  const auto ladder = ode::dyadic_ladder(0.04, 6);
  const auto nag = ode::estimate_order(Scheme::nag, f, x0, 2.0, ladder);
  const auto sag = ode::estimate_order(Scheme::sag, f, x0, 2.0, ladder);
  Verdict v;
  v.pass = nag.slope >= 2.7 && nag.slope <= 3.3 && nag.r_squared >= 0.99 && sag.slope >= 3.6 &&
           sag.slope <= 4.4 && sag.r_squared >= 0.99;
  v.detail = fmt2("nag slope %.4f (R2 %.6f), ", nag.slope, nag.r_squared) +
             fmt2("sag slope %.4f (R2 %.6f)", sag.slope, sag.r_squared);
  return v;
}

// 2. gap(h) / (h ln(1/h)) within a factor 3, gap strictly decreasing.
Verdict convergence_rate() {
  const Quadratic f = Quadratic::isotropic(1.0);
  const Vec x0{1.0};
  const auto ladder = ode::dyadic_ladder(0.02, 5);
  const ode::OdeSolution sol = ode::solve_limit_ode(f, x0, 2.5, ladder.back() / 20.0);
  std::vector<double> gaps, ratios;
  for (double h : ladder) {
    const double g = ode::convergence_gap(Scheme::nag, sol, 2.0, h);
    gaps.push_back(g);
    ratios.push_back(g / (h * std::log(1.0 / h)));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) decreasing = decreasing && gaps[i] < gaps[i - 1];
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  Verdict v;
  v.pass = decreasing && lo > 0.0 && hi / lo < 3.0;
  v.detail = fmt2("ratio band %.4g..%.4g", lo, hi) + fmt(", spread %.3f", hi / lo) +
             (decreasing ? ", gaps decreasing" : ", gaps NOT decreasing");
  return v;
}

// 3. Analytic and scanned regions, plus the parameter-invariance check.
Verdict stability_regions() {
  const double grid = 1e-3;
  const auto nag = stability::stable_region(Scheme::nag, 3.0, grid);
  const auto sag = stability::stable_region(Scheme::sag, 6.0, grid);
  const auto near = [&](double a, double b) { return std::abs(a - b) <= grid + 1e-12; };
  bool ok = near(nag.analytic.z_hi, 4.0 / 3.0) && near(nag.scanned.z_hi, 4.0 / 3.0) &&
            near(sag.analytic.z_hi, 4.0) && near(sag.scanned.z_hi, 4.0) && near(nag.scanned.z_lo, 0.0) &&
            near(sag.scanned.z_lo, 0.0);
  ok = ok && nag.analytic.exact_hi == Rational(4, 3) && sag.analytic.exact_hi == Rational(4);
  const std::vector<std::array<double, 3>> triples{
      {0.5, 0.0, 3.0}, {0.0, 0.0, 0.0}, {1.0, 2.0, -1.0}, {0.25, 1.0, 1.0}, {2.0, -1.0, 0.5}, {0.75, 0.5, 2.0}};
  const auto inv = stability::region_invariance_check(triples, 6.0, grid);
  std::size_t matched = 0;
  for (const auto& row : inv.rows) matched += row.matches;
  ok = ok && inv.all_match && matched >= 5;
  Verdict v;
  v.pass = ok;
  v.detail = fmt2("nag scanned [0, %.4f], sag scanned [0, %.4f]", nag.scanned.z_hi, sag.scanned.z_hi) +
             ", invariance " + std::to_string(matched) + "/" + std::to_string(inv.rows.size());
  return v;
}

// 4. NAG at s = 1.5 diverges; SAG at s = 3.5 stays bounded (10^4 iterations).
Verdict probe_separation() {
  const auto nag = stability::empirical_probe(Scheme::nag, 1.0, 1.5, 10000, 100);
  const auto sag = stability::empirical_probe(Scheme::sag, 1.0, 3.5, 10000, 100);
  const double growth = sag.reference_magnitude > 0.0 ? sag.max_after / sag.reference_magnitude
                                                      : std::numeric_limits<double>::infinity();
  Verdict v;
  v.pass = nag.outcome == stability::ProbeOutcome::diverged && sag.outcome == stability::ProbeOutcome::bounded &&
           growth < 1e6;
  v.detail = std::string("nag s=1.5 ") + (nag.outcome == stability::ProbeOutcome::diverged ? "diverged" : "bounded") +
             ", sag s=3.5 " + (sag.outcome == stability::ProbeOutcome::bounded ? "bounded" : "diverged") +
             fmt(" (growth %.3g)", growth);
  return v;
}

// 5. D-matrix closed forms for 2 <= n <= 50, ||D_{n,n+1}|| = sqrt 2, bounded sup ratio.
Verdict lemma_matrices() {
  const ode::Mat2 ones_left{{{1.0, 0.0}, {1.0, 0.0}}};
  const ode::Mat2 halves{{{0.5, 0.5}, {0.5, 0.5}}};
  const ode::Mat2 ones_right{{{0.0, 1.0}, {0.0, 1.0}}};
  double err = 0.0, norm_err = 0.0, ratio_max = 0.0;
  for (long n = 2; n <= 50; ++n) {
    const auto lm = ode::lemma_matrices(n);
    err = std::max({err, ode::mat2_max_abs_diff(lm.D[n - 1], ones_left), ode::mat2_max_abs_diff(lm.D[n], halves),
                    ode::mat2_max_abs_diff(lm.D[n + 1], ones_right)});
    norm_err = std::max(norm_err, std::abs(lm.norms[n + 1] - std::sqrt(2.0)));
    ratio_max = std::max(ratio_max, *std::max_element(lm.norms.begin(), lm.norms.end()) / static_cast<double>(n));
  }
  const auto rep = ode::verify_lemma_bounds(50);
  Verdict v;
  v.pass = err <= 1e-12 && norm_err <= 1e-12 && std::isfinite(ratio_max) && rep.ok && rep.m3_is_sqrt2 &&
           std::abs(rep.M - ratio_max) <= 1e-12;
  v.detail = fmt2("closed-form error %.2e, sup ratio M = %.6f", err, ratio_max) + fmt(", |M3 - sqrt2| = %.1e", norm_err);
  return v;
}

// 6. Exact rational coefficients of the (1/2, 0, 3) scheme for 2 <= n <= 100.
Verdict coefficient_identity() {
  const auto c = scheme_coefficients_exact(Rational(1, 2), Rational(0), Rational(3));
  long first_bad = 0;
  for (long n = 2; n <= 100 && first_bad == 0; ++n) {
    const std::int64_t k = n;
    const auto w = normalized_recurrence(c, n);
    const bool same = w.x[0] == Rational(10 * k * k + 9 * k + 6, 4 * k * k + 8 * k) &&
                      w.x[1] == -Rational(4 * k * k + 3, 2 * k * k + 4 * k) &&
                      w.x[2] == Rational(2 * k - 1, 4 * k + 8) && w.grad == -Rational(k, 2 * k + 4);
    if (!same) first_bad = n;
  }
  Verdict v;
  v.pass = first_bad == 0;
  v.detail = first_bad == 0 ? "99 indices match exactly" : "mismatch at n = " + std::to_string(first_bad);
  return v;
}

// 7. Feasible-step ratio on the desk problem, grid 0.1, 200 iterations.
Verdict feasible_ratio() {
  const mc::CompletionProblem p = bench::make_problem(bench::DeskSpec{});
  const std::vector<double> grid = bench::linear_grid(0.1, 6.0, 0.1);
  const double fista = bench::feasible_step_scan(mc::Algorithm::fista, p, grid, 200).max_feasible;
  const double apg = bench::feasible_step_scan(mc::Algorithm::apg, p, grid, 200).max_feasible;
  const double sfista = bench::feasible_step_scan(mc::Algorithm::sfista, p, grid, 200).max_feasible;
  Verdict v;
  v.pass = fista > 0.0 && sfista >= 2.0 * fista && std::abs(fista - apg) <= 0.1 + 1e-9;
  v.detail = fmt2("fista %.1f, apg %.1f", fista, apg) + fmt2(", sfista %.1f (ratio %.2f)", sfista, sfista / fista);
  return v;
}

// 8. Backtracking reductions on the desk problem, beta 0.8, s_init above both boundaries.
Verdict backtracking_counts() {
  const mc::CompletionProblem p = bench::make_problem(bench::DeskSpec{});
  mc::BacktrackConfig cfg;
  cfg.beta = 0.8;
  cfg.s_init = 6.0;
  const auto fista = mc::backtracking_run(mc::Algorithm::fista, p, cfg, 200);
  const auto sfista = mc::backtracking_run(mc::Algorithm::sfista, p, cfg, 200);
  Verdict v;
  v.pass = fista.outcome == mc::Outcome::completed && sfista.outcome == mc::Outcome::completed &&
           sfista.reduction_count <= fista.reduction_count && fista.audit_violations == 0 &&
           sfista.audit_violations == 0;
  v.detail = "reductions sfista " + std::to_string(sfista.reduction_count) + ", fista " +
             std::to_string(fista.reduction_count) + ", audit violations " +
             std::to_string(fista.audit_violations + sfista.audit_violations);
  return v;
}

// 9. lambda = 0 and full observation: proximal runs equal the smooth schemes.
Verdict reduction_equivalence() {
  const std::size_t rows = 6, cols = 5, iters = 100;
  bench::SplitMix64 rng(99);
  const Matrix m = random_matrix(rng, rows, cols);
  const Matrix x0 = random_matrix(rng, rows, cols);
  std::vector<mc::Entry> mask;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) mask.emplace_back(i, j);
  const auto p = mc::CompletionProblem::from_matrix(m, mask, 0.0);
  const auto f = std::make_shared<Quadratic>(Quadratic::isotropic(1.0, rows * cols));
  const Shifted g(f, m.values());
  const double s = 0.4;

  mc::RunOptions opt;
  opt.keep_iterates = true;
  opt.x0 = x0;
  const std::array<std::pair<mc::Algorithm, Method>, 3> pairs{
      {{mc::Algorithm::fista, Method::nag_t}, {mc::Algorithm::apg, Method::nag}, {mc::Algorithm::sfista, Method::sag}}};
  double worst = 0.0;
  bool complete = true;
  for (const auto& [alg, method] : pairs) {
    const auto prox = mc::run(alg, p, s, iters, opt);
    const auto smooth = run_optimizer(method, g, x0.values(), s, iters, 0.0);
    complete = complete && prox.iterates.size() == iters + 1 && smooth.iterates.size() == iters + 1;
    for (std::size_t k = 0; k < std::min(prox.iterates.size(), smooth.iterates.size()); ++k) {
      const auto a = prox.iterates[k].flat();
      const auto& b = smooth.iterates[k];
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
  }
  Verdict v;
  v.pass = complete && worst <= 1e-10;
  v.detail = fmt("max entrywise deviation %.2e over 100 iterations", worst);
  return v;
}

// 10. Property suites: SVT nonexpansive and prox-optimal, SVD invariants,
// t-sequence growth, discrete Gronwall.
Verdict property_suites() {
  std::size_t svt_fail = 0, svd_fail = 0, gronwall_fail = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    bench::SplitMix64 rng(seed);
    const std::size_t r = 3 + rng.below(6), c = 3 + rng.below(6);
    const Matrix y1 = random_matrix(rng, r, c);
    const Matrix y2 = random_matrix(rng, r, c);
    const double tau = 2.0 * rng.uniform();
    const auto a = mc::svt(y1, tau);
    const auto b = mc::svt(y2, tau);
    if (frobenius_distance(a.x, b.x) > frobenius_distance(y1, y2) * (1.0 + 1e-12)) ++svt_fail;

    const auto phi = [&](const Matrix& x) {
      const double d = frobenius_distance(x, y1);
      return 0.5 * d * d + tau * mc::nuclear_norm(x);
    };
    const double base = phi(a.x);
    for (int k = 0; k < 50; ++k) {
      const Matrix pert = a.x + random_matrix(rng, r, c, 1e-3);
      if (phi(pert) < base - 1e-12 * (1.0 + base)) {
        ++svt_fail;
        break;
      }
    }

    const auto f = mc::svd(y1);
    Matrix us(r, f.sigma.size());
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < f.sigma.size(); ++j) us(i, j) = f.U(i, j) * f.sigma[j];
    const Matrix rec = matmul(us, f.V.transposed());
    const Matrix utu = matmul_tn(f.U, f.U);
    const Matrix vtv = matmul_tn(f.V, f.V);
    const Matrix id = Matrix::identity(f.sigma.size());
    bool sorted = std::is_sorted(f.sigma.rbegin(), f.sigma.rend());
    if (frobenius_distance(rec, y1) > 1e-9 * y1.frobenius_norm() || max_abs_diff(utu, id) > 1e-10 ||
        max_abs_diff(vtv, id) > 1e-10 || !sorted)
      ++svd_fail;

    const double alpha = 0.01 + rng.uniform(), beta = 0.1 + rng.uniform();
    std::vector<double> eta{beta * rng.uniform()};
    double sum = eta[0];
    for (int n = 1; n < 60; ++n) {
      eta.push_back(rng.uniform() * (beta + alpha * sum));
      sum += eta.back();
    }
    if (!ode::check_discrete_gronwall(eta, alpha, beta)) ++gronwall_fail;
  }
  long t_fail = 0;
  double t = 1.0;
  for (long k = 1; k <= 10000; ++k) {
    if (t < (static_cast<double>(k) + 1.0) / 2.0) ++t_fail;
    t = fista_t_next(t);
  }
  Verdict v;
  v.pass = svt_fail == 0 && svd_fail == 0 && gronwall_fail == 0 && t_fail == 0;
  v.detail = "failures: svt " + std::to_string(svt_fail) + ", svd " + std::to_string(svd_fail) + ", t-sequence " +
             std::to_string(t_fail) + ", gronwall " + std::to_string(gronwall_fail) + " (100 seeds each)";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // <= 0: no runtime bound
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "truncation orders", 10.0, truncation_orders},
      {2, "convergence rate", 10.0, convergence_rate},
      {3, "stability regions", 5.0, stability_regions},
      {4, "empirical stability separation", 2.0, probe_separation},
      {5, "lemma matrices", 5.0, lemma_matrices},
      {6, "coefficient identity", 0.0, coefficient_identity},
      {7, "feasible-step ratio", 120.0, feasible_ratio},
      {8, "backtracking comparison", 120.0, backtracking_counts},
      {9, "reduction equivalences", 0.0, reduction_equivalence},
      {10, "property suites", 0.0, property_suites},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s <= 0.0 || secs < c.budget_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::string timing = fmt("%.2f s", secs);
    if (c.budget_s > 0.0) timing += fmt(" of %.0f s", c.budget_s);
    std::printf("%s %2d %s: %s [%s]%s\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), timing.c_str(),
                in_time ? "" : " over time budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}

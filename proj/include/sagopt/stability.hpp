#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sagopt/rational.hpp"
#include "sagopt/scheme.hpp"

namespace sagopt::stability {

using Complex = std::complex<double>;

// Monic characteristic polynomial, coefficients highest degree first.
struct CharPoly {
  int degree = 0;
  std::vector<double> coeffs;
  double z = 0.0;  // s * Hessian eigenvalue it was built from
  // Set for the SAG cubic: it factors as (lambda - 1/2)(lambda^2 - (2-z) lambda + 1).
  bool sag_factored = false;
};

// lambda^2 - (2 - 2z) lambda + (1 - z).
CharPoly nag_char(double z);
// lambda^3 - (5/2 - z) lambda^2 + (2 - z/2) lambda - 1/2.
CharPoly sag_char(double z);
// Monic coefficients of the quadratic factor lambda^2 - (2 - z) lambda + 1.
std::array<double, 3> sag_quadratic_factor(double z);
// Large-n characteristic cubic of a four-term scheme whose explicit weights
// are w (x-weights and gradient weight); the gradient is taken at the
// extrapolated point whose n -> infinity limit is 2 x_n - x_{n-1}:
//   lambda^3 - (w0 + 2 g z) lambda^2 - (w1 - g z) lambda - w2.
CharPoly limit_char(const RecurrenceWeights<double>& w, double z);

// Polynomial value at lambda.
Complex evaluate(const CharPoly& p, Complex lambda);

// All roots, sorted by modulus descending. Quadratics by the stable closed
// form; the SAG cubic through its factorization; other cubics by Cardano /
// trigonometric formulas with Newton polishing and a bracketing fallback.
std::vector<Complex> poly_roots(const CharPoly& p);
std::vector<Complex> cubic_roots_closed_form(const CharPoly& p);
std::vector<Complex> cubic_roots_bracketing(const CharPoly& p);

double max_root_modulus(const CharPoly& p);

// All |lambda| <= 1 + tol, and roots with |lambda| in [1 - tol, 1 + tol] are
// simple (no other root within sqrt(tol)). z == 0 is accepted by convention.
// Requires tol in (0, 1e-6].
bool is_absolutely_stable(const CharPoly& p, double tol = 1e-9);

enum class BoundaryKind { analytic, scanned };

struct StabilityRegion {
  std::string scheme;  // "nag", "sag" or a parameter label
  double z_lo = 0.0;
  double z_hi = 0.0;
  double grid_step = 0.0;
  BoundaryKind kind = BoundaryKind::scanned;
  std::optional<Rational> exact_lo;  // set for analytic regions
  std::optional<Rational> exact_hi;
};

struct ScanRow {
  double z = 0.0;
  double max_modulus = 0.0;
  bool stable = false;
};

struct RegionScan {
  StabilityRegion analytic;
  StabilityRegion scanned;
  std::vector<ScanRow> rows;
};

StabilityRegion analytic_region(Scheme scheme);

// Scans z = j * grid over [0, z_max]; the scanned region is the contiguous
// stable run starting at z = 0. Requires grid <= 1e-3 * z_max.
RegionScan stable_region(Scheme scheme, double z_max, double grid, double tol = 1e-9);

enum class ProbeOutcome { bounded, diverged };

struct ProbeResult {
  ProbeOutcome outcome = ProbeOutcome::bounded;
  double reference_magnitude = 0.0;  // state magnitude at burn-in
  double max_after = 0.0;            // max |x_n| for n > burn_in (up to the stop)
  std::size_t iterations = 0;        // steps actually taken
  bool non_finite = false;
};

// Runs the scheme on F(x) = mu x^2 / 2 from x0 = 1 and classifies the tail.
// The reference magnitude is the largest |x| in the scheme's history window at
// burn-in (2 points for NAG, 3 for SAG). Requires burn_in >= 100 and
// n_iters >= 10 burn_in.
ProbeResult empirical_probe(Scheme scheme, double mu, double s, std::size_t n_iters,
                            std::size_t burn_in);

struct InvarianceRow {
  double k = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  StabilityRegion region;
  bool matches = false;
};

struct InvarianceReport {
  std::vector<InvarianceRow> rows;
  bool all_match = false;
};

// For each (k, m1, m2) confirms the finite-n recurrence is nondegenerate for
// 2 <= n <= 1000 (DegenerateSchemeError propagates), rebuilds the limit cubic
// and scans its region; a row matches when both endpoints lie within one grid
// step of [0, 4].
InvarianceReport region_invariance_check(std::span<const std::array<double, 3>> params,
                                         double z_max = 6.0, double grid = 1e-3,
                                         double tol = 1e-9);

}  // namespace sagopt::stability

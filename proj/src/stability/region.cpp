#include <algorithm>
#include <cmath>
#include <sstream>

#include "sagopt/errors.hpp"
#include "sagopt/objective.hpp"
#include "sagopt/stability.hpp"
#include "sagopt/steppers.hpp"

namespace sagopt::stability {

StabilityRegion analytic_region(Scheme scheme) {
  StabilityRegion r;
  r.scheme = std::string(to_string(scheme));
  r.kind = BoundaryKind::analytic;
  r.exact_lo = Rational(0);
  r.exact_hi = scheme == Scheme::nag ? Rational(4, 3) : Rational(4);
  r.z_lo = r.exact_lo->to_double();
  r.z_hi = r.exact_hi->to_double();
  return r;
}

namespace {

template <class Build>
std::pair<StabilityRegion, std::vector<ScanRow>> scan(Build&& build, double z_max, double grid, double tol) {
  if (!(z_max > 0.0) || !std::isfinite(z_max)) throw PreconditionError("stable_region: z_max must be positive");
  if (!(grid > 0.0) || grid > 1e-3 * z_max * (1.0 + 1e-12))
    throw PreconditionError("stable_region: grid must lie in (0, 1e-3 z_max]");
  const auto count = static_cast<std::size_t>(std::floor(z_max / grid + 1e-9));
  std::vector<ScanRow> rows;
  rows.reserve(count + 1);
  StabilityRegion reg;
  reg.grid_step = grid;
  reg.kind = BoundaryKind::scanned;
  bool run = true;
  for (std::size_t j = 0; j <= count; ++j) {
    const double z = static_cast<double>(j) * grid;
    const CharPoly p = build(z);
    ScanRow row{z, max_root_modulus(p), is_absolutely_stable(p, tol)};
    if (run) {
      if (row.stable) {
        reg.z_hi = z;
      } else {
        run = false;
      }
    }
    rows.push_back(row);
  }
  return {reg, rows};
}

}  // namespace

RegionScan stable_region(Scheme scheme, double z_max, double grid, double tol) {
  auto [reg, rows] = scan([scheme](double z) { return scheme == Scheme::nag ? nag_char(z) : sag_char(z); },
                          z_max, grid, tol);
  reg.scheme = std::string(to_string(scheme));
  return RegionScan{analytic_region(scheme), reg, std::move(rows)};
}

ProbeResult empirical_probe(Scheme scheme, double mu, double s, std::size_t n_iters, std::size_t burn_in) {
  if (!(mu > 0.0) || !(s > 0.0)) throw PreconditionError("empirical_probe: mu and s must be positive");
  if (burn_in < 100) throw PreconditionError("empirical_probe: burn_in must be >= 100");
  if (n_iters < 10 * burn_in) throw PreconditionError("empirical_probe: n_iters must be >= 10 burn_in");

  const Quadratic f = Quadratic::isotropic(mu, 1);
  const Vec x0{1.0};
  ProbeResult res;
  // x_n for the NAG state lives in x_curr after n - 1 steps; SAG starts at k = 2.
  const auto observe = [&](std::size_t step, double x, double history_mag) -> bool {
    if (!std::isfinite(x)) {
      res.non_finite = true;
      res.outcome = ProbeOutcome::diverged;
      return false;
    }
    if (step == burn_in) {
      res.reference_magnitude = history_mag;
    } else if (step > burn_in) {
      res.max_after = std::max(res.max_after, std::abs(x));
      if (res.max_after > 1e6 * res.reference_magnitude) {
        res.outcome = ProbeOutcome::diverged;
        return false;
      }
    }
    return true;
  };

  try {
    if (scheme == Scheme::nag) {
      NagState st = nag_initial(x0, s);
      for (std::size_t i = 1; i <= n_iters; ++i) {
        st = nag_step(st, f);
        res.iterations = i;
        const double hist = std::max(std::abs(st.x_curr[0]), std::abs(st.x_prev[0]));
        if (!observe(i, st.x_curr[0], hist)) break;
      }
    } else {
      SagState st = sag_initial(x0, s);
      for (std::size_t i = 1; i <= n_iters; ++i) {
        st = sag_step(st, f);
        res.iterations = i;
        const double hist =
            std::max({std::abs(st.x_curr[0]), std::abs(st.x_prev[0]), std::abs(st.x_prev2[0])});
        if (!observe(i, st.x_curr[0], hist)) break;
      }
    }
  } catch (const DivergedError&) {
    res.non_finite = true;
    res.outcome = ProbeOutcome::diverged;
  }
  return res;
}

InvarianceReport region_invariance_check(std::span<const std::array<double, 3>> params, double z_max,
                                         double grid, double tol) {
  if (params.empty()) throw PreconditionError("region_invariance_check: no parameter triples");
  InvarianceReport rep;
  rep.all_match = true;
  for (const auto& prm : params) {
    const SchemeCoefficients c = scheme_coefficients(prm[0], prm[1], prm[2]);
    for (long n = 2; n <= 1000; ++n) (void)normalized_recurrence(c, n);
    const RecurrenceWeights<double> w = limit_recurrence(c);
    auto [reg, rows] = scan([&w](double z) { return limit_char(w, z); }, z_max, grid, tol);
    std::ostringstream label;
    label << "k=" << prm[0] << ",m1=" << prm[1] << ",m2=" << prm[2];
    reg.scheme = label.str();
    InvarianceRow row{prm[0], prm[1], prm[2], reg, false};
    row.matches = std::abs(reg.z_lo) <= grid && std::abs(reg.z_hi - 4.0) <= grid * (1.0 + 1e-9);
    rep.all_match = rep.all_match && row.matches;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace sagopt::stability

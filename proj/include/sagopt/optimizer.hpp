#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sagopt/matrix.hpp"
#include "sagopt/objective.hpp"

namespace sagopt {

// nag_t is NAG with the t-sequence momentum of FISTA (the smooth counterpart
// of FISTA); nag uses the (n-3)/n momentum.
enum class Method { gd, nag, sag, nag_t };
enum class Termination { max_iter, tol, diverged };

std::string_view to_string(Method m);
std::string_view to_string(Termination t);
std::optional<Method> parse_method(std::string_view name);

struct Trajectory {
  std::vector<Vec> iterates;  // iterates[0] is the starting point
  Vec values;                 // values[i] = F(iterates[i])
  double step = 0.0;
  Method method = Method::gd;
  Termination reason = Termination::max_iter;
  std::optional<std::size_t> diverged_at;  // step index that produced the bad state
  std::string detail;
};

// Divergence threshold on ||x||_inf.
inline constexpr double kDivergenceNorm = 1e12;

// Runs up to max_iter steps. Stops with `tol` when ||grad F(x0)|| <= tol at
// the start, or, for tol > 0, when ||grad F(x)|| <= tol at a new iterate.
// Divergence (non-finite state or ||x||_inf > 1e12) ends the run with reason
// `diverged`; the offending state is not recorded.
Trajectory run_optimizer(Method method, const Objective& f, const Vec& x0, double s,
                         std::size_t max_iter, double tol);

}  // namespace sagopt

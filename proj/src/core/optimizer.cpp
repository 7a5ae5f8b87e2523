#include "sagopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <variant>

#include "sagopt/errors.hpp"
#include "sagopt/kernels.hpp"
#include "sagopt/steppers.hpp"

namespace sagopt {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::gd: return "gd";
    case Method::nag: return "nag";
    case Method::sag: return "sag";
    case Method::nag_t: return "nag-t";
  }
  return "?";
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::max_iter: return "max-iter";
    case Termination::tol: return "tol";
    case Termination::diverged: return "diverged";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::gd, Method::nag, Method::sag, Method::nag_t})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

namespace {

double inf_norm(const Vec& x) {
  double m = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) return INFINITY;
    m = std::max(m, std::abs(v));
  }
  return m;
}

struct GdState {
  Vec x_curr;
  double s;
};

using AnyState = std::variant<GdState, NagState, SagState, TSeqState>;

AnyState initial(Method m, const Vec& x0, double s) {
  switch (m) {
    case Method::gd: return GdState{x0, s};
    case Method::nag: return nag_initial(x0, s);
    case Method::sag: return sag_initial(x0, s);
    case Method::nag_t: return tseq_initial(x0, s);
  }
  throw PreconditionError("run_optimizer: unknown method");
}

AnyState advance(const AnyState& st, const Objective& f) {
  return std::visit(
      [&](const auto& s) -> AnyState {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GdState>) {
          return GdState{gd_step(s.x_curr, f, s.s), s.s};
        } else if constexpr (std::is_same_v<T, NagState>) {
          return nag_step(s, f);
        } else if constexpr (std::is_same_v<T, SagState>) {
          return sag_step(s, f);
        } else {
          return tseq_step(s, f);
        }
      },
      st);
}

const Vec& current(const AnyState& st) {
  return std::visit([](const auto& s) -> const Vec& { return s.x_curr; }, st);
}

}  // namespace

Trajectory run_optimizer(Method method, const Objective& f, const Vec& x0, double s,
                         std::size_t max_iter, double tol) {
  if (max_iter < 1) throw PreconditionError("run_optimizer: max_iter must be >= 1");
  if (!(tol >= 0.0)) throw PreconditionError("run_optimizer: tol must be >= 0");
  if (!(s > 0.0)) throw PreconditionError("run_optimizer: step size must be positive");
  if (x0.size() != f.dim()) throw PreconditionError("run_optimizer: x0 dimension mismatch");

  Trajectory tr;
  tr.step = s;
  tr.method = method;
  tr.iterates.push_back(x0);
  tr.values.push_back(f.value(x0));
  if (std::sqrt(kernels::sumsq(f.gradient(x0))) <= tol) {
    tr.reason = Termination::tol;
    return tr;
  }

  AnyState st = initial(method, x0, s);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    try {
      st = advance(st, f);
    } catch (const DivergedError& e) {
      tr.reason = Termination::diverged;
      tr.diverged_at = it;
      tr.detail = e.what();
      return tr;
    }
    const Vec& x = current(st);
    if (inf_norm(x) > kDivergenceNorm) {
      tr.reason = Termination::diverged;
      tr.diverged_at = it;
      tr.detail = "iterate norm exceeded divergence threshold";
      return tr;
    }
    tr.iterates.push_back(x);
    tr.values.push_back(f.value(x));
    if (tol > 0.0 && std::sqrt(kernels::sumsq(f.gradient(x))) <= tol) {
      tr.reason = Termination::tol;
      return tr;
    }
  }
  tr.reason = Termination::max_iter;
  return tr;
}

}  // namespace sagopt

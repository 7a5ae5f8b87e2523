#include "sagopt/svd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>

#include "sagopt/errors.hpp"
#include "sagopt/kernels.hpp"

namespace sagopt::mc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kJacobiBlock = 16;

// Cyclic one-sided Jacobi on the rows of `work`. On return the rows are
// mutually orthogonal; when `acc` is given it receives the same rotations.
int jacobi_rows(Matrix& work, Matrix* acc, const SvdOptions& opt, double negligible) {
  const std::size_t p = work.rows();
  Vec norms(p);
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    // Rows sorted by decreasing norm before each sweep (de Rijk ordering).
    for (std::size_t i = 0; i < p; ++i) norms[i] = kernels::sumsq(work.row(i));
    for (std::size_t i = 0; i + 1 < p; ++i) {
      const auto best = static_cast<std::size_t>(
          std::max_element(norms.begin() + static_cast<std::ptrdiff_t>(i), norms.end()) - norms.begin());
      if (best == i) continue;
      std::swap(norms[i], norms[best]);
      std::swap_ranges(work.row(i).begin(), work.row(i).end(), work.row(best).begin());
      if (acc != nullptr) std::swap_ranges(acc->row(i).begin(), acc->row(i).end(), acc->row(best).begin());
    }
    // Pairs are visited block by block so both row blocks stay in L1.
    bool rotated = false;
    // Squared norms are carried through each rotation and recomputed at the
    // start of the next sweep.
    const auto visit = [&](std::size_t i, std::size_t j) {
      const double xx = norms[i];
      const double yy = norms[j];
      if (xx <= negligible || yy <= negligible) return;
      const double xy = kernels::dot(work.row(i), work.row(j));
      if (std::abs(xy) <= opt.tolerance * std::sqrt(xx * yy)) return;
      const double zeta = (yy - xx) / (2.0 * xy);
      double t;
      if (std::abs(zeta) > 1e150) {
        t = 0.5 / zeta;
      } else {
        t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
      }
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = c * t;
      kernels::rotate(work.row(i), work.row(j), c, s);
      if (acc != nullptr) kernels::rotate(acc->row(i), acc->row(j), c, s);
      norms[i] = xx - t * xy;
      norms[j] = yy + t * xy;
      rotated = true;
    };
    for (std::size_t bi = 0; bi < p; bi += kJacobiBlock) {
      const std::size_t ei = std::min(p, bi + kJacobiBlock);
      for (std::size_t i = bi; i < ei; ++i)
        for (std::size_t j = i + 1; j < ei; ++j) visit(i, j);
      for (std::size_t bj = ei; bj < p; bj += kJacobiBlock) {
        const std::size_t ej = std::min(p, bj + kJacobiBlock);
        for (std::size_t i = bi; i < ei; ++i)
          for (std::size_t j = bj; j < ej; ++j) visit(i, j);
      }
    }
    if (!rotated) return sweep;
  }
  throw NumericalFailure("svd: Jacobi sweeps did not converge within " +
                         std::to_string(opt.max_sweeps) + " sweeps");
}

double negligible_for(const Matrix& x) {
  const double scale = x.frobenius_norm();
  return (kEps * scale) * (kEps * scale);
}

void require_finite(const Matrix& x, const char* who) {
  if (!x.all_finite()) throw PreconditionError(std::string(who) + ": input has non-finite entries");
}

std::vector<std::size_t> order_by_norm(const Vec& norms) {
  std::vector<std::size_t> order(norms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
  return order;
}

// Extends the columns of `basis` flagged in `filled` to an orthonormal set
// using modified Gram-Schmidt on canonical vectors.
void complete_orthonormal(Matrix& basis, std::vector<bool> filled) {
  const std::size_t n = basis.rows();
  const std::size_t r = basis.cols();
  std::size_t candidate = 0;
  Vec v(n);
  for (std::size_t col = 0; col < r; ++col) {
    if (filled[col]) continue;
    bool done = false;
    for (; candidate < n && !done; ++candidate) {
      std::fill(v.begin(), v.end(), 0.0);
      v[candidate] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < r; ++k) {
          if (!filled[k]) continue;
          double proj = 0.0;
          for (std::size_t a = 0; a < n; ++a) proj += basis(a, k) * v[a];
          for (std::size_t a = 0; a < n; ++a) v[a] -= proj * basis(a, k);
        }
      }
      double norm = 0.0;
      for (double e : v) norm += e * e;
      norm = std::sqrt(norm);
      // At most r - 1 < n directions are removed, so some canonical vector
      // keeps a residual of at least 1/sqrt(n).
      if (norm > 0.5 / std::sqrt(static_cast<double>(n))) {
        for (std::size_t a = 0; a < n; ++a) basis(a, col) = v[a] / norm;
        filled[col] = true;
        done = true;
      }
    }
    if (!done) throw NumericalFailure("svd: failed to complete orthonormal basis");
  }
}

// Deterministic filler for subspace columns.
struct SplitMix {
  std::uint64_t state;
  double next_signed() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-52 - 1.0;
  }
};

// Orthonormalizes the rows of m in place (two passes of modified
// Gram-Schmidt). Rows that collapse are replaced by filler vectors.
bool orthonormalize_rows(Matrix& m, SplitMix& rng) {
  const std::size_t n = m.cols();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    bool ok = false;
    for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
      const double before = std::sqrt(kernels::sumsq(row));
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < i; ++j) kernels::axpy(-kernels::dot(m.row(j), row), m.row(j), row);
      const double after = std::sqrt(kernels::sumsq(row));
      if (before > 0.0 && after > 1e-8 * before) {
        for (double& v : row) v /= after;
        ok = true;
      } else {
        for (std::size_t a = 0; a < n; ++a) row[a] = rng.next_signed();
      }
    }
    if (!ok) return false;
  }
  return true;
}

// out[j] = <x, m.row(j)> for j < count, four rows per kernel call.
void dots_with_rows(std::span<const double> x, const Matrix& m, std::size_t count, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const double* rows[4] = {m.row(j).data(), m.row(j + 1).data(), m.row(j + 2).data(), m.row(j + 3).data()};
    kernels::dot4(x, rows, out + j);
  }
  for (; j < count; ++j) out[j] = kernels::dot(x, m.row(j));
}

// out(j, a) = <y.row(a), basis.row(j)> for j < count (default all rows of basis).
Matrix apply_right(const Matrix& y, const Matrix& basis, std::size_t count) {
  Matrix out(count, y.rows());
  Vec buf(count);
  for (std::size_t a = 0; a < y.rows(); ++a) {
    dots_with_rows(y.row(a), basis, count, buf.data());
    for (std::size_t j = 0; j < count; ++j) out(j, a) = buf[j];
  }
  return out;
}

Matrix apply_right(const Matrix& y, const Matrix& basis) { return apply_right(y, basis, basis.rows()); }

// Lower Cholesky factorization in place; false when a pivot is not positive.
bool cholesky_succeeds(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = a(i, j) - kernels::dot(a.row(i).first(j), a.row(j).first(j));
      if (i == j) {
        if (!(s > 0.0)) return false;
        a(i, i) = std::sqrt(s);
      } else {
        a(i, j) = s / a(j, j);
      }
    }
  }
  return true;
}

}  // namespace

struct SvtEngine {
  static constexpr int kMaxSubspaceIterations = 30;
  static constexpr double kResidualTolerance = 1e-11;

  static void note_fallback(SvtWorkspace& ws) { ++ws.fallbacks_; }

  static std::size_t guard_columns(std::size_t rank) { return 8 + rank / 4; }

  static bool partial_allowed(const SvtWorkspace& ws, const Matrix& y) {
    const std::size_t r = std::min(y.rows(), y.cols());
    return !ws.full_only && ws.has_history_ &&
           4 * (ws.last_rank_ + guard_columns(ws.last_rank_)) <= r;
  }

  static void remember(SvtWorkspace* ws, Matrix right, std::size_t rank, std::size_t min_dim) {
    if (ws == nullptr) return;
    ws->last_rank_ = rank;
    ws->has_history_ = true;
    if (4 * (rank + guard_columns(rank)) <= min_dim) {
      ws->right_ = std::move(right);
    } else {
      ws->right_ = Matrix();
    }
  }

  static SvtResult full(const Matrix& y, double tau, SvtWorkspace* ws, const SvdOptions& opt) {
    const bool transposed = y.rows() > y.cols();
    Matrix work = transposed ? y.transposed() : y;
    const double negligible = negligible_for(work);
    jacobi_rows(work, nullptr, opt, negligible);

    Vec norms(work.rows());
    for (std::size_t i = 0; i < work.rows(); ++i) norms[i] = std::sqrt(kernels::sumsq(work.row(i)));
    const auto order = order_by_norm(norms);
    std::vector<std::size_t> keep;
    SvtResult out;
    for (std::size_t i : order) {
      if (norms[i] * norms[i] <= negligible || norms[i] <= tau) break;
      keep.push_back(i);
      out.nuclear_norm += norms[i] - tau;
    }
    out.rank = keep.size();
    const std::size_t k = keep.size();

    // Kept rows hold sigma_i times a singular vector of the short side.
    Matrix scaled(k, work.cols());
    Matrix basis(k, work.cols());
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = keep[r];
      const double sigma = norms[i];
      const double c = (sigma - tau) / (sigma * sigma * sigma);
      const auto src = work.row(i);
      for (std::size_t a = 0; a < work.cols(); ++a) {
        scaled(r, a) = c * src[a];
        basis(r, a) = src[a];
      }
    }

    Matrix right(k, y.cols());
    if (transposed) {
      // basis rows: sigma u^T; basis * y = sigma^2 v^T.
      Matrix t = matmul(basis, y);
      out.x = k == 0 ? Matrix(y.rows(), y.cols()) : matmul_tn(scaled, t);
      for (std::size_t r = 0; r < k; ++r) {
        const double s2 = norms[keep[r]] * norms[keep[r]];
        for (std::size_t a = 0; a < y.cols(); ++a) right(r, a) = t(r, a) / s2;
      }
    } else {
      // basis rows: sigma v^T; y basis^T = sigma^2 u.
      Matrix t = apply_right(y, basis);
      out.x = k == 0 ? Matrix(y.rows(), y.cols()) : matmul_tn(t, scaled);
      for (std::size_t r = 0; r < k; ++r) {
        const double sigma = norms[keep[r]];
        for (std::size_t a = 0; a < y.cols(); ++a) right(r, a) = basis(r, a) / sigma;
      }
    }
    if (ws != nullptr) ++ws->full_calls_;
    remember(ws, std::move(right), k, std::min(y.rows(), y.cols()));
    return out;
  }

  // Block subspace iteration on the leading singular triplets of y. Returns
  // nothing when convergence or the certificate sigma_{k+1}(y) < tau fails.
  static std::optional<SvtResult> partial(const Matrix& y, double tau, SvtWorkspace& ws,
                                          const SvdOptions& opt) {
    const std::size_t P = y.rows();
    const std::size_t Q = y.cols();
    const std::size_t m = ws.last_rank_ + guard_columns(ws.last_rank_);
    SplitMix rng{0x5eed0000ULL + m};

    Matrix vt(m, Q);
    const std::size_t seeded = ws.right_.cols() == Q ? std::min(ws.right_.rows(), m) : 0;
    for (std::size_t j = 0; j < m; ++j) {
      auto row = vt.row(j);
      if (j < seeded) {
        std::copy(ws.right_.row(j).begin(), ws.right_.row(j).end(), row.begin());
      } else {
        for (double& v : row) v = rng.next_signed();
      }
    }
    if (!orthonormalize_rows(vt, rng)) return std::nullopt;

    const double negligible = negligible_for(y);
    const Matrix yt = y.transposed();
    Vec sigma(m);
    Matrix ut_ritz(m, P);
    Matrix vt_ritz(m, Q);
    Matrix yv;  // rows: y v_i for the kept triplets
    std::size_t k = 0;
    bool converged = false;
    for (int it = 0; it < kMaxSubspaceIterations && !converged; ++it) {
      Matrix ut = apply_right(y, vt);
      if (!orthonormalize_rows(ut, rng)) return std::nullopt;
      Matrix w = apply_right(yt, ut);  // m x Q, rows u_j^T y
      Matrix acc = Matrix::identity(m);
      jacobi_rows(w, &acc, opt, negligible);

      Vec norms(m);
      for (std::size_t j = 0; j < m; ++j) norms[j] = std::sqrt(kernels::sumsq(w.row(j)));
      const auto order = order_by_norm(norms);
      k = 0;
      for (std::size_t r = 0; r < m; ++r) {
        const std::size_t j = order[r];
        sigma[r] = norms[j];
        auto urow = ut_ritz.row(r);
        std::fill(urow.begin(), urow.end(), 0.0);
        for (std::size_t l = 0; l < m; ++l) kernels::axpy(acc(j, l), ut.row(l), urow);
        auto vrow = vt_ritz.row(r);
        if (norms[j] * norms[j] > negligible) {
          for (std::size_t a = 0; a < Q; ++a) vrow[a] = w(j, a) / norms[j];
        } else {
          for (double& v : vrow) v = rng.next_signed();
        }
        if (norms[j] > tau && norms[j] * norms[j] > negligible) ++k;
      }
      // The block must reach below the threshold with room to spare.
      if (k + 2 > m) return std::nullopt;

      yv = apply_right(y, vt_ritz, k);
      double worst = 0.0;
      for (std::size_t r = 0; r < k; ++r) {
        double res = 0.0;
        for (std::size_t a = 0; a < P; ++a) {
          const double d = yv(r, a) - sigma[r] * ut_ritz(r, a);
          res += d * d;
        }
        worst = std::max(worst, std::sqrt(res));
      }
      converged = worst <= kResidualTolerance * std::max(sigma[0], tau);
      if (!converged) {
        vt = vt_ritz;
        if (!orthonormalize_rows(vt, rng)) return std::nullopt;
      }
    }
    if (!converged) return std::nullopt;

    // Certificate: E = y - (y V_k) V_k^T has rank-k complement, so
    // sigma_{k+1}(y) <= ||E||_2; require tau^2 I - E E^T to be positive definite.
    Matrix e = y;
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t a = 0; a < P; ++a) kernels::axpy(-yv(r, a), vt_ritz.row(r), e.row(a));
    }
    if (P > Q) e = e.transposed();
    const std::size_t n = e.rows();
    const double ef2 = kernels::sumsq(e.flat());
    const double margin = static_cast<double>(n) * static_cast<double>(e.cols() + n) * kEps *
                          std::max(ef2, tau * tau);
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      auto gi = g.row(i);
      dots_with_rows(e.row(i), e, i + 1, gi.data());
      for (std::size_t j = 0; j <= i; ++j) gi[j] = -gi[j];
      g(i, i) += tau * tau - margin;
    }
    if (!cholesky_succeeds(g)) return std::nullopt;

    SvtResult out;
    out.rank = k;
    Matrix left(k, P);
    Matrix right(k, Q);
    for (std::size_t r = 0; r < k; ++r) {
      const double f = sigma[r] - tau;
      out.nuclear_norm += f;
      for (std::size_t a = 0; a < P; ++a) left(r, a) = f * ut_ritz(r, a);
      std::copy(vt_ritz.row(r).begin(), vt_ritz.row(r).end(), right.row(r).begin());
    }
    out.x = k == 0 ? Matrix(P, Q) : matmul_tn(left, right);
    ++ws.partial_calls_;
    remember(&ws, std::move(right), k, std::min(P, Q));
    return out;
  }
};

SvdFactors svd(const Matrix& x, const SvdOptions& options) {
  require_finite(x, "svd");
  const bool transposed = x.rows() > x.cols();
  Matrix work = transposed ? x.transposed() : x;
  const std::size_t p = work.rows();
  const std::size_t q = work.cols();
  const double negligible = negligible_for(work);
  Matrix acc = Matrix::identity(p);
  jacobi_rows(work, &acc, options, negligible);

  Vec norms(p);
  for (std::size_t i = 0; i < p; ++i) norms[i] = std::sqrt(kernels::sumsq(work.row(i)));
  const auto order = order_by_norm(norms);
  const double zero_cut = std::sqrt(negligible);

  // "left" pairs with acc rows (length p); "right" pairs with work rows (length q).
  Matrix left(p, p);
  Matrix right(q, p);
  Vec sigma(p, 0.0);
  std::vector<bool> filled(p, false);
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t i = order[k];
    for (std::size_t a = 0; a < p; ++a) left(a, k) = acc(i, a);
    if (norms[i] > zero_cut && norms[i] > 0.0) {
      sigma[k] = norms[i];
      for (std::size_t a = 0; a < q; ++a) right(a, k) = work(i, a) / norms[i];
      filled[k] = true;
    }
  }
  complete_orthonormal(right, std::move(filled));

  SvdFactors f;
  f.sigma = std::move(sigma);
  if (transposed) {
    f.U = std::move(right);
    f.V = std::move(left);
  } else {
    f.U = std::move(left);
    f.V = std::move(right);
  }
  return f;
}

SvtResult svt(const Matrix& y, double tau, SvtWorkspace* workspace, const SvdOptions& options) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw PreconditionError("svt: threshold must be finite and nonnegative");
  require_finite(y, "svt");
  if (workspace != nullptr && SvtEngine::partial_allowed(*workspace, y)) {
    if (auto r = SvtEngine::partial(y, tau, *workspace, options)) return std::move(*r);
    SvtEngine::note_fallback(*workspace);
  }
  return SvtEngine::full(y, tau, workspace, options);
}

double nuclear_norm(const Matrix& x) {
  require_finite(x, "nuclear_norm");
  Matrix work = x.rows() > x.cols() ? x.transposed() : x;
  const double negligible = negligible_for(work);
  jacobi_rows(work, nullptr, SvdOptions{}, negligible);
  double total = 0.0;
  for (std::size_t i = 0; i < work.rows(); ++i) {
    const double sq = kernels::sumsq(work.row(i));
    if (sq > negligible) total += std::sqrt(sq);
  }
  return total;
}

}  // namespace sagopt::mc

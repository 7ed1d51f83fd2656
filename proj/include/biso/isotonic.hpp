#ifndef BISO_ISOTONIC_HPP
#define BISO_ISOTONIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"
#include "matrix_class.hpp"
#include "permutation.hpp"

namespace biso {

namespace detail {

struct PavaBlock {
  double mean;
  double weight;
  std::size_t count;
};

// Stack-based pool-adjacent-violators. Adjacent blocks are merged only on a
// strict violation, so equal neighbours stay separate (and flat).
template <class WeightAt>
void pava_core(std::span<const double> v, WeightAt weight_at, std::vector<PavaBlock>& stack,
               std::span<double> out) {
  stack.clear();
  for (std::size_t k = 0; k < v.size(); ++k) {
    stack.push_back({v[k], weight_at(k), 1});
    while (stack.size() >= 2 && stack[stack.size() - 2].mean > stack.back().mean) {
      const PavaBlock top = stack.back();
      stack.pop_back();
      PavaBlock& below = stack.back();
      const double w = below.weight + top.weight;
      below.mean = (below.mean * below.weight + top.mean * top.weight) / w;
      below.weight = w;
      below.count += top.count;
    }
  }
  std::size_t pos = 0;
  for (const auto& b : stack)
    for (std::size_t c = 0; c < b.count; ++c) out[pos++] = b.mean;
}

}  // namespace detail

// Weighted least-squares projection of v onto the non-decreasing cone.
inline std::vector<double> pava(std::span<const double> v, std::span<const double> w) {
  if (v.size() != w.size()) throw std::invalid_argument("pava: value/weight length mismatch");
  for (double x : w) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("pava: weights must be positive");
  }
  std::vector<double> out(v.size());
  std::vector<detail::PavaBlock> stack;
  stack.reserve(v.size());
  detail::pava_core(v, [&](std::size_t k) { return w[k]; }, stack, out);
  return out;
}

inline std::vector<double> pava(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::vector<detail::PavaBlock> stack;
  stack.reserve(v.size());
  detail::pava_core(v, [](std::size_t) { return 1.0; }, stack, out);
  return out;
}

enum class ProjectionMethod {
  dykstra,
  // Accelerated projected gradient on the dual of the column constraint.
  accelerated_dual,
};

struct ProjectionOptions {
  double tol = 1e-8;
  int max_cycles = 5000;
  ProjectionMethod method = ProjectionMethod::dykstra;
};

struct ProjectionReport {
  DenseMatrix result;
  int iterations = 0;
  // Max absolute entry change over the last full cycle (Dykstra) or between
  // the last two feasible iterates (accelerated_dual).
  double residual = 0.0;
  bool converged = false;
  // Primal minus dual objective at the returned point; bounds half the squared
  // distance to the exact projection. NaN for Dykstra, which has no dual iterate.
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
};

// Largest amount by which a row or column of m decreases between neighbours.
inline double monotonicity_violation(const DenseMatrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j + 1 < m.cols()) worst = std::max(worst, m(i, j) - m(i, j + 1));
      if (i + 1 < m.rows()) worst = std::max(worst, m(i, j) - m(i + 1, j));
    }
  }
  return worst;
}

namespace detail {

// out = clamp(row-wise PAVA(in), 0, 1): the projection onto monotone rows in the box.
inline void rows_monotone_box(const DenseMatrix& in, DenseMatrix& out, std::vector<PavaBlock>& stack) {
  for (std::size_t i = 0; i < in.rows(); ++i) {
    auto o = out.row(i);
    pava_core(in.row(i), [](std::size_t) { return 1.0; }, stack, o);
    for (double& x : o) x = std::clamp(x, 0.0, 1.0);
  }
}

// Column-wise PAVA in place.
inline void cols_monotone(DenseMatrix& m, std::vector<PavaBlock>& stack, std::vector<double>& buf,
                          std::vector<double>& fit) {
  const std::size_t n1 = m.rows();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < n1; ++i) buf[i] = m(i, j);
    pava_core(std::span<const double>(buf.data(), n1), [](std::size_t) { return 1.0; }, stack,
              std::span<double>(fit.data(), n1));
    for (std::size_t i = 0; i < n1; ++i) m(i, j) = fit[i];
  }
}

inline ProjectionReport project_biso_dykstra(const DenseMatrix& y, ProjectionOptions opts);
inline ProjectionReport project_biso_accelerated(const DenseMatrix& y, ProjectionOptions opts);

}  // namespace detail

// Euclidean projection onto {rows non-decreasing} ∩ {columns non-decreasing}
// ∩ [0,1]^{n1 x n2}.
inline ProjectionReport project_biso(const DenseMatrix& y, ProjectionOptions opts = {}) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("project_biso: tol must be positive");
  if (opts.max_cycles < 1) throw std::invalid_argument("project_biso: max_cycles must be >= 1");
  return opts.method == ProjectionMethod::dykstra ? detail::project_biso_dykstra(y, opts)
                                                   : detail::project_biso_accelerated(y, opts);
}

namespace detail {

// Dykstra's cyclic scheme: row-wise PAVA, column-wise PAVA, then entrywise
// clamp, each with its own correction term. Stops once a cycle moves no entry
// by more than tol and the iterate is monotone within tol.
inline ProjectionReport project_biso_dykstra(const DenseMatrix& y, ProjectionOptions opts) {
  const std::size_t n1 = y.rows(), n2 = y.cols();
  ProjectionReport rep;
  DenseMatrix x = y;
  DenseMatrix p(n1, n2), q(n1, n2), r(n1, n2), mid(n1, n2);

  std::vector<detail::PavaBlock> stack;
  stack.reserve(std::max(n1, n2));
  std::vector<double> buf(std::max(n1, n2)), fit(std::max(n1, n2));
  const auto unit = [](std::size_t) { return 1.0; };

  for (int cycle = 1; cycle <= opts.max_cycles; ++cycle) {
    // Rows: mid = P_rows(x + p), p <- x + p - mid.
    for (std::size_t i = 0; i < n1; ++i) {
      const auto xi = x.row(i);
      auto pi = p.row(i);
      auto out = mid.row(i);
      for (std::size_t j = 0; j < n2; ++j) buf[j] = xi[j] + pi[j];
      detail::pava_core(std::span<const double>(buf.data(), n2), unit, stack, out);
      for (std::size_t j = 0; j < n2; ++j) pi[j] = buf[j] - out[j];
    }
    // Columns: mid = P_cols(mid + q), q <- mid + q - P_cols(...).
    for (std::size_t j = 0; j < n2; ++j) {
      for (std::size_t i = 0; i < n1; ++i) buf[i] = mid(i, j) + q(i, j);
      detail::pava_core(std::span<const double>(buf.data(), n1), unit, stack,
                        std::span<double>(fit.data(), n1));
      for (std::size_t i = 0; i < n1; ++i) {
        q(i, j) = buf[i] - fit[i];
        mid(i, j) = fit[i];
      }
    }
    // Box: x = clamp(mid + r), r <- mid + r - x.
    double moved = 0.0;
    auto xd = x.data();
    auto md = mid.data();
    auto rd = r.data();
    for (std::size_t k = 0; k < xd.size(); ++k) {
      const double t = md[k] + rd[k];
      const double c = std::clamp(t, 0.0, 1.0);
      rd[k] = t - c;
      moved = std::max(moved, std::abs(c - xd[k]));
      xd[k] = c;
    }
    rep.iterations = cycle;
    rep.residual = moved;
    if (moved <= opts.tol && monotonicity_violation(x) <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.result = std::move(x);
  return rep;
}

// FISTA with adaptive restart on the dual of
//   min 1/2 ||X - Y||^2  s.t.  X in Rows∩Box,  X in Cols,
// dualising only the column cone. For a dual point W in the polar of Cols,
// X(W) = P_{Rows∩Box}(Y - W) and the gradient step is W <- Z - P_Cols(Z) with
// Z = W + X(W). Column PAVA keeps rows monotone, so P_Cols(X(W)) is feasible
// and serves as the primal iterate; it is checked every few steps.
inline ProjectionReport project_biso_accelerated(const DenseMatrix& y, ProjectionOptions opts) {
  const std::size_t n1 = y.rows(), n2 = y.cols();
  const std::size_t nn = n1 * n2;
  constexpr int kCheckEvery = 10;
  ProjectionReport rep;
  DenseMatrix w(n1, n2), w_prev(n1, n2), v(n1, n2), x(n1, n2), z(n1, n2);
  DenseMatrix cand(n1, n2), prev_cand(n1, n2);
  std::vector<PavaBlock> stack;
  stack.reserve(std::max(n1, n2));
  std::vector<double> buf(n1), fit(n1);
  const auto yd = y.data();
  double t = 1.0;
  bool have_prev = false;

  for (int it = 1; it <= opts.max_cycles; ++it) {
    {
      auto zd = z.data();
      const auto vd = v.data();
      for (std::size_t k = 0; k < nn; ++k) zd[k] = yd[k] - vd[k];
    }
    rows_monotone_box(z, x, stack);
    std::swap(w, w_prev);
    {
      auto zd = z.data();
      const auto vd = v.data();
      const auto xd = x.data();
      for (std::size_t k = 0; k < nn; ++k) zd[k] = vd[k] + xd[k];
    }
    w = z;
    cols_monotone(w, stack, buf, fit);
    double dot = 0.0;
    {
      auto wd = w.data();
      const auto zd = z.data();
      const auto vd = v.data();
      const auto pd = w_prev.data();
      for (std::size_t k = 0; k < nn; ++k) {
        wd[k] = zd[k] - wd[k];
        dot += (vd[k] - wd[k]) * (wd[k] - pd[k]);
      }
    }
    if (dot > 0.0) t = 1.0;
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    const double momentum = (t - 1.0) / t_next;
    t = t_next;
    {
      auto vd = v.data();
      const auto wd = w.data();
      const auto pd = w_prev.data();
      for (std::size_t k = 0; k < nn; ++k) vd[k] = wd[k] + momentum * (wd[k] - pd[k]);
    }

    rep.iterations = it;
    if (it % kCheckEvery != 0 && it != opts.max_cycles) continue;

    {
      auto zd = z.data();
      const auto wd = w.data();
      for (std::size_t k = 0; k < nn; ++k) zd[k] = yd[k] - wd[k];
    }
    rows_monotone_box(z, cand, stack);
    double dual = 0.0;
    {
      const auto cd = cand.data();
      const auto wd = w.data();
      for (std::size_t k = 0; k < nn; ++k) {
        const double d = cd[k] - yd[k];
        dual += 0.5 * d * d + wd[k] * cd[k];
      }
    }
    cols_monotone(cand, stack, buf, fit);
    double primal = 0.0;
    {
      const auto cd = cand.data();
      for (std::size_t k = 0; k < nn; ++k) {
        const double d = cd[k] - yd[k];
        primal += 0.5 * d * d;
      }
    }
    rep.duality_gap = std::max(primal - dual, 0.0);
    rep.residual = have_prev ? max_abs_diff(cand, prev_cand) : std::numeric_limits<double>::infinity();
    std::swap(cand, prev_cand);
    have_prev = true;
    if (rep.residual <= opts.tol && rep.duality_gap <= opts.tol * (1.0 + primal)) {
      rep.converged = true;
      break;
    }
  }
  rep.result = std::move(prev_cand);
  return rep;
}

}  // namespace detail

// Projection onto C_BISO(pi, sigma): move Y to latent order, project, move back.
inline ProjectionReport project_biso_permuted_report(const DenseMatrix& y, const Permutation& pi,
                                                     const Permutation& sigma,
                                                     ProjectionOptions opts = {}) {
  if (pi.size() != y.rows() || sigma.size() != y.cols())
    throw std::invalid_argument("project_biso_permuted: permutation lengths do not match dims");
  ProjectionReport rep = project_biso(latent_view(y, pi, sigma), opts);
  rep.result = permute_matrix(rep.result, pi, sigma);
  return rep;
}

inline DenseMatrix project_biso_permuted(const DenseMatrix& y, const Permutation& pi,
                                         const Permutation& sigma, ProjectionOptions opts = {}) {
  return project_biso_permuted_report(y, pi, sigma, opts).result;
}

}  // namespace biso

#endif  // BISO_ISOTONIC_HPP

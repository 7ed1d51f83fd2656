#ifndef BISO_ESTIMATORS_HPP
#define BISO_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "graph.hpp"
#include "isotonic.hpp"
#include "matrix.hpp"
#include "permutation.hpp"
#include "rng.hpp"

namespace biso {

// Leading constant of the comparison thresholds is scale * (max(zeta, 1) + 1);
// the analysed procedure uses scale = 16.
inline constexpr double kAnalysisThresholdScale = 16.0;

struct Thresholds {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double n_expected = 0.0;
  double lead = 0.0;      // scale * (zeta v 1 + 1)
  double log_term = 0.0;  // ln(n1 n2)
  double eta_full = 0.0;  // full row-sum threshold
  double tau = 0.0;       // column-sum bin width
  double beta = 0.0;      // minimum size of a "large" block

  // Threshold for partial sums over a block of b columns.
  double eta_block(std::size_t b) const {
    const double a = static_cast<double>(n1) * static_cast<double>(n2) / n_expected;
    return lead * (std::sqrt(a * static_cast<double>(b) * log_term) + a * log_term);
  }
};

inline Thresholds compute_thresholds(std::size_t n1, std::size_t n2, double n_expected,
                                     double zeta, double scale = kAnalysisThresholdScale) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("compute_thresholds: dims must be positive");
  if (!(n_expected > 0.0)) throw std::invalid_argument("compute_thresholds: N must be positive");
  if (!(zeta >= 0.0)) throw std::invalid_argument("compute_thresholds: zeta must be nonnegative");
  if (!(scale > 0.0)) throw std::invalid_argument("compute_thresholds: scale must be positive");
  Thresholds th;
  th.n1 = n1;
  th.n2 = n2;
  th.n_expected = n_expected;
  th.lead = scale * (std::max(zeta, 1.0) + 1.0);
  const double d1 = static_cast<double>(n1), d2 = static_cast<double>(n2);
  th.log_term = std::log(d1 * d2);
  const double lin = d1 * d2 / n_expected * th.log_term;
  th.eta_full = th.lead * (std::sqrt(d1 * d2 * d2 * th.log_term / n_expected) + lin);
  th.tau = th.lead * (std::sqrt(d1 * d1 * d2 * th.log_term / n_expected) + lin);
  th.beta = d2 * std::sqrt(d1 * th.log_term / n_expected);
  return th;
}

enum class BlockingProvenance { reference_contiguous, data_dependent };

// Ordered partition of the column indices. Each block occupies consecutive
// positions under `order` (a rank map over columns).
struct Blocking {
  std::vector<std::vector<std::size_t>> blocks;
  Permutation order;
  BlockingProvenance provenance = BlockingProvenance::reference_contiguous;
};

inline bool is_valid_blocking(const Blocking& bl, std::size_t n2) {
  if (bl.order.size() != n2) return false;
  std::vector<char> seen(n2, 0);
  std::size_t total = 0;
  for (const auto& b : bl.blocks) {
    if (b.empty()) return false;
    std::size_t lo = n2, hi = 0;
    for (std::size_t j : b) {
      if (j >= n2 || seen[j]) return false;
      seen[j] = 1;
      lo = std::min(lo, bl.order(j));
      hi = std::max(hi, bl.order(j));
    }
    if (hi - lo + 1 != b.size()) return false;
    total += b.size();
  }
  return total == n2;
}

// Contiguous blocks of near-equal size (sizes differ by at most one), each
// within [u/2, u] for u = n2 sqrt(n1 ln(n1 n2) / N), clamped to [1, n2].
// k = ceil(n2 / floor(u)) keeps every size at most u; the lower end can only
// be missed when no near-equal integer partition reaches it.
inline Blocking reference_blocking(std::size_t n1, std::size_t n2, double n_expected) {
  if (n1 == 0 || n2 == 0 || !(n_expected > 0.0))
    throw std::invalid_argument("reference_blocking: dims and N must be positive");
  const double d1 = static_cast<double>(n1), d2 = static_cast<double>(n2);
  const double u = d2 * std::sqrt(d1 * std::log(d1 * d2) / n_expected);
  const double uc = std::min(std::max(u, 1.0), d2);
  const auto k = static_cast<std::size_t>(std::ceil(d2 / std::floor(uc) - 1e-12));
  Blocking bl;
  bl.order = Permutation::identity(n2);
  bl.provenance = BlockingProvenance::reference_contiguous;
  const std::size_t base = n2 / k, extra = n2 % k;
  std::size_t next = 0;
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    std::vector<std::size_t> block(len);
    std::iota(block.begin(), block.end(), next);
    next += len;
    bl.blocks.push_back(std::move(block));
  }
  return bl;
}

// Data-dependent blocking from column sums: sort columns by sum, bin sums into
// width-tau intervals, then merge runs of small bins (size < beta) into groups
// of size in [beta/2, 2 beta]; a leftover shorter than beta/2 joins the
// previous group. Large bins are kept as they are.
inline Blocking blocking_subroutine(const DenseMatrix& y1, const Thresholds& th) {
  const std::size_t n2 = y1.cols();
  const std::vector<double> sums = y1.col_sums();
  const Permutation presort = ranks_ascending(sums);
  const std::vector<std::size_t> by_sum = presort.order();

  // K = ceil(n2 / tau); capped so the bin index stays representable.
  const double k_real = std::ceil(static_cast<double>(n2) / th.tau);
  const double k_bins = std::clamp(k_real, 1.0, 4.0e18);
  const auto bin_of = [&](double c) -> std::int64_t {
    if (k_bins <= 1.0) return 0;
    const double b = std::floor(c / th.tau);
    return static_cast<std::int64_t>(std::clamp(b, 0.0, k_bins - 1.0));
  };

  // Non-empty bins in sorted-sum order.
  std::vector<std::vector<std::size_t>> bins;
  std::int64_t current = -1;
  for (std::size_t j : by_sum) {
    const std::int64_t b = bin_of(sums[j]);
    if (bins.empty() || b != current) {
      bins.emplace_back();
      current = b;
    }
    bins.back().push_back(j);
  }

  const double beta = th.beta;
  std::vector<char> is_small(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k)
    is_small[k] = static_cast<double>(bins[k].size()) < beta;

  // Group consecutive small bins (consecutive among small bins only).
  std::vector<std::vector<std::size_t>> groups;  // lists of bin indices
  std::vector<std::size_t> open;
  double open_size = 0.0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (!is_small[k]) continue;
    open.push_back(k);
    open_size += static_cast<double>(bins[k].size());
    if (open_size >= beta / 2.0) {
      groups.push_back(std::move(open));
      open.clear();
      open_size = 0.0;
    }
  }
  if (!open.empty()) {
    if (groups.empty())
      groups.push_back(std::move(open));
    else
      groups.back().insert(groups.back().end(), open.begin(), open.end());
  }

  // Emit blocks in sorted-sum order; a merged group sits at its first bin.
  std::vector<std::ptrdiff_t> group_at(bins.size(), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) group_at[groups[g].front()] = static_cast<std::ptrdiff_t>(g);

  Blocking bl;
  bl.provenance = BlockingProvenance::data_dependent;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (!is_small[k]) {
      bl.blocks.push_back(bins[k]);
    } else if (group_at[k] >= 0) {
      std::vector<std::size_t> merged;
      for (std::size_t b : groups[static_cast<std::size_t>(group_at[k])])
        merged.insert(merged.end(), bins[b].begin(), bins[b].end());
      bl.blocks.push_back(std::move(merged));
    }
  }
  std::vector<std::size_t> layout;
  layout.reserve(n2);
  for (const auto& b : bl.blocks) layout.insert(layout.end(), b.begin(), b.end());
  bl.order = Permutation::from_order(layout);
  return bl;
}

// Edge u -> v iff the full row sum of v exceeds that of u by more than
// eta_full, or some block's partial sum does by more than eta_block(|B|).
// Every decision depends on Y only through the row difference Y_v - Y_u.
inline ComparisonGraph partial_sum_graph(const DenseMatrix& y, const Blocking& bl,
                                         const Thresholds& th) {
  const std::size_t n1 = y.rows();
  if (!is_valid_blocking(bl, y.cols()))
    throw std::invalid_argument("partial_sum_graph: blocking does not partition the columns");
  const std::size_t nb = bl.blocks.size();
  const std::vector<double> full = y.row_sums();
  std::vector<double> part(n1 * nb, 0.0);  // part[i * nb + b]
  std::vector<double> eta(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    eta[b] = th.eta_block(bl.blocks[b].size());
    for (std::size_t i = 0; i < n1; ++i) {
      const auto row = y.row(i);
      double s = 0.0;
      for (std::size_t j : bl.blocks[b]) s += row[j];
      part[i * nb + b] = s;
    }
  }

  ComparisonGraph g(n1);
  for (std::size_t u = 0; u < n1; ++u) {
    for (std::size_t v = 0; v < n1; ++v) {
      if (u == v) continue;
      bool edge = full[v] - full[u] > th.eta_full;
      for (std::size_t b = 0; !edge && b < nb; ++b)
        edge = part[v * nb + b] - part[u * nb + b] > eta[b];
      if (edge) g.add_edge(u, v);
    }
  }
  return g;
}

enum class Fallback { identity, uniform_random };

struct RankingOutcome {
  Permutation ranks;
  bool fallback = false;
  std::size_t edges = 0;
};

// Topological sort of g, or the fallback permutation when g has a cycle.
inline RankingOutcome resolve_ranking(const ComparisonGraph& g, Fallback fallback, TopoMode mode,
                                      std::uint64_t seed) {
  RankingOutcome out;
  out.edges = g.edge_count();
  if (auto sorted = topological_sort(g, mode, derive_seed(seed, {0}))) {
    out.ranks = std::move(*sorted);
    return out;
  }
  out.fallback = true;
  if (fallback == Fallback::identity) {
    out.ranks = Permutation::identity(g.size());
  } else {
    Rng rng = make_rng(derive_seed(seed, {1}));
    out.ranks = Permutation::uniform(g.size(), rng);
  }
  return out;
}

// Row ranking from partial sums over a known blocking. Falls back to a seeded
// uniformly random permutation when the comparison graph is cyclic. With
// TopoMode::uniform_random this is the PDD variant.
inline RankingOutcome sort_partial_sums_detailed(const DenseMatrix& y, const Blocking& bl,
                                                 const Thresholds& th,
                                                 TopoMode mode = TopoMode::deterministic_min_index,
                                                 std::uint64_t seed = 0) {
  return resolve_ranking(partial_sum_graph(y, bl, th), Fallback::uniform_random, mode, seed);
}

inline Permutation sort_partial_sums(const DenseMatrix& y, const Blocking& bl, const Thresholds& th,
                                     TopoMode mode = TopoMode::deterministic_min_index,
                                     std::uint64_t seed = 0) {
  return sort_partial_sums_detailed(y, bl, th, mode, seed).ranks;
}

// Borda comparisons: u -> v iff row sum of v exceeds that of u.
inline ComparisonGraph borda_graph(const DenseMatrix& y) {
  const std::vector<double> s = y.row_sums();
  ComparisonGraph g(y.rows());
  for (std::size_t u = 0; u < s.size(); ++u)
    for (std::size_t v = 0; v < s.size(); ++v)
      if (u != v && s[v] - s[u] > 0.0) g.add_edge(u, v);
  return g;
}

// Ranks sorting row sums ascending. Ties: smallest index first, or a uniform
// random order within each group of equal sums.
inline Permutation borda_sort(const DenseMatrix& y, TopoMode mode = TopoMode::deterministic_min_index,
                              std::uint64_t seed = 0) {
  const std::vector<double> s = y.row_sums();
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
  if (mode == TopoMode::uniform_random) {
    Rng rng = make_rng(seed);
    for (std::size_t lo = 0; lo < order.size();) {
      std::size_t hi = lo + 1;
      while (hi < order.size() && s[order[hi]] == s[order[lo]]) ++hi;
      std::shuffle(order.begin() + static_cast<std::ptrdiff_t>(lo),
                   order.begin() + static_cast<std::ptrdiff_t>(hi), rng);
      lo = hi;
    }
  }
  return Permutation::from_order(order);
}

struct TdsDiagnostics {
  std::size_t row_edges = 0;
  std::size_t col_edges = 0;
  std::size_t row_blocks = 0;
  std::size_t col_blocks = 0;
  bool row_fallback = false;
  bool col_fallback = false;
};

struct TdsEstimate {
  Permutation pi_hat;
  Permutation sigma_hat;
  TdsDiagnostics diagnostics;
};

namespace detail {

struct TdsSide {
  RankingOutcome ranking;
  std::size_t blocks = 0;
};

inline TdsSide tds_rows(const DenseMatrix& y1, const DenseMatrix& y2, const Thresholds& th,
                        TopoMode mode, std::uint64_t seed) {
  const Blocking bl = blocking_subroutine(y1, th);
  TdsSide side;
  side.blocks = bl.blocks.size();
  side.ranking = resolve_ranking(partial_sum_graph(y2, bl, th), Fallback::identity, mode, seed);
  return side;
}

}  // namespace detail

// Two-dimensional sorting. Rows: blocking from Y1's column sums, comparison
// graph from Y2's full and blocked row sums, identity when cyclic. Columns:
// the same on the transposes with th_cols (built with n1 and n2 swapped).
inline TdsEstimate two_dimensional_sort(const DenseMatrix& y1, const DenseMatrix& y2,
                                        const Thresholds& th_rows, const Thresholds& th_cols,
                                        TopoMode mode = TopoMode::deterministic_min_index,
                                        std::uint64_t seed = 0) {
  if (y1.rows() != y2.rows() || y1.cols() != y2.cols())
    throw std::invalid_argument("two_dimensional_sort: Y1 and Y2 dimensions differ");
  auto rows = detail::tds_rows(y1, y2, th_rows, mode, derive_seed(seed, {1}));
  auto cols = detail::tds_rows(y1.transpose(), y2.transpose(), th_cols, mode, derive_seed(seed, {2}));
  TdsEstimate est;
  est.pi_hat = std::move(rows.ranking.ranks);
  est.sigma_hat = std::move(cols.ranking.ranks);
  est.diagnostics = {rows.ranking.edges, cols.ranking.edges,   rows.blocks,
                     cols.blocks,        rows.ranking.fallback, cols.ranking.fallback};
  return est;
}

// Step 2 of the meta-algorithm: project Y onto C_BISO(pi_hat, sigma_hat).
inline DenseMatrix meta_estimate(const DenseMatrix& y, const Permutation& pi_hat,
                                 const Permutation& sigma_hat, ProjectionOptions opts = {}) {
  return project_biso_permuted(y, pi_hat, sigma_hat, opts);
}

enum class EstimatorKind { borda, refsort, tds, project_only };

inline std::string_view to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::borda: return "borda";
    case EstimatorKind::refsort: return "refsort";
    case EstimatorKind::tds: return "tds";
    case EstimatorKind::project_only: return "project-only";
  }
  return "?";
}

inline EstimatorKind parse_estimator(std::string_view s) {
  if (s == "borda") return EstimatorKind::borda;
  if (s == "refsort") return EstimatorKind::refsort;
  if (s == "tds") return EstimatorKind::tds;
  if (s == "project-only") return EstimatorKind::project_only;
  throw std::invalid_argument("unknown estimator '" + std::string(s) +
                              "' (expected borda, refsort, tds or project-only)");
}

}  // namespace biso

#endif  // BISO_ESTIMATORS_HPP

#ifndef BISO_CONE_TESTING_HPP
#define BISO_CONE_TESTING_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "sampling.hpp"

namespace biso {

// Parameters of the two-point mixtures used to lower-bound testing radii.
// The orthant mixture uses d and s; the monotone mixture uses r, s, t with
// r * s * t = d; the chi-square computations use lambda, delta, r, s.
struct MixtureConfig {
  std::size_t d = 0;
  double lambda = 1.0;
  double delta = 0.25;
  std::size_t r = 1;
  std::size_t s = 1;
  std::size_t t = 1;
};

inline constexpr double kMaxBumpHeight = 0.4;

namespace detail {

inline void check_delta(double delta) {
  if (!(delta >= 0.0) || delta > kMaxBumpHeight)
    throw std::invalid_argument("mixture: delta must lie in [0, 2/5], got " + std::to_string(delta));
}

}  // namespace detail

using VectorPair = std::pair<std::vector<double>, std::vector<double>>;

// u = all-half; v = all-half plus one bump of height delta at a uniformly
// random position inside each of the d/s consecutive blocks of length s.
inline VectorPair orthant_mixture_draw(const MixtureConfig& cfg, std::uint64_t seed) {
  detail::check_delta(cfg.delta);
  if (cfg.s == 0 || cfg.d == 0 || cfg.d % cfg.s != 0)
    throw std::invalid_argument("orthant_mixture_draw: s must divide d");
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pos(0, cfg.s - 1);
  std::vector<double> u(cfg.d, 0.5), v(cfg.d, 0.5);
  for (std::size_t b = 0; b < cfg.d / cfg.s; ++b) v[b * cfg.s + pos(rng)] += cfg.delta;
  return {std::move(u), std::move(v)};
}

// Monotone staircase mixture for given step indices (one per block, 1-based
// in [1, s]; entries for even blocks are ignored). Block k (1-based) of length
// r*s sits at level 1/4 + (k-1)/(2t); on odd blocks u and v add delta/t to
// coordinates whose sub-block index j satisfies j > J (u) or j >= J (v).
inline VectorPair monotone_mixture_from_indices(const MixtureConfig& cfg,
                                                const std::vector<std::size_t>& step_index) {
  detail::check_delta(cfg.delta);
  if (cfg.r == 0 || cfg.s == 0 || cfg.t == 0 || cfg.r * cfg.s * cfg.t != cfg.d)
    throw std::invalid_argument("monotone_mixture: need r * s * t = d");
  if (step_index.size() != cfg.t)
    throw std::invalid_argument("monotone_mixture: need one step index per block");
  const double t = static_cast<double>(cfg.t);
  const double step = cfg.delta / t;
  const std::size_t len = cfg.r * cfg.s;
  std::vector<double> u(cfg.d), v(cfg.d);
  for (std::size_t k = 1; k <= cfg.t; ++k) {
    const double level = 0.25 + static_cast<double>(k - 1) / (2.0 * t);
    const bool odd = k % 2 == 1;
    const std::size_t jstar = step_index[k - 1];
    if (odd && (jstar < 1 || jstar > cfg.s))
      throw std::invalid_argument("monotone_mixture: step index out of [1, s]");
    for (std::size_t i = 1; i <= len; ++i) {
      const std::size_t at = (k - 1) * len + (i - 1);
      u[at] = level;
      v[at] = level;
      if (!odd) continue;
      const std::size_t j = (i + cfg.r - 1) / cfg.r;  // ceil(i / r)
      if (j > jstar) u[at] += step;
      if (j >= jstar) v[at] += step;
    }
  }
  return {std::move(u), std::move(v)};
}

inline VectorPair monotone_mixture_draw(const MixtureConfig& cfg, std::uint64_t seed) {
  if (cfg.s == 0) throw std::invalid_argument("monotone_mixture: s must be positive");
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(1, cfg.s);
  std::vector<std::size_t> idx(cfg.t);
  for (auto& j : idx) j = pick(rng);
  return monotone_mixture_from_indices(cfg, idx);
}

// Bound on the chi-square divergence of the bump mixture against the
// all-half null: 2 lambda delta^2 r / s (Gaussian), 8 lambda delta^2 r / s (Bernoulli).
inline double chi_square_bound(const MixtureConfig& cfg, NoiseKind kind = NoiseKind::gaussian) {
  const double c = kind == NoiseKind::gaussian ? 2.0 : 8.0;
  return c * cfg.lambda * cfg.delta * cfg.delta * static_cast<double>(cfg.r) /
         static_cast<double>(cfg.s);
}

// Whether (lambda, delta, r) satisfy the hypotheses under which the bound holds.
inline bool chi_square_hypotheses_hold(const MixtureConfig& cfg,
                                       NoiseKind kind = NoiseKind::gaussian) {
  const double load = cfg.lambda * cfg.delta * cfg.delta * static_cast<double>(cfg.r);
  const double cap = kind == NoiseKind::gaussian ? 0.4 : 0.1;
  return cfg.delta >= 0.0 && cfg.delta <= kMaxBumpHeight && load <= cap && cfg.lambda > 0.0 &&
         cfg.r > 0 && cfg.s > 0;
}

// Exact chi-square divergence for Gaussian observations with Poisson(lambda)
// counts per coordinate: (1/s) (exp(lambda r (e^{delta^2} - 1)) - 1).
inline double chi_square_closed_form(const MixtureConfig& cfg) {
  if (!chi_square_hypotheses_hold(cfg, NoiseKind::gaussian)) {
    throw std::invalid_argument(
        "chi_square_closed_form: requires delta <= 2/5 and lambda delta^2 r <= 2/5 "
        "(hypotheses of the mixture chi-square lemma)");
  }
  const double inner = static_cast<double>(cfg.r) * cfg.lambda * std::expm1(cfg.delta * cfg.delta);
  return std::expm1(inner) / static_cast<double>(cfg.s);
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Averages (1/s^2) sum_k [g(kappa over block k)] - 1/s over Poisson count
// vectors kappa, where g(m) = exp(delta^2 m) for Gaussian observations and
// (1 + 4 delta^2)^m for Bernoulli observations.
inline MonteCarloEstimate chi_square_monte_carlo(const MixtureConfig& cfg, std::size_t trials,
                                                 std::uint64_t seed,
                                                 NoiseKind kind = NoiseKind::gaussian) {
  if (trials == 0) throw std::invalid_argument("chi_square_monte_carlo: trials must be positive");
  if (cfg.r == 0 || cfg.s == 0) throw std::invalid_argument("chi_square_monte_carlo: r, s must be positive");
  const double rate = kind == NoiseKind::gaussian ? cfg.delta * cfg.delta
                                                  : std::log1p(4.0 * cfg.delta * cfg.delta);
  const double s = static_cast<double>(cfg.s);
  Rng rng = make_rng(seed);
  std::poisson_distribution<std::uint64_t> counts(cfg.lambda);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t n = 1; n <= trials; ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < cfg.s; ++k) {
      std::uint64_t m = 0;
      for (std::size_t i = 0; i < cfg.r; ++i) m += counts(rng);
      acc += std::expm1(rate * static_cast<double>(m));
    }
    const double val = acc / (s * s);
    const double delta = val - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (val - mean);
  }
  MonteCarloEstimate out;
  out.estimate = mean;
  out.std_error = trials > 1 ? std::sqrt(m2 / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
  return out;
}

struct ConeSweepRow {
  double lambda = 0.0;
  double delta = 0.0;
  std::size_t r = 0;
  std::size_t s = 0;
  double closed_form = 0.0;
  double mc_estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
};

struct ConeSweepGrid {
  std::vector<double> lambda;
  std::vector<double> delta;
  std::vector<std::size_t> r;
  std::vector<std::size_t> s;
};

// Gaussian sweep over the grid; points violating the lemma's hypotheses are
// skipped. trials = 0 skips the Monte Carlo column.
inline std::vector<ConeSweepRow> run_cone_sweep(const ConeSweepGrid& grid, std::size_t trials,
                                                std::uint64_t seed) {
  std::vector<ConeSweepRow> rows;
  std::uint64_t point = 0;
  for (double lambda : grid.lambda)
    for (double delta : grid.delta)
      for (std::size_t r : grid.r)
        for (std::size_t s : grid.s) {
          ++point;
          MixtureConfig cfg{r * s, lambda, delta, r, s, 1};
          if (!chi_square_hypotheses_hold(cfg)) continue;
          ConeSweepRow row{lambda, delta, r, s, chi_square_closed_form(cfg), 0.0, 0.0,
                           chi_square_bound(cfg)};
          if (trials > 0) {
            const auto mc = chi_square_monte_carlo(cfg, trials, derive_seed(seed, {point}));
            row.mc_estimate = mc.estimate;
            row.std_error = mc.std_error;
          }
          rows.push_back(row);
        }
  return rows;
}

}  // namespace biso

#endif  // BISO_CONE_TESTING_HPP

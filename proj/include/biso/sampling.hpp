#ifndef BISO_SAMPLING_HPP
#define BISO_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matrix.hpp"
#include "rng.hpp"

namespace biso {

enum class NoiseKind { gaussian, bernoulli };

struct NoiseModel {
  NoiseKind kind = NoiseKind::gaussian;
  // Known sub-exponential proxy bound; 1 for both built-in kinds.
  double zeta = 1.0;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

struct Observation {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Observations drawn under the Poissonized trace-regression model. `nominal_n`
// is the expected count N used to scale the averaged observation matrix.
struct ObservationSet {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double nominal_n = 0.0;
  std::vector<Observation> entries;

  friend bool operator==(const ObservationSet&, const ObservationSet&) = default;
};

enum class SplitMode { independent_poisson, thinning };

namespace detail {

inline void check_noise_support(const DenseMatrix& m, const NoiseModel& noise) {
  if (noise.zeta < 0.0) throw std::invalid_argument("NoiseModel: zeta must be nonnegative");
  if (noise.kind != NoiseKind::bernoulli) return;
  for (double x : m.data()) {
    if (x < 0.0 || x > 1.0)
      throw std::invalid_argument("Bernoulli noise requires every entry of M* in [0, 1]");
  }
}

inline void draw_entries(const DenseMatrix& m, const NoiseModel& noise, std::uint64_t count,
                         Rng& rng, std::vector<Observation>& out) {
  std::uniform_int_distribution<std::size_t> pick_row(0, m.rows() - 1);
  std::uniform_int_distribution<std::size_t> pick_col(0, m.cols() - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  out.reserve(out.size() + count);
  for (std::uint64_t l = 0; l < count; ++l) {
    const std::size_t i = pick_row(rng);
    const std::size_t j = pick_col(rng);
    const double mean = m(i, j);
    const double y = noise.kind == NoiseKind::gaussian ? mean + gauss(rng)
                                                       : (unif(rng) < mean ? 1.0 : 0.0);
    out.push_back({i, j, y});
  }
}

inline std::uint64_t draw_poisson(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> poi(mean);
  return poi(rng);
}

}  // namespace detail

// N' ~ Poi(N) observations at i.i.d. uniform positions.
inline ObservationSet sample_observations(const DenseMatrix& m_star, const NoiseModel& noise,
                                          double n_expected, std::uint64_t seed) {
  if (m_star.size() == 0) throw std::invalid_argument("sample_observations: empty matrix");
  if (!(n_expected >= 0.0)) throw std::invalid_argument("sample_observations: N must be >= 0");
  detail::check_noise_support(m_star, noise);
  Rng rng = make_rng(seed);
  ObservationSet obs{m_star.rows(), m_star.cols(), n_expected, {}};
  detail::draw_entries(m_star, noise, detail::draw_poisson(n_expected, rng), rng, obs.entries);
  return obs;
}

// Exactly `count` observations (the non-Poissonized model). nominal_n = count.
inline ObservationSet sample_exact_observations(const DenseMatrix& m_star, const NoiseModel& noise,
                                                std::uint64_t count, std::uint64_t seed) {
  if (m_star.size() == 0) throw std::invalid_argument("sample_exact_observations: empty matrix");
  detail::check_noise_support(m_star, noise);
  Rng rng = make_rng(seed);
  ObservationSet obs{m_star.rows(), m_star.cols(), static_cast<double>(count), {}};
  detail::draw_entries(m_star, noise, count, rng, obs.entries);
  return obs;
}

// Y(i, j) = (n1 n2 / N) * sum of observed values at (i, j); unobserved entries are 0.
inline DenseMatrix build_observation_matrix(const ObservationSet& obs) {
  DenseMatrix y(obs.n1, obs.n2, 0.0);
  if (obs.entries.empty()) return y;
  if (!(obs.nominal_n > 0.0))
    throw std::invalid_argument("build_observation_matrix: N = 0 with nonempty observations");
  for (const auto& o : obs.entries) {
    if (o.row >= obs.n1 || o.col >= obs.n2)
      throw std::out_of_range("build_observation_matrix: observation index out of bounds");
    y(o.row, o.col) += o.value;
  }
  const double scale = static_cast<double>(obs.n1) * static_cast<double>(obs.n2) / obs.nominal_n;
  for (double& x : y.data()) x *= scale;
  return y;
}

// Routes each observation to one side by a fair coin. Each side is a
// Poissonized sample with nominal N/2.
inline std::pair<ObservationSet, ObservationSet> thin_split(const ObservationSet& obs,
                                                            std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::bernoulli_distribution coin(0.5);
  ObservationSet a{obs.n1, obs.n2, obs.nominal_n / 2.0, {}};
  ObservationSet b{obs.n1, obs.n2, obs.nominal_n / 2.0, {}};
  for (const auto& o : obs.entries) (coin(rng) ? a : b).entries.push_back(o);
  return {std::move(a), std::move(b)};
}

inline std::pair<ObservationSet, ObservationSet> split_sample(const DenseMatrix& m_star,
                                                              const NoiseModel& noise,
                                                              double n_expected, SplitMode mode,
                                                              std::uint64_t seed) {
  if (mode == SplitMode::independent_poisson) {
    return {sample_observations(m_star, noise, n_expected, derive_seed(seed, {1})),
            sample_observations(m_star, noise, n_expected, derive_seed(seed, {2}))};
  }
  return thin_split(sample_observations(m_star, noise, n_expected, derive_seed(seed, {1})),
                    derive_seed(seed, {2}));
}

// Union of two sets over the same grid; nominal counts add.
inline ObservationSet merge(const ObservationSet& a, const ObservationSet& b) {
  if (a.n1 != b.n1 || a.n2 != b.n2) throw std::invalid_argument("merge: dimension mismatch");
  ObservationSet out{a.n1, a.n2, a.nominal_n + b.nominal_n, a.entries};
  out.entries.insert(out.entries.end(), b.entries.begin(), b.entries.end());
  return out;
}

using ObservationEstimator = std::function<DenseMatrix(const ObservationSet&)>;

// Size of the Poissonized subsample used by fixed_n_wrapper for this seed.
inline std::uint64_t fixed_n_subsample_size(std::size_t n_exact, std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, {0}));
  return detail::draw_poisson(static_cast<double>(n_exact) / 2.0, rng);
}

// Runs a Poissonized estimator on exactly-N data: draw M ~ Poi(N/2); if M <= N
// use M of the observations (after a seeded shuffle) as a Poi(N/2) sample,
// otherwise return the zero matrix.
inline DenseMatrix fixed_n_wrapper(const ObservationSet& obs_exact,
                                   const ObservationEstimator& estimator, std::uint64_t seed) {
  const std::size_t n_exact = obs_exact.entries.size();
  const double floor = 4.0 * std::log(static_cast<double>(obs_exact.n1) *
                                      static_cast<double>(obs_exact.n2));
  if (static_cast<double>(n_exact) < floor) {
    throw std::invalid_argument("fixed_n_wrapper: need N >= 4 log(n1 n2) = " +
                                std::to_string(floor) + " observations, got " +
                                std::to_string(n_exact));
  }
  const std::uint64_t m = fixed_n_subsample_size(n_exact, seed);
  if (m > n_exact) return DenseMatrix(obs_exact.n1, obs_exact.n2, 0.0);

  ObservationSet sub{obs_exact.n1, obs_exact.n2, static_cast<double>(n_exact) / 2.0,
                     obs_exact.entries};
  Rng rng = make_rng(derive_seed(seed, {1}));
  std::shuffle(sub.entries.begin(), sub.entries.end(), rng);
  sub.entries.resize(m);
  return estimator(sub);
}

// Observation file: header "n1 n2 N count", then "i j y" per line, 1-based.
inline void write_observations(std::ostream& os, const ObservationSet& obs) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << obs.n1 << ' ' << obs.n2 << ' ' << obs.nominal_n << ' ' << obs.entries.size() << '\n';
  for (const auto& o : obs.entries) os << o.row + 1 << ' ' << o.col + 1 << ' ' << o.value << '\n';
}

inline ObservationSet read_observations(std::istream& is) {
  ObservationSet obs;
  std::size_t count = 0;
  if (!(is >> obs.n1 >> obs.n2 >> obs.nominal_n >> count) || obs.n1 == 0 || obs.n2 == 0)
    throw std::runtime_error("read_observations: bad header, expected \"n1 n2 N count\"");
  obs.entries.reserve(count);
  for (std::size_t l = 0; l < count; ++l) {
    std::size_t i = 0, j = 0;
    double y = 0.0;
    if (!(is >> i >> j >> y)) throw std::runtime_error("read_observations: truncated body");
    if (i == 0 || j == 0 || i > obs.n1 || j > obs.n2)
      throw std::runtime_error("read_observations: index out of range on line " +
                               std::to_string(l + 2));
    obs.entries.push_back({i - 1, j - 1, y});
  }
  return obs;
}

}  // namespace biso

#endif  // BISO_SAMPLING_HPP

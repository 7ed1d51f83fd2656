#ifndef BISO_EVALUATION_HPP
#define BISO_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matrix.hpp"
#include "matrix_class.hpp"
#include "permutation.hpp"
#include "rng.hpp"

namespace biso {

enum class FamilyKind { additive, noisy_sorting, sst };

struct Family {
  FamilyKind kind = FamilyKind::additive;
  double lambda_ns = 0.25;  // noisy-sorting gap

  friend bool operator==(const Family&, const Family&) = default;
};

inline std::string to_string(const Family& f) {
  switch (f.kind) {
    case FamilyKind::additive: return "additive";
    case FamilyKind::sst: return "sst";
    case FamilyKind::noisy_sorting: {
      std::string s = std::to_string(f.lambda_ns);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return "noisy-sorting:" + s;
    }
  }
  return "?";
}

// "additive", "sst", "noisy-sorting" or "noisy-sorting:<gap>".
inline Family parse_family(std::string_view s) {
  if (s == "additive") return {FamilyKind::additive};
  if (s == "sst") return {FamilyKind::sst};
  if (s.starts_with("noisy-sorting")) {
    Family f{FamilyKind::noisy_sorting};
    if (s.size() > 13) {
      if (s[13] != ':') throw std::invalid_argument("bad family '" + std::string(s) + "'");
      f.lambda_ns = std::stod(std::string(s.substr(14)));
    }
    if (f.lambda_ns < 0.0 || f.lambda_ns > 0.5)
      throw std::invalid_argument("noisy-sorting gap must lie in [0, 1/2]");
    return f;
  }
  throw std::invalid_argument("unknown family '" + std::string(s) +
                              "' (expected additive, noisy-sorting[:gap] or sst)");
}

// M_star is bivariate isotonic; the matrix actually observed is
// permute_matrix(M_star, pi_star, sigma_star).
struct GroundTruth {
  DenseMatrix m_star;
  Permutation pi_star;
  Permutation sigma_star;
  Family family;

  DenseMatrix observed() const { return permute_matrix(m_star, pi_star, sigma_star); }
};

// M(i, j) = clamp((x_i + y_j) / 2) for non-decreasing x, y.
inline DenseMatrix additive_matrix(std::span<const double> x, std::span<const double> y) {
  DenseMatrix m(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) m(i, j) = std::clamp((x[i] + y[j]) / 2.0, 0.0, 1.0);
  return m;
}

// Pairwise-comparison frame (rows non-decreasing, columns non-increasing).
inline DenseMatrix noisy_sorting_pairwise(std::size_t n, double gap) {
  DenseMatrix m(n, n, 0.5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i < j) m(i, j) = 0.5 + gap;
      else if (i > j) m(i, j) = 0.5 - gap;
  return m;
}

inline double sst_link(double t) { return std::clamp(0.5 + t / 2.0, 0.0, 1.0); }

// M(i, j) = F(x_j - x_i) for non-decreasing x; satisfies M + M^T = 11^T.
inline DenseMatrix sst_pairwise(std::span<const double> x) {
  const std::size_t n = x.size();
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = i == j ? 0.5 : sst_link(x[j] - x[i]);
  return m;
}

// Reverses the row order. Maps the pairwise-comparison frame to the
// bivariate isotonic frame and back.
inline DenseMatrix reverse_rows(const DenseMatrix& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto src = m.row(m.rows() - 1 - i);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

inline GroundTruth generate_ground_truth(const Family& family, std::size_t n1, std::size_t n2,
                                         std::uint64_t seed) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("generate_ground_truth: dims must be positive");
  if (family.kind != FamilyKind::additive && n1 != n2)
    throw std::invalid_argument("generate_ground_truth: " + to_string(family) + " requires n1 = n2");
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto sorted_uniform = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = unif(rng);
    std::sort(v.begin(), v.end());
    return v;
  };

  GroundTruth gt;
  gt.family = family;
  switch (family.kind) {
    case FamilyKind::additive: {
      const auto x = sorted_uniform(n1);
      const auto y = sorted_uniform(n2);
      gt.m_star = additive_matrix(x, y);
      break;
    }
    case FamilyKind::noisy_sorting:
      gt.m_star = reverse_rows(noisy_sorting_pairwise(n1, family.lambda_ns));
      break;
    case FamilyKind::sst:
      gt.m_star = reverse_rows(sst_pairwise(sorted_uniform(n1)));
      break;
  }
  gt.pi_star = Permutation::uniform(n1, rng);
  gt.sigma_star = Permutation::uniform(n2, rng);
  return gt;
}

// (1 / (n1 n2)) ||M_hat - M*||_F^2.
inline double frobenius_error(const DenseMatrix& m_star, const DenseMatrix& m_hat) {
  if (m_star.rows() != m_hat.rows() || m_star.cols() != m_hat.cols())
    throw std::invalid_argument("frobenius_error: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < m_star.size(); ++k) {
    const double d = m_hat.data()[k] - m_star.data()[k];
    s += d * d;
  }
  return s / static_cast<double>(m_star.size());
}

namespace detail {

// max_i (1/n2) ||B_{true(i)} - B_{est(i)}||^2 over rows of b.
inline double max_row_gap(const DenseMatrix& b, const Permutation& truth, const Permutation& est) {
  double worst = 0.0;
  for (std::size_t i = 0; i < b.rows(); ++i) {
    const auto r1 = b.row(truth(i));
    const auto r2 = b.row(est(i));
    double s = 0.0;
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const double d = r1[j] - r2[j];
      s += d * d;
    }
    worst = std::max(worst, s / static_cast<double>(b.cols()));
  }
  return worst;
}

}  // namespace detail

// R(M*, pi_hat): worst row-wise mean squared gap between the row the truth
// assigns to observed row i and the row pi_hat assigns to it.
inline double max_row_norm_error(const GroundTruth& truth, const Permutation& pi_hat) {
  if (pi_hat.size() != truth.m_star.rows())
    throw std::invalid_argument("max_row_norm_error: permutation length does not match n1");
  return detail::max_row_gap(truth.m_star, truth.pi_star, pi_hat);
}

inline double max_col_norm_error(const GroundTruth& truth, const Permutation& sigma_hat) {
  if (sigma_hat.size() != truth.m_star.cols())
    throw std::invalid_argument("max_col_norm_error: permutation length does not match n2");
  return detail::max_row_gap(truth.m_star.transpose(), truth.sigma_star, sigma_hat);
}

// max_i v_i - min_i v_i.
inline double variation(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("variation: empty vector");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

struct RatePoint {
  double n = 0.0;
  double error = 0.0;
};

struct RateFit {
  std::vector<std::pair<double, double>> points;  // (ln n, ln error)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares of ln(error) on ln(n).
inline RateFit fit_rate(std::span<const RatePoint> pts) {
  if (pts.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
  RateFit fit;
  for (const auto& p : pts) {
    if (!(p.n > 0.0) || !(p.error > 0.0))
      throw std::invalid_argument("fit_rate: n and error must be positive");
    fit.points.emplace_back(std::log(p.n), std::log(p.error));
  }
  const double m = static_cast<double>(fit.points.size());
  double sx = 0, sy = 0;
  for (auto [x, y] : fit.points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: all n are equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (auto [x, y] : fit.points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

}  // namespace biso

#endif  // BISO_EVALUATION_HPP

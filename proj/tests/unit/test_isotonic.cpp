#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numeric>

#include "biso/isotonic.hpp"
#include "biso/rng.hpp"

using namespace biso;

namespace {

// Best non-decreasing fit among all partitions of [0, n) into consecutive
// blocks whose weighted means are non-decreasing.
std::vector<double> brute_force_isotonic(const std::vector<double>& v, const std::vector<double>& w) {
  const std::size_t n = v.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_fit(n);
  for (std::size_t cuts = 0; cuts < (std::size_t{1} << (n - 1)); ++cuts) {
    std::vector<double> fit(n);
    double prev = -std::numeric_limits<double>::infinity(), sse = 0.0;
    bool ok = true;
    std::size_t start = 0;
    for (std::size_t k = 0; k < n && ok; ++k) {
      const bool ends = k == n - 1 || ((cuts >> k) & 1u);
      if (!ends) continue;
      double sw = 0, swv = 0;
      for (std::size_t t = start; t <= k; ++t) {
        sw += w[t];
        swv += w[t] * v[t];
      }
      const double mean = swv / sw;
      if (mean < prev) ok = false;
      prev = mean;
      for (std::size_t t = start; t <= k; ++t) {
        fit[t] = mean;
        sse += w[t] * (v[t] - mean) * (v[t] - mean);
      }
      start = k + 1;
    }
    if (ok && sse < best) {
      best = sse;
      best_fit = fit;
    }
  }
  return best_fit;
}

// Isotonic regression on the grid order via the max-min formula
//   x(c) = max_{U upper, c in U} min_{L lower, c in L} mean(Y on U ∩ L),
// followed by clamping to [0, 1]. Exponential, for matrices of at most ~9 cells.
DenseMatrix grid_isotonic_oracle(const DenseMatrix& y) {
  const std::size_t n1 = y.rows(), n2 = y.cols(), nc = n1 * n2;
  const auto is_lower = [&](std::uint32_t mask) {
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) {
        if (!((mask >> (i * n2 + j)) & 1u)) continue;
        if (i > 0 && !((mask >> ((i - 1) * n2 + j)) & 1u)) return false;
        if (j > 0 && !((mask >> (i * n2 + j - 1)) & 1u)) return false;
      }
    return true;
  };
  const std::uint32_t full = (std::uint32_t{1} << nc) - 1;
  std::vector<std::uint32_t> lowers, uppers;
  for (std::uint32_t m = 1; m <= full; ++m)
    if (is_lower(m)) lowers.push_back(m);
  for (std::uint32_t m : lowers) uppers.push_back(full & ~m);
  uppers.push_back(full);
  DenseMatrix out(n1, n2);
  for (std::size_t c = 0; c < nc; ++c) {
    double best_u = -std::numeric_limits<double>::infinity();
    for (std::uint32_t u : uppers) {
      if (!((u >> c) & 1u)) continue;
      double worst_l = std::numeric_limits<double>::infinity();
      for (std::uint32_t l : lowers) {
        if (!((l >> c) & 1u)) continue;
        const std::uint32_t both = u & l;
        double s = 0;
        int k = 0;
        for (std::size_t t = 0; t < nc; ++t)
          if ((both >> t) & 1u) {
            s += y.data()[t];
            ++k;
          }
        worst_l = std::min(worst_l, s / k);
      }
      best_u = std::max(best_u, worst_l);
    }
    out.data()[c] = std::clamp(best_u, 0.0, 1.0);
  }
  return out;
}

DenseMatrix random_matrix(std::size_t n1, std::size_t n2, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  DenseMatrix m(n1, n2);
  for (auto& x : m.data()) x = u(rng);
  return m;
}

// Random member of C_BISO: either a normalised cumulative-max field or a 0/1
// indicator of an upper set (an extreme point).
DenseMatrix random_biso(std::size_t n1, std::size_t n2, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DenseMatrix z(n1, n2);
  if (u(rng) < 0.3) {
    std::uniform_int_distribution<int> cut(0, static_cast<int>(n2));
    int c = cut(rng);
    for (std::size_t i = n1; i-- > 0;) {
      for (std::size_t j = 0; j < n2; ++j) z(i, j) = static_cast<int>(j) >= c ? 1.0 : 0.0;
      c = std::min<int>(static_cast<int>(n2), c + static_cast<int>(u(rng) * 2));
    }
    return z;
  }
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      double base = 0.0;
      if (i > 0) base = std::max(base, z(i - 1, j));
      if (j > 0) base = std::max(base, z(i, j - 1));
      z(i, j) = base + u(rng) * u(rng);
    }
  double top = 0.0;
  for (double x : z.data()) top = std::max(top, x);
  const double scale = u(rng);
  if (top > 0)
    for (double& x : z.data()) x = x / top * scale;
  return z;
}

double inner(const DenseMatrix& a, const DenseMatrix& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.data()[k] * b.data()[k];
  return s;
}

DenseMatrix minus(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.size(); ++k) c.data()[k] = a.data()[k] - b.data()[k];
  return c;
}

const ProjectionOptions kDykstra{1e-10, 200000, ProjectionMethod::dykstra};
const ProjectionOptions kAccelerated{1e-10, 200000, ProjectionMethod::accelerated_dual};

}  // namespace

TEST_CASE("pava examples") {
  CHECK(pava(std::vector<double>{1, 2, 3}) == std::vector<double>{1, 2, 3});
  CHECK(pava(std::vector<double>{2, 1}) == std::vector<double>{1.5, 1.5});
  CHECK(pava(std::vector<double>{3, 1, 2}) == std::vector<double>{2, 2, 2});
  CHECK(pava(std::vector<double>{}).empty());
  CHECK_THROWS_AS(pava(std::vector<double>{1, 2}, std::vector<double>{1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(pava(std::vector<double>{1, 2}, std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("weighted pava matches the partition oracle on random inputs") {
  Rng rng = make_rng(31);
  std::uniform_real_distribution<double> val(-2.0, 2.0), wt(0.1, 3.0);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rep % 8;
    std::vector<double> v(n), w(n);
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = val(rng);
      w[k] = wt(rng);
    }
    const auto got = pava(v, w);
    const auto want = brute_force_isotonic(v, w);
    for (std::size_t k = 0; k < n; ++k) CHECK(got[k] == Catch::Approx(want[k]).margin(1e-12));
  }
}

TEST_CASE("pava properties: certificate, non-expansiveness, idempotence") {
  Rng rng = make_rng(8);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rep % 12;
    std::vector<double> v(n), u(n);
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = val(rng);
      u[k] = val(rng);
    }
    const auto fit = pava(v);
    CHECK(pava(fit) == fit);
    for (std::size_t k = 1; k < n; ++k) CHECK(fit[k - 1] <= fit[k]);

    const auto lo = *std::min_element(v.begin(), v.end());
    const auto hi = *std::max_element(v.begin(), v.end());
    std::uniform_real_distribution<double> range(lo, hi);
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> z(n);
      for (auto& x : z) x = range(rng);
      std::sort(z.begin(), z.end());
      double vi = 0;
      for (std::size_t k = 0; k < n; ++k) vi += (v[k] - fit[k]) * (z[k] - fit[k]);
      CHECK(vi <= 1e-8);
    }

    const auto fu = pava(u);
    double d_in = 0, d_out = 0;
    for (std::size_t k = 0; k < n; ++k) {
      d_in += (u[k] - v[k]) * (u[k] - v[k]);
      d_out += (fu[k] - fit[k]) * (fu[k] - fit[k]);
    }
    CHECK(d_out <= d_in + 1e-12);
  }
}

TEST_CASE("project_biso on a feasible matrix is a fixed point after one cycle") {
  const DenseMatrix y{{0.1, 0.2, 0.2}, {0.3, 0.5, 0.9}};
  const auto rep = project_biso(y);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(rep.result == y);
  const auto acc = project_biso(y, {1e-8, 5000, ProjectionMethod::accelerated_dual});
  CHECK(acc.converged);
  CHECK(max_abs_diff(acc.result, y) <= 1e-12);
}

TEST_CASE("project_biso 2x2 example") {
  const DenseMatrix y{{1, 0}, {0, 1}};
  const DenseMatrix want{{1.0 / 3, 1.0 / 3}, {1.0 / 3, 1}};
  REQUIRE(max_abs_diff(grid_isotonic_oracle(y), want) <= 1e-15);
  for (const auto& opts : {kDykstra, kAccelerated}) {
    const auto rep = project_biso(y, opts);
    CHECK(rep.converged);
    CHECK(max_abs_diff(rep.result, want) <= 1e-8);
  }
  Rng rng = make_rng(2);
  const DenseMatrix got = project_biso(y).result;
  for (int t = 0; t < 1000; ++t) {
    const DenseMatrix z = random_biso(2, 2, rng);
    CHECK(inner(minus(y, got), minus(z, got)) <= 1e-8);
  }
}

TEST_CASE("project_biso on one row or one column is clamped pava") {
  Rng rng = make_rng(17);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rep % 9;
    const DenseMatrix y = random_matrix(1, n, rng, -0.5, 1.5);
    auto want = pava(y.row(0));
    for (double& x : want) x = std::clamp(x, 0.0, 1.0);
    for (const auto& opts : {kDykstra, kAccelerated}) {
      const auto row = project_biso(y, opts).result;
      const auto col = project_biso(y.transpose(), opts).result;
      for (std::size_t k = 0; k < n; ++k) {
        CHECK(row(0, k) == Catch::Approx(want[k]).margin(1e-8));
        CHECK(col(k, 0) == Catch::Approx(want[k]).margin(1e-8));
      }
    }
  }
}

TEST_CASE("project_biso matches the max-min oracle on small grids") {
  Rng rng = make_rng(99);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n1 = 1 + rep % 3, n2 = 1 + (rep / 3) % 3;
    const DenseMatrix y = random_matrix(n1, n2, rng, -0.5, 1.5);
    const DenseMatrix want = grid_isotonic_oracle(y);
    for (const auto& opts : {kDykstra, kAccelerated}) {
      const auto rep_out = project_biso(y, opts);
      CHECK(rep_out.converged);
      CHECK(max_abs_diff(rep_out.result, want) <= 1e-7);
    }
  }
}

TEST_CASE("project_biso certificate on random matrices") {
  Rng rng = make_rng(123);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n1 = 2 + rep % 7, n2 = 2 + (rep * 3) % 7;
    const DenseMatrix y = random_matrix(n1, n2, rng, -1.0, 2.0);
    for (const auto& opts : {ProjectionOptions{}, ProjectionOptions{1e-8, 5000, ProjectionMethod::accelerated_dual}}) {
      const auto rep_out = project_biso(y, opts);
      CHECK(rep_out.converged);
      CHECK(rep_out.residual <= opts.tol);
      CHECK(is_biso(rep_out.result, 1e-8));
      const DenseMatrix g = minus(y, rep_out.result);
      const double bound = 1e-6 * (1.0 + y.frobenius_norm());
      for (int t = 0; t < 1000; ++t) CHECK(inner(g, minus(random_biso(n1, n2, rng), rep_out.result)) <= bound);
    }
  }
}

TEST_CASE("accelerated solver reports a small duality gap") {
  Rng rng = make_rng(5);
  const DenseMatrix y = random_matrix(30, 20, rng, -0.5, 1.5);
  const auto acc = project_biso(y, {1e-9, 5000, ProjectionMethod::accelerated_dual});
  REQUIRE(acc.converged);
  CHECK(acc.duality_gap <= 1e-9 * (1.0 + 0.5 * std::pow(y.frobenius_norm(), 2)));
  const auto dyk = project_biso(y, {1e-10, 100000, ProjectionMethod::dykstra});
  CHECK(max_abs_diff(acc.result, dyk.result) <= 1e-6);
  CHECK(std::isnan(dyk.duality_gap));
}

TEST_CASE("non-convergence is reported, not thrown") {
  Rng rng = make_rng(6);
  const DenseMatrix y = random_matrix(12, 12, rng, -1.0, 2.0);
  const auto rep = project_biso(y, {1e-14, 2, ProjectionMethod::dykstra});
  CHECK(rep.iterations == 2);
  CHECK_FALSE(rep.converged);
  CHECK_THROWS_AS(project_biso(y, {0.0, 10}), std::invalid_argument);
}

TEST_CASE("project_biso_permuted") {
  Rng rng = make_rng(42);
  const DenseMatrix y = random_matrix(3, 3, rng, -0.2, 1.2);
  const Permutation id3 = Permutation::identity(3);
  CHECK(project_biso_permuted(y, id3, id3) == project_biso(y).result);
  CHECK_THROWS_AS(project_biso_permuted(y, Permutation::identity(2), id3), std::invalid_argument);

  for (int rep = 0; rep < 30; ++rep) {
    const DenseMatrix b = random_biso(4, 5, rng);
    const Permutation pi = Permutation::uniform(4, rng), sigma = Permutation::uniform(5, rng);
    const DenseMatrix obs = permute_matrix(b, pi, sigma);
    CHECK(max_abs_diff(project_biso_permuted(obs, pi, sigma), obs) <= 1e-8);
  }

  for (int rep = 0; rep < 20; ++rep) {
    const DenseMatrix y3 = random_matrix(3, 3, rng, -0.5, 1.5);
    const Permutation pi = Permutation::uniform(3, rng), sigma = Permutation::uniform(3, rng);
    const DenseMatrix m_hat = project_biso_permuted(y3, pi, sigma);
    const DenseMatrix latent = latent_view(m_hat, pi, sigma);
    CHECK(is_biso(latent, 1e-8));
    const DenseMatrix g = minus(latent_view(y3, pi, sigma), latent);
    for (int t = 0; t < 1000; ++t) CHECK(inner(g, minus(random_biso(3, 3, rng), latent)) <= 1e-6 * (1 + y3.frobenius_norm()));
  }
}

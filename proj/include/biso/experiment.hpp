#ifndef BISO_EXPERIMENT_HPP
#define BISO_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "estimators.hpp"
#include "evaluation.hpp"
#include "isotonic.hpp"
#include "matrix.hpp"
#include "permutation.hpp"
#include "rng.hpp"
#include "sampling.hpp"

namespace biso {

// Invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct SampleSizeRule {
  enum class Kind { fixed, proportional };
  Kind kind = Kind::proportional;
  double value = 1.0;  // N, or c in N = c n1 n2

  double operator()(std::size_t n1, std::size_t n2) const {
    return kind == Kind::fixed ? value : value * static_cast<double>(n1) * static_cast<double>(n2);
  }
  friend bool operator==(const SampleSizeRule&, const SampleSizeRule&) = default;
};

struct EstimatorSettings {
  double zeta = 1.0;
  double threshold_scale = kAnalysisThresholdScale;
  ProjectionOptions projection;
  std::uint64_t seed = 0;
};

struct EstimateOutput {
  DenseMatrix m_hat;
  Permutation pi_hat;
  Permutation sigma_hat;
  bool fallback = false;
  bool converged = true;
};

// Estimators that use a single sample: borda, refsort, project-only. refsort
// takes the column order as known (`known_sigma`, identity when absent).
inline EstimateOutput estimate_single(EstimatorKind kind, const ObservationSet& obs,
                                      const EstimatorSettings& settings,
                                      const std::optional<Permutation>& known_sigma = std::nullopt) {
  const DenseMatrix y = build_observation_matrix(obs);
  EstimateOutput out;
  switch (kind) {
    case EstimatorKind::borda:
      out.pi_hat = borda_sort(y);
      out.sigma_hat = borda_sort(y.transpose());
      break;
    case EstimatorKind::refsort: {
      out.sigma_hat = known_sigma ? *known_sigma : Permutation::identity(obs.n2);
      const DenseMatrix cols_sorted = latent_view(y, Permutation::identity(obs.n1), out.sigma_hat);
      const Thresholds th =
          compute_thresholds(obs.n1, obs.n2, obs.nominal_n, settings.zeta, settings.threshold_scale);
      auto res = sort_partial_sums_detailed(cols_sorted, reference_blocking(obs.n1, obs.n2, obs.nominal_n),
                                            th, TopoMode::deterministic_min_index, settings.seed);
      out.pi_hat = std::move(res.ranks);
      out.fallback = res.fallback;
      break;
    }
    case EstimatorKind::project_only:
      out.pi_hat = Permutation::identity(obs.n1);
      out.sigma_hat = Permutation::identity(obs.n2);
      break;
    case EstimatorKind::tds:
      throw std::invalid_argument("estimate_single: tds needs two sub-samples");
  }
  auto rep = project_biso_permuted_report(y, out.pi_hat, out.sigma_hat, settings.projection);
  out.m_hat = std::move(rep.result);
  out.converged = rep.converged;
  return out;
}

// Two-dimensional sorting on two independent sub-samples; the final
// projection uses the pooled observations.
inline EstimateOutput estimate_tds(const ObservationSet& half1, const ObservationSet& half2,
                                   const EstimatorSettings& settings) {
  const DenseMatrix y1 = build_observation_matrix(half1);
  const DenseMatrix y2 = build_observation_matrix(half2);
  const std::size_t n1 = half1.n1, n2 = half1.n2;
  const Thresholds th_rows =
      compute_thresholds(n1, n2, half2.nominal_n, settings.zeta, settings.threshold_scale);
  const Thresholds th_cols =
      compute_thresholds(n2, n1, half2.nominal_n, settings.zeta, settings.threshold_scale);
  TdsEstimate est = two_dimensional_sort(y1, y2, th_rows, th_cols);
  EstimateOutput out;
  out.fallback = est.diagnostics.row_fallback || est.diagnostics.col_fallback;
  auto rep = project_biso_permuted_report(build_observation_matrix(merge(half1, half2)), est.pi_hat,
                                          est.sigma_hat, settings.projection);
  out.m_hat = std::move(rep.result);
  out.converged = rep.converged;
  out.pi_hat = std::move(est.pi_hat);
  out.sigma_hat = std::move(est.sigma_hat);
  return out;
}

// Any estimator on one observation set; tds thins it into two halves.
inline EstimateOutput estimate_from_observations(EstimatorKind kind, const ObservationSet& obs,
                                                 const EstimatorSettings& settings,
                                                 const std::optional<Permutation>& known_sigma = std::nullopt) {
  if (kind != EstimatorKind::tds) return estimate_single(kind, obs, settings, known_sigma);
  auto [a, b] = thin_split(obs, derive_seed(settings.seed, {stage_key(Stage::split)}));
  return estimate_tds(a, b, settings);
}

struct ExperimentConfig {
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  SampleSizeRule n_rule;
  NoiseModel noise;
  std::vector<EstimatorKind> estimators;
  Family family;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  SplitMode split = SplitMode::independent_poisson;
  std::string output_path;
  std::size_t workers = 1;
  double threshold_scale = kAnalysisThresholdScale;
  ProjectionOptions projection{1e-8, 5000, ProjectionMethod::accelerated_dual};
  // Keep M* fixed across trials (fresh noise only) instead of redrawing it.
  bool fixed_truth = false;
  // runtime_ms is wall-clock and so the only non-reproducible column; off writes 0.
  bool timing = true;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.dims == b.dims && a.n_rule == b.n_rule && a.noise == b.noise &&
           a.estimators == b.estimators && a.family == b.family && a.trials == b.trials &&
           a.seed == b.seed && a.split == b.split && a.output_path == b.output_path &&
           a.workers == b.workers && a.threshold_scale == b.threshold_scale &&
           a.projection.tol == b.projection.tol &&
           a.projection.max_cycles == b.projection.max_cycles &&
           a.projection.method == b.projection.method && a.fixed_truth == b.fixed_truth &&
           a.timing == b.timing;
  }
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.dims.empty()) throw ConfigError("dims", "at least one n1xn2 pair is required");
  for (auto [n1, n2] : cfg.dims) {
    if (n1 == 0 || n2 == 0) throw ConfigError("dims", "dimensions must be positive");
    if (cfg.family.kind != FamilyKind::additive && n1 != n2)
      throw ConfigError("dims", to_string(cfg.family) + " requires square dims");
  }
  if (cfg.estimators.empty()) throw ConfigError("estimators", "at least one estimator is required");
  if (cfg.trials < 1) throw ConfigError("trials", "must be >= 1");
  if (cfg.workers < 1) throw ConfigError("workers", "must be >= 1");
  if (!(cfg.n_rule.value > 0.0)) throw ConfigError("n_rule", "N must be positive");
  if (!(cfg.noise.zeta >= 0.0)) throw ConfigError("zeta", "must be nonnegative");
  if (!(cfg.threshold_scale > 0.0)) throw ConfigError("threshold_scale", "must be positive");
  if (!(cfg.projection.tol > 0.0)) throw ConfigError("tol", "must be positive");
  if (cfg.projection.max_cycles < 1) throw ConfigError("max_cycles", "must be >= 1");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    const auto piece = trim(s.substr(start, pos == std::string_view::npos ? s.size() - start : pos - start));
    if (!piece.empty()) out.push_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& field, const std::string& text) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      value = static_cast<T>(std::stod(text, &used));
      if (used != text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(field, "expected a number, got '" + text + "'");
    }
  } else {
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || p != text.data() + text.size())
      throw ConfigError(field, "expected a nonnegative integer, got '" + text + "'");
  }
  return value;
}

inline std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

inline bool parse_bool(const std::string& field, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(field, "expected true/false, got '" + v + "'");
}

}  // namespace detail

inline std::vector<std::pair<std::size_t, std::size_t>> parse_dims(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  for (const auto& item : detail::split_list(text)) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw ConfigError("dims", "expected n1xn2, got '" + item + "'");
    dims.emplace_back(detail::parse_number<std::size_t>("dims", item.substr(0, x)),
                      detail::parse_number<std::size_t>("dims", item.substr(x + 1)));
  }
  return dims;
}

inline SampleSizeRule parse_n_rule(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("n_rule", "expected fixed:N or prop:c");
  const std::string kind = text.substr(0, colon);
  SampleSizeRule rule;
  if (kind == "fixed") rule.kind = SampleSizeRule::Kind::fixed;
  else if (kind == "prop") rule.kind = SampleSizeRule::Kind::proportional;
  else throw ConfigError("n_rule", "expected fixed:N or prop:c, got '" + text + "'");
  rule.value = detail::parse_number<double>("n_rule", text.substr(colon + 1));
  return rule;
}

inline NoiseKind parse_noise(const std::string& text) {
  if (text == "gaussian") return NoiseKind::gaussian;
  if (text == "bernoulli") return NoiseKind::bernoulli;
  throw ConfigError("noise", "expected gaussian or bernoulli, got '" + text + "'");
}

inline ProjectionMethod parse_projection_method(const std::string& text) {
  if (text == "dykstra") return ProjectionMethod::dykstra;
  if (text == "accelerated") return ProjectionMethod::accelerated_dual;
  throw ConfigError("projection", "expected dykstra or accelerated, got '" + text + "'");
}

inline SplitMode parse_split(const std::string& text) {
  if (text == "independent") return SplitMode::independent_poisson;
  if (text == "thinning") return SplitMode::thinning;
  throw ConfigError("split", "expected independent or thinning, got '" + text + "'");
}

// Applies one key=value setting.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "dims") cfg.dims = parse_dims(value);
    else if (key == "n_rule") cfg.n_rule = parse_n_rule(value);
    else if (key == "noise") cfg.noise.kind = parse_noise(value);
    else if (key == "zeta") cfg.noise.zeta = detail::parse_number<double>(key, value);
    else if (key == "estimators") {
      cfg.estimators.clear();
      for (const auto& e : detail::split_list(value)) cfg.estimators.push_back(parse_estimator(e));
    } else if (key == "family") cfg.family = parse_family(value);
    else if (key == "trials") cfg.trials = detail::parse_number<std::size_t>(key, value);
    else if (key == "seed") cfg.seed = detail::parse_number<std::uint64_t>(key, value);
    else if (key == "split") cfg.split = parse_split(value);
    else if (key == "out") cfg.output_path = value;
    else if (key == "workers") cfg.workers = detail::parse_number<std::size_t>(key, value);
    else if (key == "threshold_scale") cfg.threshold_scale = detail::parse_number<double>(key, value);
    else if (key == "tol") cfg.projection.tol = detail::parse_number<double>(key, value);
    else if (key == "projection") cfg.projection.method = parse_projection_method(value);
    else if (key == "max_cycles") cfg.projection.max_cycles = detail::parse_number<int>(key, value);
    else if (key == "fixed_truth") cfg.fixed_truth = detail::parse_bool(key, value);
    else if (key == "timing") cfg.timing = detail::parse_bool(key, value);
    else throw ConfigError(key, "unknown configuration key");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

// Flat key=value text; '#' starts a comment.
inline ExperimentConfig parse_config(std::istream& is, ExperimentConfig cfg = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key=value");
    apply_setting(cfg, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
  }
  return cfg;
}

inline void emit_config(std::ostream& os, const ExperimentConfig& cfg) {
  os << "dims=";
  for (std::size_t k = 0; k < cfg.dims.size(); ++k)
    os << (k ? "," : "") << cfg.dims[k].first << 'x' << cfg.dims[k].second;
  os << "\nn_rule=" << (cfg.n_rule.kind == SampleSizeRule::Kind::fixed ? "fixed:" : "prop:")
     << detail::format_double(cfg.n_rule.value) << '\n';
  os << "noise=" << (cfg.noise.kind == NoiseKind::gaussian ? "gaussian" : "bernoulli") << '\n';
  os << "zeta=" << detail::format_double(cfg.noise.zeta) << '\n';
  os << "estimators=";
  for (std::size_t k = 0; k < cfg.estimators.size(); ++k)
    os << (k ? "," : "") << to_string(cfg.estimators[k]);
  os << "\nfamily=" << to_string(cfg.family) << '\n';
  os << "trials=" << cfg.trials << '\n';
  os << "seed=" << cfg.seed << '\n';
  os << "split=" << (cfg.split == SplitMode::independent_poisson ? "independent" : "thinning") << '\n';
  if (!cfg.output_path.empty()) os << "out=" << cfg.output_path << '\n';
  os << "workers=" << cfg.workers << '\n';
  os << "threshold_scale=" << detail::format_double(cfg.threshold_scale) << '\n';
  os << "tol=" << detail::format_double(cfg.projection.tol) << '\n';
  os << "max_cycles=" << cfg.projection.max_cycles << '\n';
  os << "projection="
     << (cfg.projection.method == ProjectionMethod::dykstra ? "dykstra" : "accelerated") << '\n';
  os << "fixed_truth=" << (cfg.fixed_truth ? "true" : "false") << '\n';
  os << "timing=" << (cfg.timing ? "true" : "false") << '\n';
}

struct ResultRow {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double n_expected = 0.0;
  std::size_t trial = 0;
  EstimatorKind estimator = EstimatorKind::borda;
  double frobenius = 0.0;
  double max_row = 0.0;
  double max_col = 0.0;
  double runtime_ms = 0.0;
  bool fallback = false;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "n1,n2,N,trial,estimator,frobenius,max_row,max_col,runtime_ms,fallback";

inline void write_csv_row(std::ostream& os, const ResultRow& r) {
  os << r.n1 << ',' << r.n2 << ',' << detail::format_double(r.n_expected) << ',' << r.trial << ','
     << to_string(r.estimator) << ',' << detail::format_double(r.frobenius) << ','
     << detail::format_double(r.max_row) << ',' << detail::format_double(r.max_col) << ','
     << detail::format_double(r.runtime_ms) << ',' << (r.fallback ? 1 : 0) << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) write_csv_row(os, r);
}

inline std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::trim(line) != kCsvHeader)
    throw std::runtime_error("read_csv: missing or unexpected header");
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_list(line);
    if (f.size() != 10)
      throw std::runtime_error("read_csv: line " + std::to_string(lineno) + " has " +
                               std::to_string(f.size()) + " fields, expected 10");
    ResultRow r;
    r.n1 = detail::parse_number<std::size_t>("n1", f[0]);
    r.n2 = detail::parse_number<std::size_t>("n2", f[1]);
    r.n_expected = detail::parse_number<double>("N", f[2]);
    r.trial = detail::parse_number<std::size_t>("trial", f[3]);
    r.estimator = parse_estimator(f[4]);
    r.frobenius = detail::parse_number<double>("frobenius", f[5]);
    r.max_row = detail::parse_number<double>("max_row", f[6]);
    r.max_col = detail::parse_number<double>("max_col", f[7]);
    r.runtime_ms = detail::parse_number<double>("runtime_ms", f[8]);
    r.fallback = f[9] == "1";
    rows.push_back(r);
  }
  return rows;
}

// Runs every (dim, trial) cell; all estimators in a cell share the ground
// truth and the observations. Output is ordered by (dim, trial, estimator)
// regardless of the worker count.
// `on_cell` (optional) is called once per finished cell, serialised.
inline std::vector<ResultRow> run_experiment(
    const ExperimentConfig& cfg,
    const std::function<void(std::size_t n1, std::size_t n2, std::size_t trial)>& on_cell = {}) {
  validate(cfg);
  const std::size_t ne = cfg.estimators.size();
  const std::size_t cells = cfg.dims.size() * cfg.trials;
  std::vector<ResultRow> rows(cells * ne);
  std::mutex log_mutex;

  const auto run_cell = [&](std::size_t cell) {
    const std::size_t d = cell / cfg.trials, trial = cell % cfg.trials;
    const auto [n1, n2] = cfg.dims[d];
    const std::uint64_t truth_trial = cfg.fixed_truth ? 0 : trial;
    const GroundTruth gt = generate_ground_truth(
        cfg.family, n1, n2, derive_seed(cfg.seed, {d, truth_trial, stage_key(Stage::ground_truth)}));
    const DenseMatrix m_obs = gt.observed();
    const double n_expected = cfg.n_rule(n1, n2);

    std::optional<ObservationSet> single;
    std::optional<std::pair<ObservationSet, ObservationSet>> halves;

    for (std::size_t e = 0; e < ne; ++e) {
      const EstimatorKind kind = cfg.estimators[e];
      EstimatorSettings settings{cfg.noise.zeta, cfg.threshold_scale, cfg.projection,
                                 derive_seed(cfg.seed, {d, trial, stage_key(Stage::estimator)})};
      const auto start = std::chrono::steady_clock::now();
      EstimateOutput out;
      if (kind == EstimatorKind::tds) {
        if (!halves)
          halves = split_sample(m_obs, cfg.noise, n_expected, cfg.split,
                                derive_seed(cfg.seed, {d, trial, stage_key(Stage::split)}));
        out = estimate_tds(halves->first, halves->second, settings);
      } else {
        if (!single)
          single = sample_observations(m_obs, cfg.noise, n_expected,
                                       derive_seed(cfg.seed, {d, trial, stage_key(Stage::sample)}));
        out = estimate_single(kind, *single, settings, gt.sigma_star);
      }
      const auto stop = std::chrono::steady_clock::now();

      ResultRow& row = rows[cell * ne + e];
      row.n1 = n1;
      row.n2 = n2;
      row.n_expected = n_expected;
      row.trial = trial;
      row.estimator = kind;
      row.frobenius = frobenius_error(m_obs, out.m_hat);
      row.max_row = max_row_norm_error(gt, out.pi_hat);
      row.max_col = max_col_norm_error(gt, out.sigma_hat);
      row.runtime_ms =
          cfg.timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
      row.fallback = out.fallback;
    }
    if (on_cell) {
      std::lock_guard lock(log_mutex);
      on_cell(n1, n2, trial);
    }
  };

  const std::size_t workers = std::min(cfg.workers, std::max<std::size_t>(cells, 1));
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < cells; c = next++) {
        try {
          run_cell(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

enum class Metric { frobenius, max_row, max_col };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::frobenius: return "frobenius";
    case Metric::max_row: return "max_row";
    case Metric::max_col: return "max_col";
  }
  return "?";
}

struct RateSummary {
  EstimatorKind estimator = EstimatorKind::borda;
  Metric metric = Metric::frobenius;
  std::vector<RatePoint> means;  // (n, mean metric) per square dim
  RateFit fit;
};

inline double metric_value(const ResultRow& r, Metric m) {
  switch (m) {
    case Metric::frobenius: return r.frobenius;
    case Metric::max_row: return r.max_row;
    case Metric::max_col: return r.max_col;
  }
  return 0.0;
}

// Per estimator: arithmetic mean of the metric per square dimension n, then a
// log-log fit against n. Needs at least three distinct square dims each.
inline std::vector<RateSummary> summarize_rates(const std::vector<ResultRow>& rows,
                                                Metric metric = Metric::frobenius) {
  std::map<EstimatorKind, std::map<std::size_t, std::pair<double, std::size_t>>> acc;
  for (const auto& r : rows) {
    if (r.n1 != r.n2) continue;
    auto& slot = acc[r.estimator][r.n1];
    slot.first += metric_value(r, metric);
    ++slot.second;
  }
  std::vector<RateSummary> out;
  for (const auto& [kind, by_n] : acc) {
    if (by_n.size() < 3)
      throw std::invalid_argument("summarize_rates: estimator " + std::string(to_string(kind)) +
                                  " has " + std::to_string(by_n.size()) +
                                  " square dims, need at least 3");
    RateSummary s;
    s.estimator = kind;
    s.metric = metric;
    for (const auto& [n, sum_count] : by_n)
      s.means.push_back({static_cast<double>(n), sum_count.first / static_cast<double>(sum_count.second)});
    s.fit = fit_rate(s.means);
    out.push_back(std::move(s));
  }
  if (out.empty()) throw std::invalid_argument("summarize_rates: no square-dimension rows");
  return out;
}

inline void write_rates_csv(std::ostream& os, const std::vector<RateSummary>& rates) {
  os << "estimator,metric,slope,intercept,r_squared,points\n";
  for (const auto& s : rates) {
    os << to_string(s.estimator) << ',' << to_string(s.metric) << ','
       << detail::format_double(s.fit.slope) << ',' << detail::format_double(s.fit.intercept) << ','
       << detail::format_double(s.fit.r_squared) << ',' << s.means.size() << '\n';
  }
}

}  // namespace biso

#endif  // BISO_EXPERIMENT_HPP

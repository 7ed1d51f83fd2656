#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "biso/biso.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Opens `path` for writing, or returns stdout when the path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

void write_ranks(std::ostream& os, const char* label, const biso::Permutation& p) {
  os << label;
  for (std::size_t r : p.ranks()) os << ' ' << r + 1;
  os << '\n';
}

biso::Permutation read_ranks(const std::string& text, std::size_t n) {
  std::istringstream is(text);
  std::vector<std::size_t> r;
  for (std::size_t x; is >> x;) {
    if (x == 0) throw biso::ConfigError("known-sigma", "ranks are 1-based");
    r.push_back(x - 1);
  }
  if (r.size() != n)
    throw biso::ConfigError("known-sigma", "expected " + std::to_string(n) + " ranks, got " +
                                               std::to_string(r.size()));
  try {
    return biso::Permutation(std::move(r));
  } catch (const std::invalid_argument& e) {
    throw biso::ConfigError("known-sigma", e.what());
  }
}

struct ExperimentFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool quiet = false;
};

// Registers an option whose value, when given, becomes a key=value override.
void add_override(CLI::App* sub, ExperimentFlags& flags, const std::string& flag,
                  const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>(
      flag, [&flags, key](const std::string& v) { flags.overrides.emplace_back(key, v); }, help);
}

void add_experiment_options(CLI::App* sub, ExperimentFlags& flags, std::vector<std::string>& estimators) {
  sub->add_option("--config", flags.config_path, "key=value configuration file");
  add_override(sub, flags, "--seed", "seed", "master seed");
  add_override(sub, flags, "--trials", "trials", "trials per dimension");
  add_override(sub, flags, "--out", "out", "CSV output path (default stdout)");
  sub->add_option("--estimator", estimators, "borda, refsort, tds or project-only (repeatable)")
      ->delimiter(',');
  add_override(sub, flags, "--dims", "dims", "comma list of n1xn2");
  add_override(sub, flags, "--noise", "noise", "gaussian or bernoulli");
  add_override(sub, flags, "--zeta", "zeta", "noise proxy bound");
  add_override(sub, flags, "--n-rule", "n_rule", "fixed:N or prop:c");
  add_override(sub, flags, "--split", "split", "independent or thinning");
  add_override(sub, flags, "--workers", "workers", "worker threads");
  add_override(sub, flags, "--family", "family", "additive, sst or noisy-sorting[:gap]");
  add_override(sub, flags, "--threshold-scale", "threshold_scale", "threshold leading scale");
  add_override(sub, flags, "--projection", "projection", "dykstra or accelerated");
  add_override(sub, flags, "--tol", "tol", "projection tolerance");
  add_override(sub, flags, "--max-cycles", "max_cycles", "projection cycle cap");
  add_override(sub, flags, "--fixed-truth", "fixed_truth", "keep M* fixed across trials");
  add_override(sub, flags, "--timing", "timing", "record wall-clock runtime_ms");
  sub->add_flag("--quiet", flags.quiet, "no per-cell log on stderr");
}

biso::ExperimentConfig resolve_config(const ExperimentFlags& flags,
                                      const std::vector<std::string>& estimators) {
  biso::ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw biso::ConfigError("config", "cannot open '" + flags.config_path + "'");
    cfg = biso::parse_config(in);
  }
  for (const auto& [k, v] : flags.overrides) biso::apply_setting(cfg, k, v);
  if (!estimators.empty()) {
    std::string joined;
    for (const auto& e : estimators) joined += (joined.empty() ? "" : ",") + e;
    biso::apply_setting(cfg, "estimators", joined);
  }
  biso::validate(cfg);
  return cfg;
}

std::vector<double> parse_real_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : biso::detail::split_list(text))
    out.push_back(biso::detail::parse_number<double>(field, item));
  if (out.empty()) throw biso::ConfigError(field, "empty list");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& field, const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : biso::detail::split_list(text))
    out.push_back(biso::detail::parse_number<std::size_t>(field, item));
  if (out.empty()) throw biso::ConfigError(field, "empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation of bivariate isotonic matrices with unknown permutations"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "draw ground truth and Poissonized observations");
  std::string sim_dims = "32x32", sim_family = "additive", sim_noise = "gaussian", sim_rule = "prop:1";
  std::string sim_out, sim_truth_out;
  std::uint64_t sim_seed = 0;
  double sim_zeta = 1.0;
  simulate->add_option("--dims", sim_dims, "n1xn2");
  simulate->add_option("--family", sim_family, "additive, sst or noisy-sorting[:gap]");
  simulate->add_option("--noise", sim_noise, "gaussian or bernoulli");
  simulate->add_option("--zeta", sim_zeta, "noise proxy bound");
  simulate->add_option("--n-rule", sim_rule, "fixed:N or prop:c");
  simulate->add_option("--seed", sim_seed, "seed");
  simulate->add_option("--out", sim_out, "observation file (default stdout)");
  simulate->add_option("--truth-out", sim_truth_out, "write M*, pi*, sigma* in observed order");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "run one estimator on an observation file");
  std::string est_input, est_out, est_name = "tds", est_known_sigma;
  std::uint64_t est_seed = 0;
  double est_zeta = 1.0, est_scale = biso::kAnalysisThresholdScale, est_tol = 1e-8;
  std::string est_projection = "accelerated";
  int est_cycles = 5000;
  estimate->add_option("--input", est_input, "observation file")->required();
  estimate->add_option("--estimator", est_name, "borda, refsort, tds or project-only");
  estimate->add_option("--seed", est_seed, "seed");
  estimate->add_option("--zeta", est_zeta, "noise proxy bound");
  estimate->add_option("--threshold-scale", est_scale, "threshold leading scale");
  estimate->add_option("--projection", est_projection, "dykstra or accelerated");
  estimate->add_option("--tol", est_tol, "projection tolerance");
  estimate->add_option("--max-cycles", est_cycles, "projection cycle cap");
  estimate->add_option("--known-sigma", est_known_sigma, "refsort column ranks, 1-based, space separated");
  estimate->add_option("--out", est_out, "estimate output (default stdout)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Monte-Carlo grid, one CSV row per cell and estimator");
  ExperimentFlags exp_flags;
  std::vector<std::string> exp_estimators;
  add_experiment_options(experiment, exp_flags, exp_estimators);

  // rates
  auto* rates = app.add_subcommand("rates", "log-log rate fits from an experiment CSV");
  std::string rates_input, rates_out, rates_metric = "frobenius";
  rates->add_option("--input", rates_input, "experiment CSV")->required();
  rates->add_option("--metric", rates_metric, "frobenius, max_row or max_col");
  rates->add_option("--out", rates_out, "output CSV (default stdout)");

  // conetest
  auto* conetest = app.add_subcommand("conetest", "chi-square sweep for the bump mixtures");
  std::string ct_lambda = "1", ct_delta = "0.25", ct_r = "1", ct_s = "10", ct_out;
  std::size_t ct_trials = 10000;
  std::uint64_t ct_seed = 0;
  conetest->add_option("--lambda", ct_lambda, "comma list of Poisson rates");
  conetest->add_option("--delta", ct_delta, "comma list of bump heights");
  conetest->add_option("--r", ct_r, "comma list of block lengths");
  conetest->add_option("--s", ct_s, "comma list of block counts");
  conetest->add_option("--trials", ct_trials, "Monte-Carlo trials per point (0 skips)");
  conetest->add_option("--seed", ct_seed, "seed");
  conetest->add_option("--out", ct_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) {
      biso::ExperimentConfig scratch;
      biso::apply_setting(scratch, "dims", sim_dims);
      biso::apply_setting(scratch, "family", sim_family);
      biso::apply_setting(scratch, "noise", sim_noise);
      biso::apply_setting(scratch, "n_rule", sim_rule);
      if (scratch.dims.size() != 1) throw biso::ConfigError("dims", "simulate takes a single n1xn2");
      const auto [n1, n2] = scratch.dims.front();
      const biso::GroundTruth gt = biso::generate_ground_truth(
          scratch.family, n1, n2, biso::derive_seed(sim_seed, {biso::stage_key(biso::Stage::ground_truth)}));
      const biso::NoiseModel noise{scratch.noise.kind, sim_zeta};
      const auto obs = biso::sample_observations(
          gt.observed(), noise, scratch.n_rule(n1, n2),
          biso::derive_seed(sim_seed, {biso::stage_key(biso::Stage::sample)}));
      Output out(sim_out);
      biso::write_observations(out.stream(), obs);
      if (!sim_truth_out.empty()) {
        Output truth(sim_truth_out);
        biso::write_matrix(truth.stream(), gt.observed());
        write_ranks(truth.stream(), "pi", gt.pi_star);
        write_ranks(truth.stream(), "sigma", gt.sigma_star);
      }
      return 0;
    }

    if (*estimate) {
      biso::EstimatorKind kind;
      biso::ProjectionOptions proj{est_tol, est_cycles, biso::ProjectionMethod::accelerated_dual};
      try {
        kind = biso::parse_estimator(est_name);
        proj.method = biso::parse_projection_method(est_projection);
      } catch (const std::invalid_argument& e) {
        throw biso::ConfigError("estimator", e.what());
      }
      auto in = open_input(est_input);
      const biso::ObservationSet obs = biso::read_observations(in);
      std::optional<biso::Permutation> known;
      if (!est_known_sigma.empty()) known = read_ranks(est_known_sigma, obs.n2);
      const biso::EstimatorSettings settings{est_zeta, est_scale, proj, est_seed};
      const auto res = biso::estimate_from_observations(kind, obs, settings, known);
      Output out(est_out);
      biso::write_matrix(out.stream(), res.m_hat);
      write_ranks(out.stream(), "pi", res.pi_hat);
      write_ranks(out.stream(), "sigma", res.sigma_hat);
      out.stream() << "fallback " << (res.fallback ? 1 : 0) << "\nconverged "
                   << (res.converged ? 1 : 0) << '\n';
      return 0;
    }

    if (*experiment) {
      const biso::ExperimentConfig cfg = resolve_config(exp_flags, exp_estimators);
      std::function<void(std::size_t, std::size_t, std::size_t)> log;
      if (!exp_flags.quiet)
        log = [](std::size_t n1, std::size_t n2, std::size_t trial) {
          std::cerr << "cell " << n1 << 'x' << n2 << " trial " << trial << " done\n";
        };
      const auto rows = biso::run_experiment(cfg, log);
      Output out(cfg.output_path);
      biso::write_csv(out.stream(), rows);
      return 0;
    }

    if (*rates) {
      biso::Metric metric;
      if (rates_metric == "frobenius") metric = biso::Metric::frobenius;
      else if (rates_metric == "max_row") metric = biso::Metric::max_row;
      else if (rates_metric == "max_col") metric = biso::Metric::max_col;
      else throw biso::ConfigError("metric", "expected frobenius, max_row or max_col");
      auto in = open_input(rates_input);
      const auto rows = biso::read_csv(in);
      Output out(rates_out);
      biso::write_rates_csv(out.stream(), biso::summarize_rates(rows, metric));
      return 0;
    }

    if (*conetest) {
      const biso::ConeSweepGrid grid{parse_real_list("lambda", ct_lambda), parse_real_list("delta", ct_delta),
                                     parse_size_list("r", ct_r), parse_size_list("s", ct_s)};
      const auto rows = biso::run_cone_sweep(grid, ct_trials, ct_seed);
      Output out(ct_out);
      auto& os = out.stream();
      os << "lambda,delta,r,s,closed_form,mc_estimate,stderr,bound,ratio\n";
      for (const auto& r : rows) {
        using biso::detail::format_double;
        os << format_double(r.lambda) << ',' << format_double(r.delta) << ',' << r.r << ',' << r.s
           << ',' << format_double(r.closed_form) << ',' << format_double(r.mc_estimate) << ','
           << format_double(r.std_error) << ',' << format_double(r.bound) << ','
           << format_double(r.bound > 0.0 ? r.closed_form / r.bound : 0.0) << '\n';
      }
      if (rows.empty()) std::cerr << "no grid point satisfies delta <= 2/5 and lambda delta^2 r <= 2/5\n";
      return 0;
    }
  } catch (const biso::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

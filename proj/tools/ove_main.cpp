#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ove/bootstrap.hpp"
#include "ove/bounds.hpp"
#include "ove/envs.hpp"
#include "ove/errors.hpp"
#include "ove/estimators.hpp"
#include "ove/experiment.hpp"
#include "ove/jsonl.hpp"
#include "ove/numeric.hpp"

namespace {

struct Options {
  std::string env = "gridworld";
  std::string policy = "smoothed";
  double alpha = 0.5;
  std::size_t n = 1000;
  std::vector<std::size_t> n_grid;
  int trials = 100;
  double delta = 0.05;
  std::uint64_t seed = 0;
  std::vector<std::string> methods;
  int bootstrap_b = 1000;
  std::string out;
  std::string format;
  bool clip = true;
  int threads = 1;
  std::string split = "even_odd";
  std::string side = "both";
  std::string estimator = "variance_reduced";
  std::vector<double> budget;
  bool exhaustive = false;
  std::string data_path;
};

void add_env_policy(CLI::App* sub, Options& opt) {
  sub->add_option("--env", opt.env, "builtin environment name or MDP config path")
      ->capture_default_str();
  sub->add_option("--policy", opt.policy,
                  "uniform | greedy | smoothed | det_<action> | policy config path")
      ->capture_default_str();
}

ove::TabularPolicy evaluation_policy(const ove::TabularMdp& mdp, const Options& opt) {
  return ove::resolve_policy(mdp, opt.env, opt.policy);
}

ove::Dataset load_data(const Options& opt, const ove::TabularMdp& mdp) {
  return ove::load_dataset_jsonl(opt.data_path, mdp.spec);
}

ove::SplitPlan make_split(const Options& opt, std::size_t n) {
  if (opt.split == "shuffled") {
    ove::SeededRng rng(opt.seed, 0);
    return ove::SplitPlan::shuffled(n, rng);
  }
  return ove::SplitPlan::even_odd(n);
}

ove::ExperimentConfig experiment_config(const Options& opt, bool point_only) {
  ove::ExperimentConfig cfg;
  cfg.environment = opt.env;
  cfg.policy = opt.policy;
  cfg.alpha = opt.alpha;
  if (!opt.n_grid.empty()) cfg.n_grid = opt.n_grid;
  cfg.trials = opt.trials;
  cfg.delta = opt.delta;
  cfg.methods = opt.methods.empty()
                    ? (point_only ? ove::point_methods() : ove::all_methods())
                    : opt.methods;
  cfg.bootstrap_b = opt.bootstrap_b;
  cfg.seed = opt.seed;
  cfg.clip = opt.clip;
  cfg.threads = opt.threads;
  return cfg;
}

// Stem + per-format writers shared by coverage and compare.
void write_report(const Options& opt, const std::string& csv, const std::string& json) {
  if (opt.format.empty() || opt.format == "csv") {
    const std::string path = opt.out + ".csv";
    ove::write_text_file(path, csv);
    std::printf("wrote %s\n", path.c_str());
  }
  if (opt.format.empty() || opt.format == "json") {
    const std::string path = opt.out + ".json";
    ove::write_text_file(path, json);
    std::printf("wrote %s\n", path.c_str());
  }
}

void cmd_simulate(const Options& opt) {
  const ove::TabularMdp mdp = ove::resolve_env(opt.env);
  const ove::TabularPolicy beta = ove::mix_behavior(evaluation_policy(mdp, opt), opt.alpha);
  const ove::Dataset data = ove::sample_dataset(mdp, beta, opt.n, ove::SeededRng(opt.seed, 0));
  if (opt.out.empty()) {
    ove::save_dataset_jsonl(data, std::cout);
  } else {
    ove::save_dataset_jsonl(data, opt.out);
    std::printf("wrote %s\n", opt.out.c_str());
  }
}

void cmd_estimate(const Options& opt) {
  const ove::TabularMdp mdp = ove::resolve_env(opt.env);
  const ove::TabularPolicy pi = evaluation_policy(mdp, opt);
  const ove::Dataset data = load_data(opt, mdp);
  const auto stats = ove::dataset_stats(data, pi);
  const ove::SplitPlan plan = make_split(opt, data.size());

  const auto& known = ove::point_methods();
  std::vector<std::string> methods = opt.methods.empty() ? known : opt.methods;
  for (const auto& method : methods) {
    if (std::find(known.begin(), known.end(), method) == known.end())
      throw ove::InvalidInput("estimate: '" + method +
                              "' is not a point estimator (see bound and bootstrap)");
    ove::VarianceEstimate est;
    if (method == "naive_is") est = ove::naive_is_variance(stats);
    if (method == "naive_plugin") est = ove::naive_plugin_variance(stats);
    if (method == "double_sampled") est = ove::double_sampled_variance(stats, plan);
    if (method == "variance_reduced") est = ove::variance_reduced_variance(stats, plan);
    std::printf("%s raw %.10g clipped %.10g\n", method.c_str(), est.raw, est.clipped);
  }
}

void cmd_bound(const Options& opt) {
  const ove::TabularMdp mdp = ove::resolve_env(opt.env);
  const ove::TabularPolicy pi = evaluation_policy(mdp, opt);
  const ove::Dataset data = load_data(opt, mdp);
  ove::SeededRng rng(opt.seed, 0);

  const bool budgeted = !opt.budget.empty();
  ove::DeltaBudget budget;
  if (budgeted) {
    budget = ove::DeltaBudget{opt.budget[0], opt.budget[1], opt.budget[2], opt.budget[3]};
    budget.validate(opt.delta);
  }
  const double pop = mdp.spec.popoviciu_bound();

  if (opt.side == "lower") {
    double v = budgeted ? ove::hcove_lower(data, pi, budget, rng)
                        : ove::hcove_lower(data, pi, opt.delta, rng);
    if (opt.clip) v = std::min(std::max(v, 0.0), pop);
    std::printf("hcove_lower %.10g\n", v);
    return;
  }
  if (opt.side == "upper") {
    double v = budgeted ? ove::hcove_upper(data, pi, budget, rng)
                        : ove::hcove_upper(data, pi, opt.delta, rng);
    if (opt.clip) v = std::min(std::max(v, 0.0), pop);
    std::printf("hcove_upper %.10g\n", v);
    return;
  }
  ove::Interval iv = budgeted ? ove::hcove_interval(data, pi, budget, opt.delta, rng)
                              : ove::hcove_interval(data, pi, opt.delta, rng);
  if (opt.clip) {
    const ove::ClippedInterval clipped = ove::clip_interval(iv, mdp.spec);
    if (clipped.degenerate) std::fprintf(stderr, "warning: interval missed [0, %g] entirely\n", pop);
    iv = clipped.interval;
  }
  std::printf("hcove_ci lower %.10g upper %.10g\n", iv.lower, iv.upper);
}

void cmd_bootstrap(const Options& opt) {
  const ove::TabularMdp mdp = ove::resolve_env(opt.env);
  const ove::TabularPolicy pi = evaluation_policy(mdp, opt);
  const ove::Dataset data = load_data(opt, mdp);
  ove::BootstrapConfig cfg;
  cfg.b = opt.bootstrap_b;
  cfg.delta = opt.delta;
  cfg.seed = opt.seed;
  const auto which = opt.estimator == "double_sampled" ? ove::BootstrapEstimator::double_sampled
                                                       : ove::BootstrapEstimator::variance_reduced;
  const ove::BootstrapResult res = ove::bootstrap_interval(data, pi, cfg, which);
  ove::Interval iv = res.interval;
  if (opt.clip) iv = ove::clip_interval(iv, mdp.spec).interval;
  if (res.degenerate) std::fprintf(stderr, "warning: degenerate pivot distribution\n");
  std::printf("bootstrap point %.10g lower %.10g upper %.10g\n", res.point, iv.lower, iv.upper);
}

void cmd_oracle(const Options& opt) {
  const ove::TabularMdp mdp = ove::resolve_env(opt.env);
  const ove::TabularPolicy pi = evaluation_policy(mdp, opt);
  const ove::Moments m = ove::oracle_moments(mdp, pi);
  std::printf("mu %.10g\n", m.mu);
  std::printf("second_moment %.10g\n", m.second);
  std::printf("variance %.10g\n", m.variance);
}

void cmd_coverage(const Options& opt) {
  const ove::ExperimentConfig cfg = experiment_config(opt, false);
  const ove::CoverageReport report = ove::run_coverage(cfg);
  for (const auto& s : report.summary)
    std::printf("%s n=%zu cells=%d skipped=%d failures=%d\n", s.method.c_str(), s.n, s.cells,
                s.skipped, s.failures);
  write_report(opt, ove::coverage_csv(report), ove::coverage_json(report));
}

void cmd_compare(const Options& opt) {
  const ove::ExperimentConfig cfg = experiment_config(opt, true);
  const ove::ComparisonTable table = ove::run_estimator_comparison(cfg, opt.exhaustive);
  if (opt.out.empty()) {
    std::fputs(ove::comparison_csv(table).c_str(), stdout);
    return;
  }
  write_report(opt, ove::comparison_csv(table), ove::comparison_json(table));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Off-policy estimation of return variance from behavior trajectories"};
  app.require_subcommand(1);
  Options opt;

  auto* sim = app.add_subcommand("simulate", "Sample trajectories under the behavior mix as JSONL");
  add_env_policy(sim, opt);
  sim->add_option("--alpha", opt.alpha, "behavior mix toward the evaluation policy")
      ->capture_default_str();
  sim->add_option("--n", opt.n, "number of trajectories")->capture_default_str();
  sim->add_option("--seed", opt.seed, "rng seed")->capture_default_str();
  sim->add_option("--out", opt.out, "output path (default stdout)");
  sim->callback([&] { cmd_simulate(opt); });

  auto* est = app.add_subcommand("estimate", "Point estimates of the return variance");
  est->add_option("data", opt.data_path, "trajectory JSONL file")->required();
  add_env_policy(est, opt);
  est->add_option("--method", opt.methods, "point estimators to run (default: all four)");
  est->add_option("--split", opt.split, "half-split rule for the split estimators")
      ->check(CLI::IsMember({"even_odd", "shuffled"}))
      ->capture_default_str();
  est->add_option("--seed", opt.seed, "rng seed for --split shuffled")->capture_default_str();
  est->callback([&] { cmd_estimate(opt); });

  auto* bnd = app.add_subcommand("bound", "High-confidence interval for the return variance");
  bnd->add_option("data", opt.data_path, "trajectory JSONL file")->required();
  add_env_policy(bnd, opt);
  bnd->add_option("--delta", opt.delta, "total failure probability")->capture_default_str();
  bnd->add_option("--seed", opt.seed, "rng seed for the threshold-tuning shuffle")
      ->capture_default_str();
  bnd->add_option("--side", opt.side, "which bound to report")
      ->check(CLI::IsMember({"lower", "upper", "both"}))
      ->capture_default_str();
  bnd->add_option("--budget", opt.budget,
                  "explicit d1 d2 d3 d4 failure-budget split (must sum to at most delta)")
      ->expected(4);
  bnd->add_flag("--clip,!--no-clip", opt.clip, "intersect with [0, (g_max-g_min)^2/4]")
      ->capture_default_str();
  bnd->callback([&] { cmd_bound(opt); });

  auto* boot = app.add_subcommand("bootstrap", "Percentile-pivot bootstrap interval");
  boot->add_option("data", opt.data_path, "trajectory JSONL file")->required();
  add_env_policy(boot, opt);
  boot->add_option("--delta", opt.delta, "two-sided miss probability")->capture_default_str();
  boot->add_option("--seed", opt.seed, "rng seed")->capture_default_str();
  boot->add_option("--bootstrap-b", opt.bootstrap_b, "resample count")->capture_default_str();
  boot->add_option("--estimator", opt.estimator, "estimator to resample")
      ->check(CLI::IsMember({"double_sampled", "variance_reduced"}))
      ->capture_default_str();
  boot->add_flag("--clip,!--no-clip", opt.clip, "intersect with [0, (g_max-g_min)^2/4]")
      ->capture_default_str();
  boot->callback([&] { cmd_bootstrap(opt); });

  auto* orc = app.add_subcommand("oracle", "Exact return moments under the evaluation policy");
  add_env_policy(orc, opt);
  orc->callback([&] { cmd_oracle(opt); });

  auto* cov = app.add_subcommand("coverage", "Coverage experiment over seeded datasets");
  add_env_policy(cov, opt);
  cov->add_option("--alpha", opt.alpha, "behavior mix toward the evaluation policy")
      ->capture_default_str();
  cov->add_option("--n", opt.n_grid, "dataset sizes (default: 50 200 1000 2000 10000)");
  cov->add_option("--trials", opt.trials, "datasets per size")->capture_default_str();
  cov->add_option("--delta", opt.delta, "interval failure probability")->capture_default_str();
  cov->add_option("--seed", opt.seed, "master seed")->capture_default_str();
  cov->add_option("--method", opt.methods, "methods to run (default: all six)");
  cov->add_option("--bootstrap-b", opt.bootstrap_b, "bootstrap resample count")
      ->capture_default_str();
  cov->add_option("--threads", opt.threads, "worker threads (output is thread-count invariant)")
      ->capture_default_str();
  cov->add_flag("--clip,!--no-clip", opt.clip, "intersect intervals with [0, (g_max-g_min)^2/4]")
      ->capture_default_str();
  cov->add_option("--out", opt.out, "output stem; writes <stem>.csv and/or <stem>.json")
      ->required();
  cov->add_option("--format", opt.format, "write only one format (default: both)")
      ->check(CLI::IsMember({"csv", "json"}));
  cov->callback([&] { cmd_coverage(opt); });

  auto* cmp = app.add_subcommand("compare", "Mean and spread of the point estimators");
  add_env_policy(cmp, opt);
  cmp->add_option("--alpha", opt.alpha, "behavior mix toward the evaluation policy")
      ->capture_default_str();
  cmp->add_option("--n", opt.n_grid, "dataset sizes (default: 50 200 1000 2000 10000)");
  cmp->add_option("--trials", opt.trials, "datasets per size")->capture_default_str();
  cmp->add_option("--seed", opt.seed, "master seed")->capture_default_str();
  cmp->add_option("--method", opt.methods, "point estimators to include (default: all four)");
  cmp->add_option("--threads", opt.threads, "worker threads")->capture_default_str();
  cmp->add_flag("--exhaustive", opt.exhaustive,
                "enumerate every size-n dataset instead of sampling (tiny models)");
  cmp->add_option("--out", opt.out, "output stem; default prints CSV to stdout");
  cmp->add_option("--format", opt.format, "write only one format (default: both)")
      ->check(CLI::IsMember({"csv", "json"}));
  cmp->callback([&] { cmd_compare(opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ove::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#include "ove/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

#include <json.hpp>

#include "ove/bootstrap.hpp"
#include "ove/bounds.hpp"
#include "ove/errors.hpp"
#include "ove/estimators.hpp"
#include "ove/numeric.hpp"

namespace ove {

const std::vector<std::string>& point_methods() {
  static const std::vector<std::string> kMethods = {"naive_is", "naive_plugin", "double_sampled",
                                                    "variance_reduced"};
  return kMethods;
}

const std::vector<std::string>& all_methods() {
  static const std::vector<std::string> kMethods = {
      "naive_is", "naive_plugin", "double_sampled", "variance_reduced", "hcove_ci", "bootstrap"};
  return kMethods;
}

void ExperimentConfig::validate() const {
  if (environment.empty() || policy.empty())
    throw InvalidInput("experiment: environment and policy must be set");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidRange("experiment: alpha must be in [0, 1]");
  if (n_grid.empty()) throw InvalidInput("experiment: empty n grid");
  for (std::size_t n : n_grid)
    if (n < 2) throw InvalidInput("experiment: every n must be at least 2");
  if (trials < 1) throw InvalidInput("experiment: trials must be at least 1");
  if (!(delta > 0.0 && delta <= 0.5))
    throw InvalidInput("experiment: delta must be in (0, 0.5]");
  if (methods.empty()) throw InvalidInput("experiment: no methods selected");
  const auto& known = all_methods();
  for (const auto& m : methods)
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw InvalidInput("experiment: unknown method '" + m + "'");
  if (bootstrap_b < 100) throw InvalidInput("experiment: bootstrap_b must be at least 100");
  if (threads < 1) throw InvalidInput("experiment: threads must be at least 1");
}

namespace {

// Every random decision in a run is keyed by (trial, n, purpose), never by
// execution order, which is what makes thread counts and method subsets
// invisible in the output. Purposes: 0 dataset, 1 interval shuffle,
// 2 bootstrap seed space.
std::uint64_t cell_stream(int trial, std::size_t n, int purpose) {
  return detail::mix64(detail::mix64(static_cast<std::uint64_t>(trial), n),
                       static_cast<std::uint64_t>(purpose));
}

VarianceEstimate run_point(const std::string& method, std::span<const TrajectoryStats> stats,
                           const SplitPlan& plan) {
  if (method == "naive_is") return naive_is_variance(stats);
  if (method == "naive_plugin") return naive_plugin_variance(stats);
  if (method == "double_sampled") return double_sampled_variance(stats, plan);
  if (method == "variance_reduced") return variance_reduced_variance(stats, plan);
  throw InvalidInput("unknown point estimator '" + method + "'");
}

void append_note(CoverageCell& cell, const std::string& note) {
  if (!cell.note.empty()) cell.note += "; ";
  cell.note += note;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  // threads is evaluation machinery, not an input to the results, and is
  // deliberately left out so reports are comparable across machines.
  nlohmann::ordered_json j;
  j["environment"] = cfg.environment;
  j["policy"] = cfg.policy;
  j["alpha"] = cfg.alpha;
  j["n_grid"] = cfg.n_grid;
  j["trials"] = cfg.trials;
  j["delta"] = cfg.delta;
  j["methods"] = cfg.methods;
  j["bootstrap_b"] = cfg.bootstrap_b;
  j["seed"] = cfg.seed;
  j["clip"] = cfg.clip;
  return j;
}

nlohmann::ordered_json moments_json(const Moments& m) {
  nlohmann::ordered_json j;
  j["mu"] = m.mu;
  j["second"] = m.second;
  j["variance"] = m.variance;
  return j;
}

struct RunContext {
  const ExperimentConfig& cfg;
  const TabularMdp& mdp;
  const TabularPolicy& pi;
  const TabularPolicy& beta;
  Moments oracle;
};

void finish_interval(const RunContext& ctx, CoverageCell& cell, const Interval& iv) {
  Interval use = iv;
  if (ctx.cfg.clip) {
    const ClippedInterval clipped = clip_interval(iv, ctx.mdp.spec);
    use = clipped.interval;
    if (clipped.degenerate) append_note(cell, "clipped to empty");
  }
  cell.lower = use.lower;
  cell.upper = use.upper;
  cell.failed = !(ctx.oracle.variance >= use.lower && ctx.oracle.variance <= use.upper);
}

std::vector<CoverageCell> run_cell_group(const RunContext& ctx, int trial, std::size_t n) {
  const ExperimentConfig& cfg = ctx.cfg;
  std::vector<CoverageCell> cells;
  cells.reserve(cfg.methods.size());

  Dataset data;
  std::vector<TrajectoryStats> stats;
  SplitPlan plan;
  bool data_ok = true;
  std::string data_note;
  try {
    data = sample_dataset(ctx.mdp, ctx.beta, n, SeededRng(cfg.seed, cell_stream(trial, n, 0)));
    stats = dataset_stats(data, ctx.pi);
    plan = SplitPlan::even_odd(n);
  } catch (const Error& e) {
    data_ok = false;
    data_note = e.what();
  }

  for (const auto& method : cfg.methods) {
    CoverageCell cell;
    cell.trial = trial;
    cell.method = method;
    cell.n = n;
    if (!data_ok) {
      cell.skipped = true;
      cell.note = data_note;
      cells.push_back(std::move(cell));
      continue;
    }
    try {
      if (method == "hcove_ci") {
        SeededRng rng(cfg.seed, cell_stream(trial, n, 1));
        finish_interval(ctx, cell, hcove_interval(data, ctx.pi, cfg.delta, rng));
      } else if (method == "bootstrap") {
        BootstrapConfig bcfg;
        bcfg.b = cfg.bootstrap_b;
        bcfg.delta = cfg.delta;
        bcfg.seed = detail::mix64(cfg.seed, cell_stream(trial, n, 2));
        const BootstrapResult res =
            bootstrap_interval(data, ctx.pi, bcfg, BootstrapEstimator::variance_reduced);
        cell.point_raw = res.point;
        cell.point_clipped = std::max(0.0, res.point);
        if (res.degenerate) append_note(cell, "degenerate pivots");
        finish_interval(ctx, cell, res.interval);
      } else {
        const VarianceEstimate est = run_point(method, stats, plan);
        cell.point_raw = est.raw;
        cell.point_clipped = est.clipped;
      }
    } catch (const Error& e) {
      cell.skipped = true;
      cell.note = e.what();
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

template <typename Fn>
void run_items(int threads, std::size_t count, Fn&& item) {
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto drain = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= count) return;
      try {
        item(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

CoverageReport run_coverage(const ExperimentConfig& cfg) {
  cfg.validate();
  const TabularMdp mdp = resolve_env(cfg.environment);
  const TabularPolicy pi = resolve_policy(mdp, cfg.environment, cfg.policy);
  const TabularPolicy beta = mix_behavior(pi, cfg.alpha);
  const RunContext ctx{cfg, mdp, pi, beta, oracle_moments(mdp, pi)};

  struct Item {
    int trial;
    std::size_t n;
  };
  std::vector<Item> items;
  items.reserve(static_cast<std::size_t>(cfg.trials) * cfg.n_grid.size());
  for (int t = 0; t < cfg.trials; ++t)
    for (std::size_t n : cfg.n_grid) items.push_back({t, n});

  std::vector<std::vector<CoverageCell>> groups(items.size());
  run_items(cfg.threads, items.size(),
            [&](std::size_t i) { groups[i] = run_cell_group(ctx, items[i].trial, items[i].n); });

  CoverageReport report;
  report.config = cfg;
  report.oracle = ctx.oracle;
  for (auto& group : groups)
    for (auto& cell : group) report.cells.push_back(std::move(cell));
  std::sort(report.cells.begin(), report.cells.end(),
            [](const CoverageCell& a, const CoverageCell& b) {
              if (a.trial != b.trial) return a.trial < b.trial;
              if (a.method != b.method) return a.method < b.method;
              return a.n < b.n;
            });

  struct Agg {
    int cells = 0;
    int skipped = 0;
    int failures = 0;
    NeumaierSum point, lower, upper;
    std::size_t point_count = 0, interval_count = 0;
  };
  std::map<std::pair<std::string, std::size_t>, Agg> agg;
  for (const auto& cell : report.cells) {
    Agg& a = agg[{cell.method, cell.n}];
    a.cells += 1;
    if (cell.skipped) {
      a.skipped += 1;
      continue;
    }
    if (cell.failed) a.failures += 1;
    if (std::isfinite(cell.point_raw)) {
      a.point.add(cell.point_raw);
      a.point_count += 1;
    }
    if (std::isfinite(cell.lower) && std::isfinite(cell.upper)) {
      a.lower.add(cell.lower);
      a.upper.add(cell.upper);
      a.interval_count += 1;
    }
  }
  for (const auto& [key, a] : agg) {
    CoverageSummary s;
    s.method = key.first;
    s.n = key.second;
    s.cells = a.cells;
    s.skipped = a.skipped;
    s.failures = a.failures;
    if (a.point_count > 0) s.mean_point = a.point.value() / static_cast<double>(a.point_count);
    if (a.interval_count > 0) {
      s.mean_lower = a.lower.value() / static_cast<double>(a.interval_count);
      s.mean_upper = a.upper.value() / static_cast<double>(a.interval_count);
    }
    report.summary.push_back(std::move(s));
  }
  return report;
}

std::string coverage_csv(const CoverageReport& report) {
  std::string out = "trial,method,n,point_raw,point_clipped,lower,upper,oracle,failed\n";
  for (const auto& cell : report.cells) {
    out += std::to_string(cell.trial);
    out += ',';
    out += cell.method;
    out += ',';
    out += std::to_string(cell.n);
    out += ',';
    out += fmt17(cell.point_raw);
    out += ',';
    out += fmt17(cell.point_clipped);
    out += ',';
    out += fmt17(cell.lower);
    out += ',';
    out += fmt17(cell.upper);
    out += ',';
    out += fmt17(report.oracle.variance);
    out += ',';
    out += cell.skipped ? "skipped" : (cell.failed ? "1" : "0");
    out += '\n';
  }
  return out;
}

std::string coverage_json(const CoverageReport& report) {
  nlohmann::ordered_json j;
  j["config"] = config_json(report.config);
  j["oracle"] = moments_json(report.oracle);
  auto summary = nlohmann::ordered_json::array();
  for (const auto& s : report.summary) {
    nlohmann::ordered_json row;
    row["method"] = s.method;
    row["n"] = s.n;
    row["cells"] = s.cells;
    row["skipped"] = s.skipped;
    row["failures"] = s.failures;
    row["mean_point"] = s.mean_point;
    row["mean_lower"] = s.mean_lower;
    row["mean_upper"] = s.mean_upper;
    summary.push_back(std::move(row));
  }
  j["summary"] = summary;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& cell : report.cells) {
    nlohmann::ordered_json row;
    row["trial"] = cell.trial;
    row["method"] = cell.method;
    row["n"] = cell.n;
    row["point_raw"] = cell.point_raw;
    row["point_clipped"] = cell.point_clipped;
    row["lower"] = cell.lower;
    row["upper"] = cell.upper;
    row["failed"] = cell.failed;
    row["skipped"] = cell.skipped;
    row["note"] = cell.note;
    cells.push_back(std::move(row));
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

ComparisonTable run_estimator_comparison(const ExperimentConfig& cfg, bool exhaustive) {
  cfg.validate();
  std::vector<std::string> methods;
  for (const auto& m : point_methods())
    if (std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end())
      methods.push_back(m);
  if (methods.empty())
    throw InvalidInput("estimator comparison: select at least one point estimator");

  const TabularMdp mdp = resolve_env(cfg.environment);
  const TabularPolicy pi = resolve_policy(mdp, cfg.environment, cfg.policy);
  const TabularPolicy beta = mix_behavior(pi, cfg.alpha);

  ComparisonTable table;
  table.config = cfg;
  table.oracle = oracle_moments(mdp, pi);
  table.exhaustive = exhaustive;

  if (exhaustive) {
    for (const auto& method : methods) {
      for (std::size_t n : cfg.n_grid) {
        NeumaierSum mean, second;
        const auto cells = exhaustive_estimates(mdp, beta, pi, n, method);
        for (const auto& cell : cells) {
          mean.add(cell.probability * cell.value);
          second.add(cell.probability * cell.value * cell.value);
        }
        ComparisonRow row;
        row.method = method;
        row.n = n;
        row.datasets = cells.size();
        row.mean = mean.value();
        row.stddev = std::sqrt(std::max(0.0, second.value() - row.mean * row.mean));
        table.rows.push_back(std::move(row));
      }
    }
    return table;
  }

  for (const auto& method : methods) {
    for (std::size_t n : cfg.n_grid) {
      NeumaierSum sum, sumsq;
      std::size_t count = 0;
      for (int t = 0; t < cfg.trials; ++t) {
        const Dataset data =
            sample_dataset(mdp, beta, n, SeededRng(cfg.seed, cell_stream(t, n, 0)));
        const auto stats = dataset_stats(data, pi);
        const double v = run_point(method, stats, SplitPlan::even_odd(n)).raw;
        sum.add(v);
        sumsq.add(v * v);
        count += 1;
      }
      ComparisonRow row;
      row.method = method;
      row.n = n;
      row.datasets = count;
      row.mean = sum.value() / static_cast<double>(count);
      if (count > 1) {
        const double ss = sumsq.value() - static_cast<double>(count) * row.mean * row.mean;
        row.stddev = std::sqrt(std::max(0.0, ss / static_cast<double>(count - 1)));
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string comparison_csv(const ComparisonTable& table) {
  std::string out = "method,n,datasets,mean,stddev,oracle\n";
  for (const auto& row : table.rows) {
    out += row.method;
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.datasets);
    out += ',';
    out += fmt17(row.mean);
    out += ',';
    out += fmt17(row.stddev);
    out += ',';
    out += fmt17(table.oracle.variance);
    out += '\n';
  }
  return out;
}

std::string comparison_json(const ComparisonTable& table) {
  nlohmann::ordered_json j;
  j["config"] = config_json(table.config);
  j["oracle"] = moments_json(table.oracle);
  j["exhaustive"] = table.exhaustive;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r;
    r["method"] = row.method;
    r["n"] = row.n;
    r["datasets"] = row.datasets;
    r["mean"] = row.mean;
    r["stddev"] = row.stddev;
    rows.push_back(std::move(r));
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::vector<ExhaustiveCell> exhaustive_estimates(const TabularMdp& mdp, const TabularPolicy& beta,
                                                 const TabularPolicy& pi, std::size_t n,
                                                 const std::string& method, std::size_t limit) {
  if (n < 2) throw InsufficientData("exhaustive_estimates: need datasets of at least 2");
  const auto space = enumerate_trajectories(mdp, beta, limit);
  const std::size_t m = space.size();
  if (m == 0) throw InsufficientData("exhaustive_estimates: empty trajectory space");

  std::size_t count = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (count > limit / m)
      throw IntractableModel("exhaustive_estimates: dataset space exceeds the limit");
    count *= m;
  }

  std::vector<TrajectoryStats> stats_of(m);
  for (std::size_t i = 0; i < m; ++i)
    stats_of[i] = trajectory_stats(space[i].first, pi, mdp.spec);

  const SplitPlan plan = SplitPlan::even_odd(n);
  std::vector<std::size_t> digits(n, 0);
  std::vector<TrajectoryStats> buf(n);
  std::vector<ExhaustiveCell> cells;
  cells.reserve(count);
  while (true) {
    double probability = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      buf[k] = stats_of[digits[k]];
      probability *= space[digits[k]].second;
    }
    ExhaustiveCell cell;
    cell.outcome = digits;
    cell.probability = probability;
    cell.value = run_point(method, buf, plan).raw;
    cells.push_back(std::move(cell));

    std::size_t pos = n;
    while (pos > 0) {
      pos -= 1;
      if (++digits[pos] < m) break;
      digits[pos] = 0;
      if (pos == 0) return cells;
    }
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out << content;
  if (!out) throw InvalidInput("failed writing " + path);
}

}  // namespace ove

// ggmsel command-line tool: penalty tables, estimation on data, simulation
// benchmarks and the overfitting experiment.
//
// Exit codes: 0 success, 1 runtime or numeric failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ggmsel/error.hpp"
#include "ggmsel/graphs.hpp"
#include "ggmsel/io.hpp"
#include "ggmsel/metrics.hpp"
#include "ggmsel/selector.hpp"
#include "ggmsel/specfun.hpp"

namespace {

using namespace ggmsel;
using nlohmann::json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<double> parse_k_list(const std::string& text) {
  std::vector<double> Ks;
  for (const std::string& item : split_list(text)) {
    std::size_t used = 0;
    double K = 0.0;
    try {
      K = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("--K expects numbers, got '" + item + "'");
    if (!(K > 1.0)) throw UsageError("--K values must exceed 1");
    Ks.push_back(K);
  }
  if (Ks.empty()) throw UsageError("--K needs at least one value");
  return Ks;
}

// Reads key=value lines ('#' comments, optional quotes) and appends them as
// flags for options not already present on the command line, so flags win.
std::vector<std::string> merge_config(CLI::App& app, const std::vector<std::string>& args) {
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return args;
  if (rest.empty()) throw UsageError("--config needs a subcommand");
  CLI::App* sub = nullptr;
  for (CLI::App* candidate : app.get_subcommands({})) {
    if (candidate->get_name() == rest.front()) sub = candidate;
  }
  if (sub == nullptr) throw UsageError("unknown subcommand '" + rest.front() + "'");

  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot read config file '" + config_path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(config_path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto strip = [](std::string s) {
      const std::size_t b = s.find_first_not_of(" \t");
      const std::size_t e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
      if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
      return s;
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    const std::string flag = "--" + key;
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError(config_path + ":" + std::to_string(line_no) + ": unknown key '" + key + "' for " +
                       sub->get_name());
    }
    bool given = false;
    for (const std::string& a : rest) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
      for (const std::string& name : opt->get_lnames()) {
        if (a == "--" + name || a.rfind("--" + name + "=", 0) == 0) given = true;
      }
    }
    if (given) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1") {
        rest.push_back(flag);
      } else if (value != "false" && value != "0") {
        throw UsageError(config_path + ":" + std::to_string(line_no) + ": '" + key + "' expects true or false");
      }
    } else {
      rest.push_back(flag);
      rest.push_back(value);
    }
  }
  return rest;
}

void print_degree_check(int n, int p, int D, double eta) {
  const DegreeCheck check = validate_degree_condition(n, p, D, eta);
  std::cerr << (check.ok ? "note: " : "warning: ") << check.message << '\n';
}

// --- pen-table ---------------------------------------------------------------

struct PenTableArgs {
  int n = 0;
  int p = 0;
  double K = 2.0;
  int dmax = 0;
  std::string out;
};

int run_pen_table(const PenTableArgs& a) {
  if (a.n < 3 || a.p < 2) throw UsageError("need n >= 3 and p >= 2");
  if (!(a.K > 1.0)) throw UsageError("--K must exceed 1");
  if (a.dmax < 0) throw UsageError("--dmax must be nonnegative");
  if (a.dmax > a.n - 2) throw UsageError("penalty undefined: n−d−1 ≤ 0");
  if (a.dmax > a.p - 1) throw UsageError("--dmax must be below p");
  const PenaltyTable table = build_penalty_table(a.n, a.p, a.K, a.dmax);
  const json config = {{"n", a.n}, {"p", a.p}, {"K", a.K}, {"dmax", a.dmax}};
  emit(a.out, config_comment_lines(config) + penalty_to_csv(table));
  return 0;
}

// --- estimate ----------------------------------------------------------------

struct EstimateArgs {
  std::string data;
  std::string family = "deg-directed";
  int dmax = 3;
  double K = 2.0;
  std::string strategy;
  double eta = 0.9;
  std::string out;
};

int run_estimate(const EstimateArgs& a) {
  const Family family = parse_family(a.family);
  const Strategy strategy = a.strategy.empty()
                                ? (family == Family::DegreeDirected ? Strategy::ExactDecomposed : Strategy::Stepwise)
                                : parse_strategy(a.strategy);
  if (!(a.K > 1.0)) throw UsageError("--K must exceed 1");
  if (!(a.eta > 0.0 && a.eta < 1.0)) throw UsageError("--eta must lie in (0, 1)");
  if (a.dmax < 1) throw UsageError("--dmax must be at least 1");
  if (strategy == Strategy::ExactDecomposed && family != Family::DegreeDirected) {
    throw UsageError("strategy exact_decomposed requires family deg-directed");
  }
  const Sample sample = read_sample_csv(a.data);
  if (sample.p() < 2) throw UsageError("data needs at least two columns");
  const CollectionSpec spec(family, a.dmax, sample.p());
  if (spec.max_neighborhood() > sample.n() - 2) throw UsageError("penalty undefined: n−d−1 ≤ 0");
  print_degree_check(sample.n(), sample.p(), spec.max_neighborhood(), a.eta);

  const PenaltyTable pen = build_penalty_table(sample.n(), sample.p(), a.K, spec.max_neighborhood());
  SelectOptions options;
  options.eta = a.eta;
  const SelectionResult result = select(sample, spec, pen, strategy, options);
  json out = selection_to_json(result, spec);
  out["config"] = {{"data", a.data},        {"n", sample.n()},      {"p", sample.p()},
                   {"family", a.family},    {"dmax", a.dmax},       {"K", a.K},
                   {"strategy", std::string(strategy_name(strategy))}, {"eta", a.eta}};
  emit(a.out, out.dump(2) + "\n");
  std::cerr << "selected " << (is_directed(family) ? result.m_hat.arc_count() : symmetrize(result.m_hat).edge_count())
            << (is_directed(family) ? " arcs" : " edges") << ", crit " << result.crit << '\n';
  return 0;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
  BenchConfig config;
  double q = -1.0;
  double s = -1.0;
  std::string K = "2";
  std::string family = "deg";
  std::string strategy;
  std::string methods = "ours";
  bool no_oracle = false;
  std::string out;
};

void print_report(const BenchReport& report) {
  std::cout << "method       r.Risk    power      FDR  mean_deg  reps\n";
  for (const MethodReport& m : report.methods) {
    auto pct = [](double x) { return std::isnan(x) ? std::string("NA") : format_number(std::round(x * 1000) / 10) + "%"; };
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %9.3f %5d\n", m.method.c_str(),
                  std::isnan(m.r_risk) ? "NA" : format_number(std::round(m.r_risk * 100) / 100).c_str(),
                  pct(m.power).c_str(), pct(m.fdr).c_str(), m.mean_deg, m.n_reps);
    std::cout << line;
  }
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << '\n';
}

int run_simulate(SimulateArgs a) {
  BenchConfig& c = a.config;
  if (a.q >= 0.0) c.q = a.q;
  if (a.s >= 0.0) c.s = a.s;
  if (!c.q && !c.s) throw UsageError("one of --q or --s is required");
  c.Ks = parse_k_list(a.K);
  c.family = parse_family(a.family);
  c.strategy = a.strategy.empty()
                   ? (c.family == Family::DegreeDirected ? Strategy::ExactDecomposed : Strategy::Stepwise)
                   : parse_strategy(a.strategy);
  c.run_ours = false;
  c.run_mb = false;
  for (const std::string& m : split_list(a.methods)) {
    if (m == "ours") {
      c.run_ours = true;
    } else if (m == "mb") {
      c.run_mb = true;
    } else {
      throw UsageError("unknown method '" + m + "' (expected ours, mb)");
    }
  }
  c.oracle = !a.no_oracle;
  c.validate();

  const BenchReport report = run_benchmark(c);
  if (!a.out.empty()) {
    write_file(a.out + ".csv", report_to_csv(report));
    write_file(a.out + ".json", report_to_json(report).dump(2) + "\n");
  }
  print_report(report);
  return 0;
}

// --- prop1 -------------------------------------------------------------------

struct Prop1Args {
  Prop1Config config;
  std::string family = "deg-directed";
  std::string out;
};

int run_prop1(Prop1Args a) {
  Prop1Config& c = a.config;
  c.family = parse_family(a.family);
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw UsageError("--gamma must lie in (0, 1)");
  if (!(c.K > 1.0)) throw UsageError("--K must exceed 1");
  if (c.reps < 1) throw UsageError("--reps must be positive");
  if (c.p < 2 || c.p > kMaxVertices) throw UsageError("--p must lie in [2, 64]");
  if (c.n < 3) throw UsageError("--n must be at least 3");
  if (c.D < 1) throw UsageError("--dmax must be at least 1");
  if (std::min(c.D, c.p - 1) > c.n - 2) throw UsageError("penalty undefined: n−d−1 ≤ 0");
  if (!is_directed(c.family)) throw UsageError("prop1 runs on edges-directed or deg-directed");

  const Prop1Result r = run_prop1_experiment(c);
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << '\n';
  if (!a.out.empty()) {
    write_file(a.out, prop1_to_csv(r));
    std::cerr << "wrote " << a.out << '\n';
  }
  std::cout << "search: " << strategy_name(r.strategy) << '\n'
            << "penalty   median|m_j|  mean|m_j|  P(|m_j|>=3)  mean|m|\n";
  for (const auto& [name, s] : {std::pair<const char*, const SizeSummary&>{"deflated", r.deflated},
                                std::pair<const char*, const SizeSummary&>{"control", r.control}}) {
    char line[160];
    std::snprintf(line, sizeof line, "%-9s %11.1f %10.3f %12.3f %8.2f\n", name, s.median_column, s.mean_column,
                  s.fraction_at_least_3, s.mean_total);
    std::cout << line;
  }
  std::cout << "median gap: " << r.deflated.median_column - r.control.median_column << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian graph estimation by penalized model selection"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.add_option("--config", "key=value file read before the subcommand flags; flags win");

  PenTableArgs pen_args;
  CLI::App* pen = app.add_subcommand("pen-table", "Tabulate the complexity penalty pen(d)");
  pen->add_option("--n", pen_args.n, "Sample size")->required();
  pen->add_option("--p", pen_args.p, "Number of variables")->required();
  pen->add_option("--K", pen_args.K, "Tuning constant (> 1)")->capture_default_str();
  pen->add_option("--dmax", pen_args.dmax, "Largest neighborhood size")->required();
  pen->add_option("--out", pen_args.out, "Output CSV (default: standard output)");

  EstimateArgs est_args;
  CLI::App* est = app.add_subcommand("estimate", "Select a graph for a data matrix");
  est->add_option("--data", est_args.data, "CSV file, rows are observations")->required();
  est->add_option("--family", est_args.family, "edges, deg, edges-directed or deg-directed")->capture_default_str();
  est->add_option("--dmax", est_args.dmax, "Collection bound D")->capture_default_str();
  est->add_option("--K", est_args.K, "Penalty constant (> 1)")->capture_default_str();
  est->add_option("--strategy", est_args.strategy,
                  "exact_decomposed, exhaustive, stepwise or branch_and_bound "
                  "(default: exact_decomposed for deg-directed, stepwise otherwise)");
  est->add_option("--eta", est_args.eta, "Constant of the degree condition, in (0, 1)")->capture_default_str();
  est->add_option("--out", est_args.out, "Output JSON (default: standard output)");

  SimulateArgs sim_args;
  sim_args.config.threads = default_threads();
  CLI::App* sim = app.add_subcommand("simulate", "Run the simulation benchmark");
  sim->add_option("--n", sim_args.config.n, "Sample size")->capture_default_str();
  sim->add_option("--p", sim_args.config.p, "Number of variables")->capture_default_str();
  sim->add_option("--q", sim_args.q, "Edge probability");
  sim->add_option("--s", sim_args.s, "Sparsity index; sets q = s / p");
  sim->add_option("--graphs", sim_args.config.graphs, "Number of random graphs")->capture_default_str();
  sim->add_option("--reps", sim_args.config.reps, "Samples per graph")->capture_default_str();
  sim->add_option("--K", sim_args.K, "Comma-separated penalty constants, run on matched samples")
      ->capture_default_str();
  sim->add_option("--family", sim_args.family, "edges, deg, edges-directed or deg-directed")->capture_default_str();
  sim->add_option("--dmax", sim_args.config.D, "Collection bound D")->capture_default_str();
  sim->add_option("--strategy", sim_args.strategy,
                  "exact_decomposed, exhaustive, stepwise or branch_and_bound "
                  "(default: exact_decomposed for deg-directed, stepwise otherwise)");
  sim->add_option("--methods", sim_args.methods, "Comma-separated subset of ours,mb")->capture_default_str();
  sim->add_option("--alpha", sim_args.config.alpha, "Level of the lasso baseline")->capture_default_str();
  sim->add_flag("!--mb-lasso-risk", sim_args.config.mb_refit,
                "Score the baseline risk with its lasso coefficients instead of a least-squares refit");
  sim->add_option("--margin", sim_args.config.margin, "Diagonal dominance margin of the precision matrix")
      ->capture_default_str();
  sim->add_flag("--no-oracle", sim_args.no_oracle, "Skip the oracle risk (r.Risk reported as NA)");
  sim->add_option("--node-budget", sim_args.config.node_budget, "Node limit of exact undirected searches")
      ->capture_default_str();
  sim->add_option("--seed", sim_args.config.seed, "Master seed")->capture_default_str();
  sim->add_option("--threads", sim_args.config.threads, "Worker threads; results do not depend on it")
      ->capture_default_str();
  sim->add_option("--out", sim_args.out, "Output prefix; writes PREFIX.csv and PREFIX.json");

  Prop1Args prop_args;
  CLI::App* prop = app.add_subcommand("prop1", "Overfitting experiment with a deflated penalty");
  prop->add_option("--gamma", prop_args.config.gamma, "Deflation gamma in (0, 1)")->capture_default_str();
  prop->add_option("--n", prop_args.config.n, "Sample size")->capture_default_str();
  prop->add_option("--p", prop_args.config.p, "Number of variables")->capture_default_str();
  prop->add_option("--dmax", prop_args.config.D, "Collection bound D")->capture_default_str();
  prop->add_option("--reps", prop_args.config.reps, "Replicates")->capture_default_str();
  prop->add_option("--K", prop_args.config.K, "Constant of the control penalty")->capture_default_str();
  prop->add_option("--family", prop_args.family, "edges-directed or deg-directed")->capture_default_str();
  prop->add_option("--seed", prop_args.config.seed, "Master seed")->capture_default_str();
  prop->add_option("--out", prop_args.out, "Output CSV of selected-size histograms");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(app, args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (pen->parsed()) return run_pen_table(pen_args);
    if (est->parsed()) return run_estimate(est_args);
    if (sim->parsed()) return run_simulate(sim_args);
    if (prop->parsed()) return run_prop1(prop_args);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

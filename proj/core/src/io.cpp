#include "ggmsel/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "ggmsel/error.hpp"

namespace ggmsel {
namespace {

using nlohmann::json;

json number_or_null(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

json pairs_to_json(const std::vector<std::pair<int, int>>& pairs) {
  json out = json::array();
  for (const auto& [i, j] : pairs) out.push_back({i + 1, j + 1});
  return out;
}

std::vector<std::pair<int, int>> pairs_from_json(const json& list, int p, const char* what) {
  std::vector<std::pair<int, int>> out;
  for (const json& item : list) {
    if (!item.is_array() || item.size() != 2) throw InputError(std::string(what) + " entries must be [i, j] pairs");
    const int i = item[0].get<int>();
    const int j = item[1].get<int>();
    if (i < 1 || j < 1 || i > p || j > p || i == j) {
      throw InputError(std::string(what) + " entry [" + std::to_string(i) + ", " + std::to_string(j) +
                       "] is out of range or a self-loop");
    }
    out.emplace_back(i - 1, j - 1);
  }
  return out;
}

json size_summary_to_json(const SizeSummary& s) {
  return {{"median_column", s.median_column},
          {"mean_column", s.mean_column},
          {"fraction_at_least_3", s.fraction_at_least_3},
          {"mean_total", s.mean_total}};
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

bool parse_double(const std::string& field, double& value) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = first + field.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                        : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "NA";
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, ptr);
}

json to_json(const Graph& g) { return {{"p", g.p()}, {"edges", pairs_to_json(g.edges())}}; }

json to_json(const DirectedShape& m) { return {{"p", m.p()}, {"arcs", pairs_to_json(m.arcs())}}; }

Graph graph_from_json(const json& j) {
  const int p = j.at("p").get<int>();
  return Graph::from_edges(p, pairs_from_json(j.at("edges"), p, "edges"));
}

DirectedShape shape_from_json(const json& j) {
  const int p = j.at("p").get<int>();
  DirectedShape m(p);
  for (const auto& [i, k] : pairs_from_json(j.at("arcs"), p, "arcs")) m.add_arc(i, k);
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& A) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json selection_to_json(const SelectionResult& result, const CollectionSpec& spec) {
  json out = is_directed(spec.family) ? to_json(result.m_hat) : to_json(symmetrize(result.m_hat));
  out["family"] = std::string(family_name(spec.family));
  out["D"] = spec.D;
  out["strategy"] = std::string(strategy_name(result.strategy));
  out["exact"] = result.exact;
  out["theta"] = matrix_to_json(result.theta_hat.matrix());
  out["theta_tilde"] = matrix_to_json(result.theta_tilde.matrix());
  out["crit"] = result.crit;
  out["per_column_crit"] = result.per_column_crit;
  out["warnings"] = result.warnings;
  return out;
}

json truth_to_json(const GroundTruth& truth) {
  json out = to_json(truth.g);
  out["K_prec"] = matrix_to_json(truth.K_prec);
  out["C"] = matrix_to_json(truth.C);
  out["theta"] = matrix_to_json(truth.theta.matrix());
  out["sigma2"] = std::vector<double>(truth.sigma2.data(), truth.sigma2.data() + truth.sigma2.size());
  return out;
}

json config_to_json(const BenchConfig& c) {
  json out = {{"n", c.n},
              {"p", c.p},
              {"graphs", c.graphs},
              {"reps", c.reps},
              {"K", c.Ks},
              {"family", std::string(family_name(c.family))},
              {"dmax", c.D},
              {"strategy", std::string(strategy_name(c.strategy))},
              {"ours", c.run_ours},
              {"mb", c.run_mb},
              {"oracle", c.oracle},
              {"alpha", c.alpha},
              {"mb_refit", c.mb_refit},
              {"margin", c.margin},
              {"seed", c.seed},
              {"node_budget", c.node_budget}};
  if (c.q) out["q"] = *c.q;
  if (c.s) out["s"] = *c.s;
  return out;
}

json report_to_json(const BenchReport& report) {
  json methods = json::array();
  for (const MethodReport& m : report.methods) {
    json rows = json::array();
    for (const GraphRow& r : m.rows) {
      rows.push_back({{"graph_id", r.graph_id},
                      {"true_edges", r.true_edges},
                      {"r_risk", number_or_null(r.r_risk)},
                      {"power", number_or_null(r.power)},
                      {"fdr", r.fdr},
                      {"mean_deg", r.mean_deg},
                      {"n_reps", r.n_reps},
                      {"mean_loss", r.mean_loss},
                      {"oracle", number_or_null(r.oracle)}});
    }
    methods.push_back({{"method", m.method},
                       {"r_risk", number_or_null(m.r_risk)},
                       {"power", number_or_null(m.power)},
                       {"fdr", number_or_null(m.fdr)},
                       {"mean_deg", number_or_null(m.mean_deg)},
                       {"n_reps", m.n_reps},
                       {"graphs", std::move(rows)}});
  }
  return {{"config", config_to_json(report.config)},
          {"edge_probability", report.q},
          {"methods", std::move(methods)},
          {"warnings", report.warnings}};
}

std::string config_comment_lines(const json& config) {
  std::ostringstream out;
  for (const auto& [key, value] : config.items()) {
    out << "# " << key << '=';
    if (value.is_string()) {
      out << value.get<std::string>();
    } else if (value.is_array()) {
      bool first = true;
      for (const json& v : value) {
        out << (first ? "" : ",") << (v.is_number_float() ? format_number(v.get<double>()) : v.dump());
        first = false;
      }
    } else if (value.is_number_float()) {
      out << format_number(value.get<double>());
    } else {
      out << value.dump();
    }
    out << '\n';
  }
  return out.str();
}

std::string report_to_csv(const BenchReport& report) {
  json config = config_to_json(report.config);
  config["edge_probability"] = report.q;
  std::ostringstream out;
  out << config_comment_lines(config);
  out << "method,graph_id,r_risk,power,fdr,mean_deg,n_reps\n";
  for (const MethodReport& m : report.methods) {
    for (const GraphRow& r : m.rows) {
      out << m.method << ',' << r.graph_id << ',' << format_number(r.r_risk) << ',' << format_number(r.power) << ','
          << format_number(r.fdr) << ',' << format_number(r.mean_deg) << ',' << r.n_reps << '\n';
    }
    out << m.method << ",summary," << format_number(m.r_risk) << ',' << format_number(m.power) << ','
        << format_number(m.fdr) << ',' << format_number(m.mean_deg) << ',' << m.n_reps << '\n';
  }
  return out.str();
}

json prop1_to_json(const Prop1Result& r) {
  const Prop1Config& c = r.config;
  return {{"config",
           {{"gamma", c.gamma},
            {"n", c.n},
            {"p", c.p},
            {"dmax", c.D},
            {"reps", c.reps},
            {"seed", c.seed},
            {"K", c.K},
            {"family", std::string(family_name(c.family))},
            {"strategy", std::string(strategy_name(r.strategy))}}},
          {"hypothesis_holds", r.hypothesis_holds},
          {"hypothesis_bound", r.hypothesis_bound},
          {"deflated", size_summary_to_json(r.deflated)},
          {"control", size_summary_to_json(r.control)},
          {"median_gap", r.deflated.median_column - r.control.median_column},
          {"warnings", r.warnings}};
}

std::string prop1_to_csv(const Prop1Result& r) {
  const json summary = prop1_to_json(r);
  json config = summary.at("config");
  config["hypothesis_holds"] = r.hypothesis_holds;
  std::ostringstream out;
  out << config_comment_lines(config);
  out << "penalty,kind,size,count\n";
  auto histogram = [&](const char* penalty, const char* kind, const std::vector<int>& sizes) {
    std::map<int, int> counts;
    for (int s : sizes) ++counts[s];
    for (const auto& [size, count] : counts) out << penalty << ',' << kind << ',' << size << ',' << count << '\n';
  };
  histogram("deflated", "column", r.deflated.column_sizes);
  histogram("deflated", "total", r.deflated.total_sizes);
  histogram("control", "column", r.control.column_sizes);
  histogram("control", "total", r.control.total_sizes);
  return out.str();
}

std::string penalty_to_csv(const PenaltyTable& table) {
  std::ostringstream out;
  out << "d,pen\n";
  for (int d = 0; d <= table.max_degree(); ++d) out << d << ',' << format_number(table(d)) << '\n';
  return out.str();
}

Sample parse_sample_csv(std::istream& in, std::string_view source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  bool first_content = true;
  std::size_t width = 0;
  auto fail = [&](const std::string& what) {
    throw InputError(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t c = 0; c < fields.size(); ++c) numeric = numeric && parse_double(fields[c], values[c]);
    if (first_content) {
      first_content = false;
      width = fields.size();
      if (!numeric) continue;  // header row
    }
    if (fields.size() != width) {
      fail("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_double(fields[c], values[c])) fail("field " + std::to_string(c + 1) + " is not a number: '" + fields[c] + "'");
      if (!std::isfinite(values[c])) fail("field " + std::to_string(c + 1) + " is not finite");
    }
    rows.push_back(std::move(values));
  }
  if (rows.size() < 3) {
    throw InputError(std::string(source) + ": need at least 3 observation rows, found " + std::to_string(rows.size()));
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return Sample(std::move(X));
}

Sample read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file '" + path + "'");
  return parse_sample_csv(in, path);
}

}  // namespace ggmsel

#pragma once

#include <istream>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ggmsel/fitting.hpp"
#include "ggmsel/genmodel.hpp"
#include "ggmsel/graphs.hpp"
#include "ggmsel/metrics.hpp"
#include "ggmsel/selector.hpp"
#include "ggmsel/specfun.hpp"

namespace ggmsel {

// JSON and CSV formats. Vertices are 1-based in every file; matrices are
// arrays of rows, so theta[i][j] is entry (i, j).

/// {"p": 10, "edges": [[1, 4], [2, 7]]}, edges sorted with i < j.
nlohmann::json to_json(const Graph& g);
/// {"p": 10, "arcs": [[1, 4], [4, 1]]}, arcs (i, j) meaning i in m_j, sorted.
nlohmann::json to_json(const DirectedShape& m);
Graph graph_from_json(const nlohmann::json& j);
DirectedShape shape_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& A);

/// Shape JSON (edges for undirected families, arcs otherwise) plus theta,
/// theta_tilde, crit, per_column_crit, warnings, strategy and exactness.
nlohmann::json selection_to_json(const SelectionResult& result, const CollectionSpec& spec);

nlohmann::json truth_to_json(const GroundTruth& truth);

nlohmann::json config_to_json(const BenchConfig& config);
nlohmann::json report_to_json(const BenchReport& report);
/// "# key=value" config lines, then method,graph_id,r_risk,power,fdr,mean_deg,n_reps
/// with one row per graph and a "summary" row per method. Undefined values are NA.
std::string report_to_csv(const BenchReport& report);

nlohmann::json prop1_to_json(const Prop1Result& result);
/// "# key=value" config lines, then penalty,kind,size,count histograms of
/// per-column and total selected sizes.
std::string prop1_to_csv(const Prop1Result& result);

/// "# key=value" lines for each entry of an object, in key order.
std::string config_comment_lines(const nlohmann::json& config);

/// d,pen rows.
std::string penalty_to_csv(const PenaltyTable& table);

/// Shortest decimal that round-trips; NA for NaN.
std::string format_number(double x);

/// Comma-separated numeric matrix, rows = observations. A first row holding
/// any non-numeric field is taken as a header. Errors name the line.
Sample parse_sample_csv(std::istream& in, std::string_view source = "<input>");
Sample read_sample_csv(const std::string& path);

}  // namespace ggmsel

#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "ggmsel/error.hpp"
#include "ggmsel/io.hpp"

using namespace ggmsel;

TEST(GraphJson, OneBasedSortedRoundTrip) {
  const Graph g = Graph::from_edges(10, {{6, 1}, {0, 3}});
  const nlohmann::json j = to_json(g);
  EXPECT_EQ(j.dump(), R"({"edges":[[1,4],[2,7]],"p":10})");
  EXPECT_EQ(graph_from_json(j), g);

  DirectedShape m(10);
  m.add_arc(3, 0);
  m.add_arc(0, 3);
  EXPECT_EQ(to_json(m).dump(), R"({"arcs":[[1,4],[4,1]],"p":10})");
  EXPECT_EQ(shape_from_json(to_json(m)), m);

  EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"p":3,"edges":[[1,1]]})")), InputError);
  EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"p":3,"edges":[[0,2]]})")), InputError);
}

TEST(MatrixJson, RowsAreFirstIndex) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 1) = 0.25;
  EXPECT_EQ(matrix_to_json(A).dump(), "[[0.0,0.25],[0.0,0.0]]");
}

TEST(SampleCsv, HeaderDetectionAndCleanup) {
  std::istringstream with_header("\xEF\xBB\xBF" "a,b\r\n1,2\r\n\r\n3, 4\r\n-5,+6e0\r\n");
  const Sample s = parse_sample_csv(with_header);
  EXPECT_EQ(s.n(), 3);
  EXPECT_EQ(s.p(), 2);
  EXPECT_EQ(s.X()(1, 1), 4.0);
  EXPECT_EQ(s.X()(2, 1), 6.0);

  std::istringstream plain("1,2\n3,4\n5,6\n");
  EXPECT_EQ(parse_sample_csv(plain).n(), 3);
}

TEST(SampleCsv, ErrorsNameTheLine) {
  std::istringstream ragged("x,y\n1,2\n3\n4,5\n");
  try {
    parse_sample_csv(ragged, "data.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("data.csv:3:"), std::string::npos) << e.what();
  }
  std::istringstream bad_value("1,2\n3,abc\n4,5\n");
  try {
    parse_sample_csv(bad_value, "d");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("d:2:"), std::string::npos) << e.what();
  }
  std::istringstream too_short("1,2\n3,4\n");
  EXPECT_THROW(parse_sample_csv(too_short), InputError);
  std::istringstream infinite("1,2\n3,inf\n4,5\n");
  EXPECT_THROW(parse_sample_csv(infinite), InputError);
  EXPECT_THROW(read_sample_csv("/nonexistent/file.csv"), InputError);
}

TEST(PenaltyCsv, Rows) {
  const std::string csv = penalty_to_csv(build_penalty_table(15, 10, 2.0, 4));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "d,pen");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST(Numbers, ShortestRoundTripAndNA) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "NA");
  const double x = 2.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(ReportFormats, EmbedConfigAndUseNA) {
  BenchConfig c;
  c.q = 0.1;
  c.graphs = 2;
  c.reps = 2;
  c.oracle = false;
  c.seed = 77;
  const BenchReport r = run_benchmark(c);
  const std::string csv = report_to_csv(r);
  EXPECT_NE(csv.find("# seed=77\n"), std::string::npos);
  EXPECT_NE(csv.find("# edge_probability=0.1\n"), std::string::npos);
  EXPECT_EQ(csv.find("threads"), std::string::npos);
  EXPECT_NE(csv.find("method,graph_id,r_risk,power,fdr,mean_deg,n_reps\n"), std::string::npos);
  EXPECT_NE(csv.find("K=2,summary,NA,"), std::string::npos);
  const nlohmann::json j = report_to_json(r);
  EXPECT_EQ(j.at("config").at("seed"), 77);
  EXPECT_TRUE(j.at("methods")[0].at("r_risk").is_null());
}

TEST(SelectionJson, Schema) {
  Eigen::MatrixXd X(6, 3);
  X << 1, 2, 0.5, 2, 4.1, 1, 3, 5.9, 0.2, 4, 8.2, 0.9, 5, 9.8, 0.1, 6, 12.1, 0.4;
  const Sample s(X);
  const CollectionSpec spec(Family::DegreeDirected, 1, 3);
  const SelectionResult r = select(s, spec, build_penalty_table(6, 3, 2.0, 1), Strategy::ExactDecomposed);
  const nlohmann::json j = selection_to_json(r, spec);
  EXPECT_EQ(j.at("p"), 3);
  EXPECT_TRUE(j.contains("arcs"));
  EXPECT_EQ(j.at("theta").size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(j.at("theta")[i][i], 0.0);
  EXPECT_EQ(j.at("strategy"), "exact_decomposed");
  EXPECT_EQ(j.at("per_column_crit").size(), 3u);
  EXPECT_TRUE(j.at("warnings").is_array());
  const nlohmann::json und = selection_to_json(select(s, {Family::Degree, 1, 3}, build_penalty_table(6, 3, 2.0, 1),
                                                      Strategy::Exhaustive),
                                               {Family::Degree, 1, 3});
  EXPECT_TRUE(und.contains("edges"));
}

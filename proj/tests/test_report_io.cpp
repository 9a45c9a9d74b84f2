#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "bmw/design.hpp"
#include "bmw/diagnostics.hpp"
#include "bmw/errors.hpp"
#include "bmw/report_io.hpp"
#include "testutil.hpp"

namespace {

bmw::SubjectTable four_subjects() {
  return testutil::make_table({"f0"}, {{0.0}, {1.0}, {2.0}, {3.0}});
}

bmw::AssignmentVector labels(std::vector<int> v) {
  bmw::AssignmentVector a;
  a.labels = std::move(v);
  return a;
}

}  // namespace

TEST_CASE("doubles survive a text round trip") {
  for (double v : {1.0 / 3.0, 0.1, -0.0, 1e300, 5e-324, 37.869999999999997}) {
    std::string text = bmw::format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
}

TEST_CASE("assignment files round trip through table order") {
  bmw::SubjectTable table = four_subjects();
  bmw::AssignmentVector a = labels({1, 0, 0, 1});
  std::string text = bmw::assignment_csv(table, a);
  CHECK(text == "id,group\ns1,B\ns2,A\ns3,A\ns4,B\n");

  bmw::CsvTable csv = bmw::parse_csv(text);
  CHECK(bmw::parse_assignment_csv(csv, table).labels == a.labels);

  // Row order in the file must not matter.
  std::swap(csv.rows[0], csv.rows[3]);
  std::swap(csv.rows[1], csv.rows[2]);
  CHECK(bmw::parse_assignment_csv(csv, table).labels == a.labels);
}

TEST_CASE("assignment parsing rejects malformed files") {
  bmw::SubjectTable table = four_subjects();
  std::string good = bmw::assignment_csv(table, labels({1, 0, 0, 1}));

  SUBCASE("wrong header") {
    bmw::CsvTable csv = bmw::parse_csv("subject,arm\ns1,A\ns2,A\ns3,B\ns4,B\n");
    CHECK_THROWS_AS(bmw::parse_assignment_csv(csv, table), bmw::IoError);
  }
  SUBCASE("unknown group label") {
    bmw::CsvTable csv = bmw::parse_csv("id,group\ns1,A\ns2,A\ns3,B\ns4,C\n");
    CHECK_THROWS_AS(bmw::parse_assignment_csv(csv, table), bmw::ValidationError);
  }
  SUBCASE("duplicate subject") {
    bmw::CsvTable csv = bmw::parse_csv("id,group\ns1,A\ns1,B\ns3,A\ns4,B\n");
    CHECK_THROWS_AS(bmw::parse_assignment_csv(csv, table), bmw::ValidationError);
  }
  SUBCASE("missing subject") {
    bmw::CsvTable csv = bmw::parse_csv("id,group\ns1,A\ns2,B\n");
    CHECK_THROWS_AS(bmw::parse_assignment_csv(csv, table), bmw::ValidationError);
  }
  SUBCASE("stray subject not in the table") {
    bmw::CsvTable csv = bmw::parse_csv("id,group\ns1,A\ns2,A\ns3,B\ns4,B\ns5,A\ns6,B\n");
    CHECK_THROWS_AS(bmw::parse_assignment_csv(csv, table), bmw::ValidationError);
  }
  SUBCASE("unbalanced groups") {
    bmw::CsvTable csv = bmw::parse_csv("id,group\ns1,A\ns2,A\ns3,A\ns4,B\n");
    CHECK_THROWS_AS(bmw::parse_assignment_csv(csv, table), bmw::ValidationError);
  }
}

TEST_CASE("balance serialization carries every column") {
  bmw::BalanceTable t;
  t.rows.push_back({"f0", 0.25, 0.75, 0.1, 0.2, 1.29});
  t.rows.push_back({"f1", 0.0, 1.0, 0.0, 0.0,
                    std::numeric_limits<double>::infinity()});

  std::string csv_text = bmw::balance_csv(t);
  bmw::CsvTable csv = bmw::parse_csv(csv_text);
  REQUIRE(csv.header == std::vector<std::string>{"name", "control_mean", "treatment_mean",
                                                 "control_variance", "treatment_variance",
                                                 "smd"});
  REQUIRE(csv.rows.size() == 2);
  CHECK(csv.rows[0][0] == "f0");
  CHECK(std::strtod(csv.rows[0][5].c_str(), nullptr) == 1.29);
  CHECK(std::strtod(csv.rows[1][5].c_str(), nullptr) ==
        std::numeric_limits<double>::infinity());

  nlohmann::json j = bmw::balance_json(t);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["smd"].get<double>() == doctest::Approx(1.29));
  CHECK(j[1]["smd"].is_null());  // no JSON number for infinity
}

TEST_CASE("kde curves serialize in long format") {
  bmw::KdeCurve a;
  a.group_label = "A";
  a.grid = {0.0, 0.5};
  a.density = {0.2, 0.4};
  a.bandwidth = 0.3;
  bmw::KdeCurve b = a;
  b.group_label = "B";

  bmw::CsvTable csv = bmw::parse_csv(bmw::kde_curves_csv({a, b}));
  REQUIRE(csv.header == std::vector<std::string>{"group", "x", "density"});
  REQUIRE(csv.rows.size() == 4);
  CHECK(csv.rows[0][0] == "A");
  CHECK(csv.rows[3][0] == "B");
  CHECK(std::strtod(csv.rows[1][2].c_str(), nullptr) == 0.4);

  nlohmann::json j = bmw::kde_curves_json({a, b});
  REQUIRE(j.size() == 2);
  CHECK(j[0]["group"] == "A");
  CHECK(j[0]["bandwidth"].get<double>() == doctest::Approx(0.3));
  CHECK(j[1]["x"].size() == 2);
}

TEST_CASE("design reports carry the full outcome") {
  bmw::SubjectTable table = testutil::make_table(
      {"f0", "f1"}, {{1, 2}, {4, 3}, {2, 8}, {9, 5}, {3, 1}, {7, 6}});
  bmw::DesignConfig config;
  config.repetitions = 30;
  config.master_seed = 12;
  bmw::DesignOutcome outcome = bmw::run_bmw(table, table.feature_names, config);

  bmw::ScalingParams params = bmw::fit_minmax(table, table.feature_names);
  bmw::BalanceTable balance = bmw::balance_table_scaled(
      bmw::apply_minmax(params, table), outcome.best.assignment, &outcome.best.fit.scores);

  nlohmann::json echo{{"input", "subjects.csv"}, {"seed", 12}};
  nlohmann::json j = bmw::design_report_json(outcome, table, balance, echo);

  CHECK(j["config"] == echo);
  CHECK(j["master_seed"].get<std::uint64_t>() == 12);
  CHECK(j["repetitions"].get<int>() == 30);
  CHECK(j["features"].size() == 2);
  CHECK(j["excluded_features"].empty());
  CHECK(j["best"]["m"].get<int>() == outcome.best.m);
  CHECK(j["best"]["delta_k"].get<double>() == doctest::Approx(outcome.best.delta_k));
  REQUIRE(j["best"]["pairs"].size() == 3);
  CHECK(j["best"]["groups"]["A"].size() == 3);
  CHECK(j["best"]["groups"]["B"].size() == 3);
  REQUIRE(j["trace"].size() == 30);
  CHECK(j["trace"][0][0].get<int>() == 1);
  CHECK(j["balance"].size() == balance.rows.size());

  // Every pair connects a control id to a treatment id from the groups.
  for (const auto& pair : j["best"]["pairs"]) {
    bool control_found = false, treatment_found = false;
    for (const auto& id : j["best"]["groups"]["A"])
      if (id == pair["control_id"]) control_found = true;
    for (const auto& id : j["best"]["groups"]["B"])
      if (id == pair["treatment_id"]) treatment_found = true;
    CHECK(control_found);
    CHECK(treatment_found);
  }
}

TEST_CASE("sweep serialization keeps the curve and the elbow") {
  bmw::SweepResult sweep;
  sweep.curve = {{1, 0.9}, {10, 0.2}, {20, 0.19}};
  sweep.master_seed = 4;

  SUBCASE("with an elbow") {
    sweep.elbow = 10;
    nlohmann::json j = bmw::sweep_json(sweep, 0.01);
    CHECK(j["elbow"].get<int>() == 10);
    CHECK(j["epsilon"].get<double>() == doctest::Approx(0.01));
    REQUIRE(j["curve"].size() == 3);
    CHECK(j["curve"][1][0].get<int>() == 10);
    CHECK(j["curve"][1][1].get<double>() == doctest::Approx(0.2));
  }
  SUBCASE("without an elbow") {
    nlohmann::json j = bmw::sweep_json(sweep, 0.01);
    CHECK(j["elbow"].is_null());
  }
  SUBCASE("csv layout") {
    bmw::CsvTable csv = bmw::parse_csv(bmw::sweep_csv(sweep));
    REQUIRE(csv.header == std::vector<std::string>{"M", "min_delta_k"});
    REQUIRE(csv.rows.size() == 3);
    CHECK(csv.rows[2][0] == "20");
  }
}

TEST_CASE("effect and comparison reports expose the agreed keys") {
  bmw::EffectEstimate e;
  e.ate = 0.5;
  e.std_dev_control = 0.7;
  e.std_dev_treatment = 0.6;
  e.pooled_std_dev = 0.65;
  e.method = bmw::EffectMethod::regression_adjusted;
  e.n_per_group = 14;

  nlohmann::json j = bmw::effect_json(e);
  CHECK(j["method"] == "regression_adjusted");
  CHECK(j["ate"].get<double>() == doctest::Approx(0.5));
  CHECK(j["sd_control"].get<double>() == doctest::Approx(0.7));
  CHECK(j["sd_treatment"].get<double>() == doctest::Approx(0.6));
  CHECK(j["pooled_sd"].get<double>() == doctest::Approx(0.65));
  CHECK(j["n_per_group"].get<int>() == 14);

  bmw::ComparisonReport report;
  report.matched_ate = 0.4;
  report.paired_ate = 0.45;
  nlohmann::json cj = bmw::comparison_json(report);
  CHECK(cj["matched_ate"].get<double>() == doctest::Approx(0.4));
  CHECK(cj["sd_reduction_pct"].is_null());
  report.sd_reduction_pct = 37.87;
  CHECK(bmw::comparison_json(report)["sd_reduction_pct"].get<double>() ==
        doctest::Approx(37.87));
}

TEST_CASE("benchmark reports echo the generating spec") {
  bmw::SyntheticSpec spec;
  spec.n_subjects = 8;
  spec.feature_target_correlations = {0.5};
  spec.true_effect = 0.3;
  spec.seed = 0;
  bmw::BenchConfig config;
  config.replications = 4;
  config.repetitions = 10;
  config.master_seed = 6;
  std::vector<bmw::ReplicationTrace> traces;
  bmw::BenchResult result = bmw::run_benchmark(spec, config, &traces);

  nlohmann::json j = bmw::bench_json(result, spec, config);
  CHECK(j["replications"].get<int>() == 4);
  CHECK(j["repetitions"].get<int>() == 10);
  CHECK(j["spec"]["n_subjects"].get<int>() == 8);
  CHECK(j["spec"]["true_effect"].get<double>() == doctest::Approx(0.3));
  CHECK(j["mse_paired"].is_number());
  CHECK(j["sd_reduction_pct"].is_number());

  bmw::CsvTable csv = bmw::parse_csv(bmw::replications_csv(traces));
  REQUIRE(csv.header ==
          std::vector<std::string>{"replication", "ate_random", "ate_bmw", "ate_paired",
                                   "delta_k"});
  REQUIRE(csv.rows.size() == 4);
  CHECK(csv.rows[0][0] == "1");
  CHECK(csv.rows[3][0] == "4");
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crowdnav/experiment.hpp"

using namespace crowdnav;

namespace {

ExperimentSpec tiny_spec() {
    Config cfg = Config::from_string(
        "scenario = 1\n"
        "vehicle = holonomic\n"
        "planners = es_fmm\n"
        "populations = 8\n"
        "trials = 1\n"
        "base_seed = 5\n"
        "fast_iterations = 8\n"
        "fast_path_expansions = 20000\n"
        "solver_scenarios = 8\n"
        "solver_max_depth = 16\n"
        "rollout_max_steps = 12\n"
        "step_limit = 400\n");
    return ExperimentSpec::from_config(cfg);
}

}  // namespace

TEST_CASE("outperform counting is strict") {
    const std::vector<double> base{10.0, 12.0};
    const std::vector<double> cand{9.0, 13.0};
    CHECK(compare_outperform(base, cand) == 1);
    CHECK(compare_outperform(base, base) == 0);
    const std::vector<double> wins{1.0, 2.0};
    CHECK(compare_outperform(base, wins) == 2);
    const std::vector<double> short_list{1.0};
    CHECK_THROWS_AS(compare_outperform(base, short_list), std::invalid_argument);
}

TEST_CASE("a single trial reports its raw values with zero SEM") {
    const ExperimentSpec spec = tiny_spec();
    std::ostringstream csv;
    const MetricsTable table = run_experiment(spec, csv);
    REQUIRE(table.cells.size() == 1);
    const CellMetrics& cell = table.cells[0];
    CHECK(cell.trials == 1);
    CHECK(cell.sem_time == 0.0);
    CHECK(cell.sem_sb == 0.0);

    // The single CSV row carries the same travel time.
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);  // header
    REQUIRE(std::getline(in, line));
    std::istringstream row(line);
    std::string field;
    for (int i = 0; i < 7; ++i) std::getline(row, field, ',');
    CHECK(std::stod(field) == doctest::Approx(cell.mean_time));
}

TEST_CASE("identical planners tie and never outperform each other") {
    ExperimentSpec spec = tiny_spec();
    spec.planners = {PlannerKind::ES_FMM, PlannerKind::ES_FMM};
    spec.trials = 2;
    std::ostringstream csv;
    const MetricsTable table = run_experiment(spec, csv);
    REQUIRE(table.cells.size() == 2);
    CHECK(table.cells[0].mean_time == table.cells[1].mean_time);
    CHECK(table.cells[1].outperformed == 0);
}

TEST_CASE("reruns reproduce the CSV byte for byte") {
    const ExperimentSpec spec = tiny_spec();
    std::ostringstream a;
    std::ostringstream b;
    run_experiment(spec, a);
    run_experiment(spec, b);
    CHECK(a.str() == b.str());
    CHECK(!a.str().empty());
}

TEST_CASE("worker parallelism does not change the CSV") {
    ExperimentSpec spec = tiny_spec();
    spec.trials = 3;
    spec.planners = {PlannerKind::ES_FMM, PlannerKind::ES_PRM};
    std::ostringstream serial;
    run_experiment(spec, serial);
    spec.workers = 4;
    std::ostringstream parallel;
    run_experiment(spec, parallel);
    CHECK(serial.str() == parallel.str());
}

TEST_CASE("the aggregator reproduces the table from raw CSV") {
    ExperimentSpec spec = tiny_spec();
    spec.trials = 3;
    spec.planners = {PlannerKind::LS_ASTAR, PlannerKind::ES_FMM};
    std::ostringstream csv;
    const MetricsTable direct = run_experiment(spec, csv);

    std::istringstream in(csv.str());
    const MetricsTable again = aggregate_csv(in);
    REQUIRE(direct.cells.size() == again.cells.size());
    for (size_t i = 0; i < direct.cells.size(); ++i) {
        CHECK(direct.cells[i].planner == again.cells[i].planner);
        CHECK(direct.cells[i].population == again.cells[i].population);
        CHECK(direct.cells[i].mean_time == doctest::Approx(again.cells[i].mean_time));
        CHECK(direct.cells[i].sem_time == doctest::Approx(again.cells[i].sem_time));
        CHECK(direct.cells[i].mean_sb == doctest::Approx(again.cells[i].mean_sb));
        CHECK(direct.cells[i].outperformed == again.cells[i].outperformed);
        CHECK(direct.cells[i].unsafe == again.cells[i].unsafe);
    }
}

TEST_CASE("mean and SEM match an independent recomputation from the CSV") {
    ExperimentSpec spec = tiny_spec();
    spec.trials = 4;
    std::ostringstream csv;
    const MetricsTable table = run_experiment(spec, csv);

    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    std::vector<double> times;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string field;
        for (int i = 0; i < 7; ++i) std::getline(row, field, ',');
        times.push_back(std::stod(field));
    }
    REQUIRE(times.size() == 4);
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= times.size();
    double ss = 0.0;
    for (double t : times) ss += (t - mean) * (t - mean);
    const double sem = std::sqrt(ss / (times.size() - 1)) / std::sqrt(4.0);
    CHECK(table.cells[0].mean_time == doctest::Approx(mean));
    CHECK(table.cells[0].sem_time == doctest::Approx(sem));
}

TEST_CASE("spec files parse into typed experiment plans") {
    const Config cfg = Config::from_string(
        "scenario = 3\n"
        "vehicle = dubins\n"
        "planners = ls_astar, es_nhv_straight\n"
        "populations = 100, 200\n"
        "trials = 7\n"
        "base_seed = 99\n"
        "budget_s = 0.5\n");
    const ExperimentSpec spec = ExperimentSpec::from_config(cfg);
    CHECK(spec.scenario == ScenarioId::L_LOBBY);
    CHECK(spec.vehicle == VehicleModel::Kind::DUBINS);
    REQUIRE(spec.planners.size() == 2);
    CHECK(spec.planners[0] == PlannerKind::LS_ASTAR);
    CHECK(spec.planners[1] == PlannerKind::ES_NHV_STRAIGHT);
    CHECK(spec.populations == std::vector<int>{100, 200});
    CHECK(spec.trials == 7);
    CHECK(spec.base_seed == 99);

    // Dubins defaults to a 4 m/s cap unless overridden.
    const EpisodeConfig ec = episode_config(spec, PlannerKind::ES_NHV_STRAIGHT, 100, 1);
    CHECK(ec.params.v_max == 4.0);
    CHECK(ec.astar.heading_changes.size() == 19);
}

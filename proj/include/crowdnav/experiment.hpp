#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "crowdnav/config.hpp"
#include "crowdnav/simulator.hpp"
#include "crowdnav/world_model.hpp"

namespace crowdnav {

/// A batch of paired trials: per (population, trial) one world seed shared by
/// every planner in the list, so travel times compare like for like.
struct ExperimentSpec {
    ScenarioId scenario = ScenarioId::OPEN_FIELD;
    VehicleModel::Kind vehicle = VehicleModel::Kind::HOLONOMIC;
    std::vector<PlannerKind> planners{PlannerKind::LS_ASTAR, PlannerKind::ES_FMM};
    std::vector<int> populations{200};
    int trials = 20;
    uint64_t base_seed = 1;
    double budget_s = 0.5;        // extended-space planning budget per step
    double ls_solver_budget_s = 0.35;
    double ls_path_budget_s = 0.15;
    /// Positive: deterministic iteration caps replace the wall-clock budgets
    /// (the fast-test mode; required for byte-identical reruns).
    int fast_iterations = 0;
    int fast_path_expansions = 0;
    int step_limit = 600;
    int workers = 1;
    Config overrides;  // forwarded to the per-module parameter structs

    static ExperimentSpec from_config(const Config& cfg);
};

struct EpisodeRow {
    ScenarioId scenario;
    VehicleModel::Kind vehicle;
    PlannerKind planner;
    int population = 0;
    int trial = 0;
    uint64_t seed = 0;
    EpisodeResult result;
};

struct CellMetrics {
    PlannerKind planner;
    int population = 0;
    int trials = 0;
    double mean_time = 0.0;
    double sem_time = 0.0;
    double mean_sb = 0.0;
    double sem_sb = 0.0;
    int outperformed = 0;  // strict travel-time wins against the baseline
    int unsafe = 0;
    int failures = 0;
};

struct MetricsTable {
    std::vector<CellMetrics> cells;
    std::string render() const;
};

/// Count of trials where the candidate's time is strictly below the
/// baseline's. Throws on length mismatch.
int compare_outperform(std::span<const double> baseline, std::span<const double> candidate);

/// Runs every (population, trial, planner) episode, writes one CSV row each,
/// and aggregates the table. Rerunning the same spec reproduces the CSV
/// byte for byte.
MetricsTable run_experiment(const ExperimentSpec& spec, std::ostream& csv);

/// Recomputes the table from a previously written CSV.
MetricsTable aggregate_csv(std::istream& csv);

const std::string& csv_header();
EpisodeConfig episode_config(const ExperimentSpec& spec, PlannerKind planner, int population,
                             uint64_t seed);

}  // namespace crowdnav

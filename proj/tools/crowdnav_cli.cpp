#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "crowdnav/config.hpp"
#include "crowdnav/experiment.hpp"
#include "crowdnav/fmm_planner.hpp"
#include "crowdnav/prm_planner.hpp"
#include "crowdnav/rng.hpp"
#include "crowdnav/world_model.hpp"

namespace fs = std::filesystem;
using namespace crowdnav;

namespace {

int cmd_run(const std::string& spec_path, const std::string& out_dir, uint64_t seed_override,
            double budget_override, int trials_override, int workers_override,
            bool strict_safety) {
    Config cfg = Config::from_file(spec_path);
    if (seed_override != 0) cfg.set("base_seed", std::to_string(seed_override));
    if (budget_override > 0.0) cfg.set("budget_s", std::to_string(budget_override));
    if (trials_override > 0) cfg.set("trials", std::to_string(trials_override));
    if (workers_override > 0) cfg.set("workers", std::to_string(workers_override));
    const ExperimentSpec spec = ExperimentSpec::from_config(cfg);

    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / "episodes.csv";
    std::ofstream csv(csv_path);
    if (!csv) {
        std::cerr << "cannot write " << csv_path << '\n';
        return 1;
    }
    const MetricsTable table = run_experiment(spec, csv);
    csv.close();

    const fs::path table_path = fs::path(out_dir) / "table.txt";
    std::ofstream table_out(table_path);
    table_out << table.render();
    std::cout << table.render();
    std::cout << "episodes: " << csv_path.string() << '\n';

    if (strict_safety)
        for (const auto& cell : table.cells)
            if (cell.unsafe > 0) {
                std::cerr << "unsafe trajectories present\n";
                return 2;
            }
    return 0;
}

int cmd_table(const std::string& csv_path) {
    std::ifstream csv(csv_path);
    if (!csv) {
        std::cerr << "cannot read " << csv_path << '\n';
        return 1;
    }
    std::cout << aggregate_csv(csv).render();
    return 0;
}

int cmd_solve_field(int scenario, const std::string& out_dir, double cell, int prm_nodes,
                    int prm_neighbors, uint64_t seed) {
    const Environment env = build_scenario(scenario_from_index(scenario));
    fs::create_directories(out_dir);

    const SpeedGrid grid = SpeedGrid::from_environment(env, cell, 1.0);
    const TravelTimeGrid field = solve_travel_time_field(grid, grid.cell_of(env.vehicle_goal));
    dump_time_csv(field, (fs::path(out_dir) / "travel_time.csv").string());
    dump_gradient_csv(field, (fs::path(out_dir) / "gradient.csv").string());

    PrmParams params;
    params.node_count = prm_nodes;
    params.neighbor_count = prm_neighbors;
    const Roadmap roadmap = build_roadmap(env, params, seed);
    dump_roadmap_csv(roadmap, (fs::path(out_dir) / "roadmap.csv").string());

    std::cout << "wrote travel_time.csv, gradient.csv, roadmap.csv to " << out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crowd navigation planning experiments"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir = "out";
    uint64_t seed = 0;
    double budget = 0.0;
    int trials = 0;
    int workers = 0;
    bool strict_safety = false;
    auto* run = app.add_subcommand("run", "Run an experiment spec and aggregate metrics");
    run->add_option("--spec", spec_path, "experiment spec file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override base_seed");
    run->add_option("--budget", budget, "override per-step planning budget (s)");
    run->add_option("--trials", trials, "override trial count");
    run->add_option("--workers", workers, "override worker thread count");
    run->add_flag("--strict-safety", strict_safety, "exit nonzero on any unsafe trajectory");

    std::string csv_path;
    auto* table = app.add_subcommand("table", "Aggregate a previously written episode CSV");
    table->add_option("--csv", csv_path, "episodes.csv path")->required();

    int scenario = 2;
    double cell = 1.0;
    int prm_nodes = 100;
    int prm_neighbors = 10;
    uint64_t field_seed = 1;
    auto* solve =
        app.add_subcommand("solve-field", "Dump the arrival-time field and roadmap for a scenario");
    solve->add_option("--scenario", scenario, "scenario index, 1..3");
    solve->add_option("--out", out_dir, "output directory");
    solve->add_option("--cell", cell, "grid cell size (m)");
    solve->add_option("--prm-nodes", prm_nodes, "roadmap node count");
    solve->add_option("--prm-neighbors", prm_neighbors, "roadmap neighbor count");
    solve->add_option("--seed", field_seed, "roadmap sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(spec_path, out_dir, seed, budget, trials, workers, strict_safety);
        if (table->parsed()) return cmd_table(csv_path);
        if (solve->parsed())
            return cmd_solve_field(scenario, out_dir, cell, prm_nodes, prm_neighbors, field_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

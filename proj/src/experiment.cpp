#include "crowdnav/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "crowdnav/config.hpp"

namespace crowdnav {

namespace {

std::string vehicle_name(VehicleModel::Kind kind) {
    return kind == VehicleModel::Kind::DUBINS ? "dubins" : "holonomic";
}

VehicleModel::Kind vehicle_from_name(const std::string& name) {
    if (name == "holonomic") return VehicleModel::Kind::HOLONOMIC;
    if (name == "dubins") return VehicleModel::Kind::DUBINS;
    throw std::invalid_argument("unknown vehicle type: " + name);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto begin = item.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        const auto end = item.find_last_not_of(" \t");
        out.push_back(item.substr(begin, end - begin + 1));
    }
    return out;
}

struct Moments {
    int n = 0;
    double mean = 0.0;
    double sem = 0.0;
};

Moments moments_of(const std::vector<double>& xs) {
    Moments m;
    m.n = static_cast<int>(xs.size());
    if (m.n == 0) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / m.n;
    if (m.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.sem = std::sqrt(ss / (m.n - 1)) / std::sqrt(static_cast<double>(m.n));
    }
    return m;
}

struct RawRow {
    std::string scenario;
    std::string vehicle;
    std::string planner;
    int population = 0;
    int trial = 0;
    double travel_time = 0.0;
    int sb_count = 0;
    bool unsafe = false;
    std::string outcome;
};

MetricsTable aggregate_rows(const std::vector<RawRow>& rows,
                            const std::vector<std::string>& planner_order,
                            const std::vector<int>& population_order) {
    const std::string baseline = [&] {
        for (const auto& p : planner_order)
            if (p == planner_name(PlannerKind::LS_ASTAR)) return p;
        return planner_order.empty() ? std::string() : planner_order.front();
    }();

    MetricsTable table;
    for (int population : population_order) {
        // Per-trial travel times of the baseline, for the outperform counts.
        std::map<int, double> baseline_times;
        for (const auto& r : rows)
            if (r.population == population && r.planner == baseline && r.outcome != "planner_failure")
                baseline_times[r.trial] = r.travel_time;

        for (const auto& planner : planner_order) {
            CellMetrics cell;
            cell.planner = planner_from_name(planner);
            cell.population = population;
            std::vector<double> times;
            std::vector<double> sbs;
            for (const auto& r : rows) {
                if (r.population != population || r.planner != planner) continue;
                cell.trials += 1;
                if (r.outcome == "planner_failure") {
                    cell.failures += 1;
                    continue;
                }
                times.push_back(r.travel_time);
                sbs.push_back(r.sb_count);
                if (r.unsafe) cell.unsafe += 1;
                if (planner != baseline) {
                    const auto it = baseline_times.find(r.trial);
                    if (it != baseline_times.end() && r.travel_time < it->second)
                        cell.outperformed += 1;
                }
            }
            const Moments mt = moments_of(times);
            const Moments ms = moments_of(sbs);
            cell.mean_time = mt.mean;
            cell.sem_time = mt.sem;
            cell.mean_sb = ms.mean;
            cell.sem_sb = ms.sem;
            table.cells.push_back(cell);
        }
    }
    return table;
}

}  // namespace

ExperimentSpec ExperimentSpec::from_config(const Config& cfg) {
    ExperimentSpec spec;
    spec.scenario = scenario_from_index(cfg.get_int("scenario", 1));
    spec.vehicle = vehicle_from_name(cfg.get_string("vehicle", "holonomic"));
    if (cfg.has("planners")) {
        spec.planners.clear();
        for (const auto& name : split_list(cfg.get_string("planners")))
            spec.planners.push_back(planner_from_name(name));
    }
    if (cfg.has("populations")) {
        spec.populations.clear();
        for (double v : cfg.get_numbers("populations"))
            spec.populations.push_back(static_cast<int>(v));
    }
    spec.trials = cfg.get_int("trials", spec.trials);
    spec.base_seed = cfg.get_uint64("base_seed", spec.base_seed);
    spec.budget_s = cfg.get_double("budget_s", spec.budget_s);
    spec.ls_solver_budget_s = cfg.get_double("ls_solver_budget_s", spec.ls_solver_budget_s);
    spec.ls_path_budget_s = cfg.get_double("ls_path_budget_s", spec.ls_path_budget_s);
    spec.fast_iterations = cfg.get_int("fast_iterations", spec.fast_iterations);
    spec.fast_path_expansions = cfg.get_int("fast_path_expansions", spec.fast_path_expansions);
    spec.step_limit = cfg.get_int("step_limit", spec.step_limit);
    spec.workers = cfg.get_int("workers", spec.workers);
    spec.overrides = cfg;
    return spec;
}

EpisodeConfig episode_config(const ExperimentSpec& spec, PlannerKind planner, int population,
                             uint64_t seed) {
    const Config& cfg = spec.overrides;
    EpisodeConfig ec;
    ec.planner = planner;
    ec.vehicle_model.kind = spec.vehicle;
    ec.population = population;
    ec.seed = seed;
    ec.step_limit = spec.step_limit;
    ec.params = RewardParams::from_config(cfg);
    if (spec.vehicle == VehicleModel::Kind::DUBINS && !cfg.has("vehicle_max_speed"))
        ec.params.v_max = 4.0;
    ec.attention = cfg.get_int("attention", ec.attention);
    ec.safety_radius = cfg.get_double("safety_radius", ec.safety_radius);
    ec.solver = SolverConfig::from_config(cfg);
    ec.solver.gamma = ec.params.gamma;
    ec.solver.budget_s =
        planner == PlannerKind::LS_ASTAR ? spec.ls_solver_budget_s : spec.budget_s;
    if (spec.fast_iterations > 0) ec.solver.max_iterations = spec.fast_iterations;
    ec.rollout = RolloutConfig::from_config(cfg);
    ec.belief = BeliefParams::from_config(cfg);
    ec.astar = PathCostParams::from_config(cfg, spec.vehicle);
    ec.astar.budget_s = spec.ls_path_budget_s;
    if (spec.fast_path_expansions > 0) ec.astar.max_expansions = spec.fast_path_expansions;
    ec.prm = PrmParams::from_config(cfg);
    ec.fmm_cell = cfg.get_double("fmm_cell", ec.fmm_cell);
    return ec;
}

int compare_outperform(std::span<const double> baseline, std::span<const double> candidate) {
    if (baseline.size() != candidate.size())
        throw std::invalid_argument("paired travel-time lists differ in length");
    int count = 0;
    for (size_t i = 0; i < baseline.size(); ++i)
        if (candidate[i] < baseline[i]) ++count;
    return count;
}

const std::string& csv_header() {
    static const std::string header =
        "scenario,vehicle,planner,population,trial,seed,travel_time_s,sb_count,unsafe,outcome";
    return header;
}

MetricsTable run_experiment(const ExperimentSpec& spec, std::ostream& csv) {
    const Environment env = build_scenario(spec.scenario);

    struct Job {
        PlannerKind planner;
        int population;
        int trial;
        uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int population : spec.populations)
        for (int trial = 0; trial < spec.trials; ++trial) {
            const uint64_t seed = mix_seed(spec.base_seed, population, trial);
            for (PlannerKind planner : spec.planners) jobs.push_back({planner, population, trial, seed});
        }

    std::vector<EpisodeResult> results(jobs.size());
    std::atomic<size_t> cursor{0};
    auto worker = [&] {
        for (size_t i = cursor.fetch_add(1); i < jobs.size(); i = cursor.fetch_add(1)) {
            const Job& job = jobs[i];
            results[i] =
                run_episode(env, episode_config(spec, job.planner, job.population, job.seed));
        }
    };
    const int workers = std::max(1, spec.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    csv << csv_header() << '\n';
    std::vector<RawRow> rows;
    char time_buf[32];
    for (size_t i = 0; i < jobs.size(); ++i) {
        const Job& job = jobs[i];
        const EpisodeResult& r = results[i];
        std::snprintf(time_buf, sizeof(time_buf), "%.1f", r.travel_time);
        csv << scenario_name(spec.scenario) << ',' << vehicle_name(spec.vehicle) << ','
            << planner_name(job.planner) << ',' << job.population << ',' << job.trial << ','
            << job.seed << ',' << time_buf << ',' << r.sb_count << ',' << (r.unsafe ? 1 : 0) << ','
            << outcome_name(r.outcome) << '\n';
        rows.push_back({scenario_name(spec.scenario), vehicle_name(spec.vehicle),
                        planner_name(job.planner), job.population, job.trial, r.travel_time,
                        r.sb_count, r.unsafe, outcome_name(r.outcome)});
    }

    std::vector<std::string> planner_order;
    for (PlannerKind p : spec.planners) planner_order.push_back(planner_name(p));
    return aggregate_rows(rows, planner_order, spec.populations);
}

MetricsTable aggregate_csv(std::istream& csv) {
    std::string line;
    if (!std::getline(csv, line)) throw std::runtime_error("empty CSV");
    if (line != csv_header()) throw std::runtime_error("unexpected CSV header: " + line);

    std::vector<RawRow> rows;
    std::vector<std::string> planner_order;
    std::vector<int> population_order;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream in(line);
        std::string field;
        RawRow row;
        std::getline(in, row.scenario, ',');
        std::getline(in, row.vehicle, ',');
        std::getline(in, row.planner, ',');
        std::getline(in, field, ',');
        row.population = std::stoi(field);
        std::getline(in, field, ',');
        row.trial = std::stoi(field);
        std::getline(in, field, ',');  // seed, unused for aggregation
        std::getline(in, field, ',');
        row.travel_time = std::stod(field);
        std::getline(in, field, ',');
        row.sb_count = std::stoi(field);
        std::getline(in, field, ',');
        row.unsafe = field == "1";
        std::getline(in, row.outcome, ',');
        rows.push_back(row);
        if (std::find(planner_order.begin(), planner_order.end(), row.planner) ==
            planner_order.end())
            planner_order.push_back(row.planner);
        if (std::find(population_order.begin(), population_order.end(), row.population) ==
            population_order.end())
            population_order.push_back(row.population);
    }
    return aggregate_rows(rows, planner_order, population_order);
}

std::string MetricsTable::render() const {
    std::ostringstream out;
    out << std::left << std::setw(18) << "planner" << std::right << std::setw(6) << "#ped"
        << std::setw(9) << "trials" << std::setw(18) << "time (s)" << std::setw(18) << "#SB"
        << std::setw(8) << "#outp" << std::setw(8) << "unsafe" << std::setw(7) << "fail" << '\n';
    for (const auto& c : cells) {
        std::ostringstream time_col;
        time_col << std::fixed << std::setprecision(2) << c.mean_time << " +- " << c.sem_time;
        std::ostringstream sb_col;
        sb_col << std::fixed << std::setprecision(2) << c.mean_sb << " +- " << c.sem_sb;
        out << std::left << std::setw(18) << planner_name(c.planner) << std::right << std::setw(6)
            << c.population << std::setw(9) << c.trials << std::setw(18) << time_col.str()
            << std::setw(18) << sb_col.str() << std::setw(8) << c.outperformed << std::setw(8)
            << c.unsafe << std::setw(7) << c.failures << '\n';
    }
    return out.str();
}

}  // namespace crowdnav

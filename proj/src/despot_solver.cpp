#include "crowdnav/despot_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "crowdnav/config.hpp"

namespace crowdnav {

namespace {
constexpr int kHardIterationCap = 200000;
}

SolverConfig SolverConfig::from_config(const Config& cfg) {
    SolverConfig c;
    c.num_scenarios = cfg.get_int("solver_scenarios", c.num_scenarios);
    c.budget_s = cfg.get_double("solver_budget_s", c.budget_s);
    c.max_depth = cfg.get_int("solver_max_depth", c.max_depth);
    c.regularization = cfg.get_double("solver_regularization", c.regularization);
    c.gamma = cfg.get_double("discount", c.gamma);
    c.max_iterations = cfg.get_int("solver_max_iterations", c.max_iterations);
    return c;
}

DespotSolver::DespotSolver(const Environment& env, const RewardParams& params,
                           const VehicleModel& model, const SolverConfig& solver_cfg,
                           const RolloutConfig& rollout_cfg)
    : env_(&env), params_(params), model_(model), cfg_(solver_cfg), rollout_(rollout_cfg) {}

std::vector<NavAction> DespotSolver::action_menu(const VehicleState& vehicle,
                                                 const PathSource& src, ActionMode mode) const {
    if (mode == ActionMode::EXTENDED) {
        const double d_ro = delta_ro(src, vehicle, model_, params_.dt);
        return legal_actions(vehicle, d_ro, params_);
    }
    // Speed control along the route: every action keeps the vehicle on the
    // source's heading; only the speed changes (or the sudden brake fires).
    const auto heading = src.heading_at(vehicle.pos);
    const double dh = heading ? wrap_angle(*heading - vehicle.heading) : 0.0;
    std::vector<NavAction> actions;
    actions.push_back(NavAction::steer(dh, 0.0));
    if (vehicle.speed + 1.0 <= params_.v_max + 1e-9) actions.push_back(NavAction::steer(dh, 1.0));
    if (vehicle.speed >= 1.0 - 1e-9) actions.push_back(NavAction::steer(dh, -1.0));
    if (vehicle.speed > 1e-9) actions.push_back(NavAction::sudden_brake());
    std::sort(actions.begin(), actions.end());
    return actions;
}

double DespotSolver::scenario_upper(const ScenarioEntry& sc, const PathSource& src) const {
    const VehicleState& v = sc.state.vehicle;
    if (v.speed > 1e-9 && nearest_pedestrian_distance(sc.state) < params_.d_pedestrian)
        return params_.r_pedestrian;
    const double len = src.path_length(v.pos);
    if (!std::isfinite(len)) return 0.0;  // no route: no reachable goal reward
    const double steps = std::ceil(len / (params_.v_max * params_.dt));
    return std::pow(cfg_.gamma, steps) * params_.r_goal;
}

double DespotSolver::rollout_mean(const Node& node, const PathSource& src) const {
    double sum = 0.0;
    for (const auto& sc : node.scenarios) {
        ScenarioParticle particle{sc.state, sc.seed};
        sum += rollout_value(particle, src, rollout_, params_, *env_, model_, node.depth,
                             cfg_.max_depth - node.depth);
    }
    return node.scenarios.empty() ? 0.0 : sum / node.scenarios.size();
}

double DespotSolver::lower_bound(const Node& node, const PathSource& src) const {
    return std::pow(cfg_.gamma, node.depth) * rollout_mean(node, src);
}

double DespotSolver::upper_bound(const Node& node, const PathSource& src) const {
    double sum = 0.0;
    for (const auto& sc : node.scenarios) sum += scenario_upper(sc, src);
    const double mean = node.scenarios.empty() ? 0.0 : sum / node.scenarios.size();
    return std::pow(cfg_.gamma, node.depth) * mean;
}

void DespotSolver::init_leaf_bounds(Node& node, const PathSource& src) const {
    if (node.depth >= cfg_.max_depth) {
        node.lower = 0.0;
        node.upper = 0.0;
        return;
    }
    node.lower = rollout_mean(node, src);
    double sum = 0.0;
    for (const auto& sc : node.scenarios) sum += scenario_upper(sc, src);
    node.upper = node.scenarios.empty() ? 0.0 : sum / node.scenarios.size();
    // The travel-time estimate can undershoot the roll-out's realized value by
    // one step of discounting; keep the invariant lower <= upper.
    node.upper = std::max(node.upper, node.lower);
}

void DespotSolver::expand(Node& node, const PathSource& src, ActionMode mode) {
    const VehicleState& vehicle = node.scenarios.front().state.vehicle;
    const auto actions = action_menu(vehicle, src, mode);
    if (actions.empty()) throw std::runtime_error("empty action menu during tree expansion");

    node.branches.reserve(actions.size());
    for (const auto& action : actions) {
        ActionBranch branch;
        branch.action = action;
        double reward_sum = 0.0;
        std::map<NavObservation, std::vector<ScenarioEntry>> groups;
        for (const auto& sc : node.scenarios) {
            Rng rng = scenario_noise(sc.seed, node.depth);
            const StepResult step = generative_step(sc.state, action, rng, params_, *env_, model_);
            reward_sum += step.reward;
            // Scenarios that hit a terminal state are absorbed here; their
            // terminal reward is already inside step.reward.
            if (is_terminal(step.state, params_, *env_)) continue;
            groups[step.observation].push_back({std::move(step.state), sc.seed});
        }
        branch.mean_reward = reward_sum / node.scenarios.size();

        for (auto& [obs, entries] : groups) {
            auto child = std::make_unique<Node>();
            child->depth = node.depth + 1;
            child->scenario_count = static_cast<int>(entries.size());
            if (child->depth < cfg_.max_depth) child->scenarios = std::move(entries);
            init_leaf_bounds(*child, src);
            branch.children.emplace(obs, std::move(child));
            ++stats_.tree_nodes;
        }
        node.branches.push_back(std::move(branch));
    }
    node.expanded = true;
    backup(node);
}

void DespotSolver::backup(Node& node) const {
    double best_lower = -std::numeric_limits<double>::infinity();
    double best_upper = -std::numeric_limits<double>::infinity();
    for (auto& branch : node.branches) {
        double l = 0.0;
        double u = 0.0;
        for (const auto& [obs, child] : branch.children) {
            const double w = static_cast<double>(child->scenario_count) / node.scenario_count;
            l += w * child->lower;
            u += w * child->upper;
        }
        branch.lower = branch.mean_reward + cfg_.gamma * l;
        branch.upper = branch.mean_reward + cfg_.gamma * u;
        best_lower = std::max(best_lower, branch.lower);
        best_upper = std::max(best_upper, branch.upper);
    }
    if (node.branches.empty()) return;
    node.lower = std::max(node.lower, best_lower);
    node.upper = std::min(node.upper, best_upper);
    node.upper = std::max(node.upper, node.lower);
}

NavAction DespotSolver::plan(const IntentionBelief& belief, const POMDPState& observed,
                             const std::vector<Vec2>& goals, const PathSource& src, ActionMode mode,
                             uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    stats_ = SearchStats{};

    const auto particles =
        sample_scenarios(belief, observed, goals, cfg_.num_scenarios, mix_seed(seed, 0x5ce0ULL));

    root_ = std::make_unique<Node>();
    root_->depth = 0;
    root_->scenario_count = static_cast<int>(particles.size());
    for (const auto& p : particles) root_->scenarios.push_back({p.state, p.seed});
    stats_.tree_nodes = 1;
    init_leaf_bounds(*root_, src);

    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    auto out_of_budget = [&] {
        if (stats_.iterations >= kHardIterationCap) return true;
        if (cfg_.max_iterations > 0) return stats_.iterations >= cfg_.max_iterations;
        return elapsed() >= cfg_.budget_s * (1.0 - cfg_.budget_margin);
    };

    while (!out_of_budget()) {
        // Descend: max-upper action, then the child with the largest weighted
        // bound gap; stop at an unexpanded node or when no gap remains.
        std::vector<Node*> path{root_.get()};
        Node* node = root_.get();
        while (node->expanded) {
            ActionBranch* best_branch = nullptr;
            for (auto& branch : node->branches)
                if (!best_branch || branch.upper > best_branch->upper) best_branch = &branch;
            Node* best_child = nullptr;
            double best_gap = 1e-12;
            for (auto& [obs, child] : best_branch->children) {
                const double w =
                    static_cast<double>(child->scenario_count) / node->scenario_count;
                const double gap = w * (child->upper - child->lower);
                if (gap > best_gap) {
                    best_gap = gap;
                    best_child = child.get();
                }
            }
            if (!best_child) break;
            node = best_child;
            path.push_back(node);
        }
        if (!node->expanded && node->depth < cfg_.max_depth && !node->scenarios.empty())
            expand(*node, src, mode);
        for (auto it = path.rbegin(); it != path.rend(); ++it) backup(**it);
        ++stats_.iterations;
        stats_.root_lower_history.push_back(root_->lower);
        if (root_->upper - root_->lower <= 1e-9) break;
    }

    if (!root_->expanded) expand(*root_, src, mode);
    backup(*root_);

    stats_.root_lower = root_->lower;
    stats_.root_upper = root_->upper;
    stats_.elapsed_s = elapsed();

    const ActionBranch* best = nullptr;
    for (const auto& branch : root_->branches)
        if (!best || branch.lower > best->lower) best = &branch;
    if (!best) throw std::runtime_error("no action available at the search root");
    return best->action;
}

}  // namespace crowdnav

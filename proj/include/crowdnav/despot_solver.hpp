#pragma once

#include <map>
#include <memory>
#include <vector>

#include "crowdnav/belief_tracker.hpp"
#include "crowdnav/pomdp_core.hpp"
#include "crowdnav/rollout_policies.hpp"

namespace crowdnav {

struct SolverConfig {
    int num_scenarios = 100;
    double budget_s = 0.5;
    int max_depth = 90;
    double regularization = 0.0;
    double gamma = 0.97;
    /// Positive: deterministic trial cap instead of the wall clock.
    int max_iterations = 0;
    double budget_margin = 0.05;

    static SolverConfig from_config(const Config& cfg);
};

struct SearchStats {
    int iterations = 0;
    int tree_nodes = 0;
    double root_lower = 0.0;
    double root_upper = 0.0;
    std::vector<double> root_lower_history;  // after each trial
    double elapsed_s = 0.0;
};

/// Anytime belief-tree search over K determinized scenarios. Trials descend
/// along the max-upper-bound action and the child observation with the largest
/// weighted bound gap, expand one leaf, and back the bounds up to the root;
/// the returned action maximizes the root lower bound.
class DespotSolver {
public:
    /// EXTENDED: full heading-and-speed menu with the roll-out heading slot.
    /// PATH_SPEED: speed changes and sudden brake along the path source.
    enum class ActionMode { EXTENDED, PATH_SPEED };

    struct ScenarioEntry {
        POMDPState state;
        uint64_t seed = 0;
    };

    struct Node;

    struct ActionBranch {
        NavAction action;
        double mean_reward = 0.0;  // over the parent's scenario count
        double lower = 0.0;        // local to the parent node's frame
        double upper = 0.0;
        std::map<NavObservation, std::unique_ptr<Node>> children;
    };

    struct Node {
        int depth = 0;
        int scenario_count = 0;
        std::vector<ScenarioEntry> scenarios;  // empty at the horizon
        double lower = 0.0;  // value-to-go from this node (local frame)
        double upper = 0.0;
        bool expanded = false;
        std::vector<ActionBranch> branches;
    };

    DespotSolver(const Environment& env, const RewardParams& params, const VehicleModel& model,
                 const SolverConfig& solver_cfg, const RolloutConfig& rollout_cfg);

    /// Runs the search from the observed state under the given belief and
    /// returns the chosen root action. Deterministic given the seed whenever
    /// max_iterations is set. Throws on an empty action menu.
    NavAction plan(const IntentionBelief& belief, const POMDPState& observed,
                   const std::vector<Vec2>& goals, const PathSource& src, ActionMode mode,
                   uint64_t seed);

    const SearchStats& stats() const { return stats_; }
    const Node* root() const { return root_.get(); }

    /// Mean roll-out value over the node's scenarios, discounted to the
    /// node's depth (root frame).
    double lower_bound(const Node& node, const PathSource& src) const;

    /// Mean per-scenario upper bound, discounted to the node's depth: the
    /// pedestrian penalty for moving near-collision scenarios, otherwise the
    /// goal reward discounted by the max-speed travel time along the source.
    double upper_bound(const Node& node, const PathSource& src) const;

    /// Depth-first visit of every node in the current tree.
    template <typename F>
    void for_each_node(F&& fn) const {
        if (root_) visit(*root_, fn);
    }

private:
    std::vector<NavAction> action_menu(const VehicleState& vehicle, const PathSource& src,
                                       ActionMode mode) const;
    void init_leaf_bounds(Node& node, const PathSource& src) const;
    void expand(Node& node, const PathSource& src, ActionMode mode);
    void backup(Node& node) const;
    double scenario_upper(const ScenarioEntry& sc, const PathSource& src) const;
    double rollout_mean(const Node& node, const PathSource& src) const;

    template <typename F>
    void visit(const Node& node, F& fn) const {
        fn(node);
        for (const auto& branch : node.branches)
            for (const auto& [obs, child] : branch.children) visit(*child, fn);
    }

    const Environment* env_;
    RewardParams params_;
    VehicleModel model_;
    SolverConfig cfg_;
    RolloutConfig rollout_;
    std::unique_ptr<Node> root_;
    SearchStats stats_;
};

}  // namespace crowdnav

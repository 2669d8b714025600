#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "ftag/strategies.hpp"

namespace ftag {

// The recursive adversarial tree: the level-k tree hangs tree_node_count(k-1)
// half-scaled copies of the previous level under a fresh root, so every
// root-to-leaf path has length exactly 1.
struct TreeSpec {
    struct Node {
        int parent = -1;      // -1 for the root
        int layer = 0;        // root is layer 0
        double edge_len = 0;  // length of the edge to the parent
    };
    int k = 0;
    std::vector<Node> nodes;
    std::vector<int> layer_counts;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int down_degree(int node) const;
    double depth_of(int node) const;  // path length from the root
};

// N_k: 1, 2, 5, 26, 677, ... with N_{k+1} = N_k^2 + 1.
long long tree_node_count(int k);

// Builds the level-k tree. Levels above 3 are rejected (KTooLarge).
TreeSpec build_tree(int k);

// The lower-bound metric: an origin joined to tree_node_count(k)-1 pendant
// spokes of length 1+sqrt(2) and to every vertex of tree_node_count(k)+1
// disjoint tree copies by unit edges.
struct LowerBoundMetric {
    struct Copy {
        std::vector<int> node_vertex;  // tree node index -> metric vertex
        std::vector<int> tree_edges;
        std::vector<int> link_edges;  // unit edges to the origin
    };
    int k = 0;
    std::shared_ptr<const MetricSpace> metric;
    TreeSpec tree;
    int origin = 0;
    std::vector<int> spoke_vertices;  // pendant endpoints
    std::vector<int> spoke_edges;
    std::vector<Copy> copies;
};

LowerBoundMetric build_metric_k(int k);  // 1 <= k <= 3

// Frozen robots for one tree copy: one per leaf, max(down_degree-1, 1) per
// internal node, and the full down-degree at the root. Ids are assigned
// sequentially from first_id.
std::vector<RobotSpec> sigma_requests(const TreeSpec& tree,
                                      const std::vector<int>& copy_node_vertices, double release,
                                      int first_id);

// Checks that the robots placed in layers 0..i-1 match the node count of
// layer i, for every i whose preceding layers carry no down-degree-1
// excess. Returns the layers checked and the layers where the
// max(d-1, 1) floor adds extra robots; throws CountMismatch on failure.
struct RobotCountReport {
    std::vector<int> checked_layers;
    std::vector<int> excess_layers;
};
RobotCountReport robot_count_check(const TreeSpec& tree);

// The lower-bound ratio 1+sqrt(2) - (sqrt(2)-1)^(k+1).
double r_bound(int k);

enum class AdversaryCase { case1, case2 };

struct AdversaryOptions {
    double dt = 1e-3;        // trigger sampling step over [2, 1+sqrt(2)]
    double max_time = 100;   // simulation horizon
    double ball_tol = 1e-9;  // slack on the ball-membership test
};

struct AdversaryReport {
    int k = 0;
    AdversaryCase kase = AdversaryCase::case1;
    std::optional<double> t_star;  // trigger time, case 2 only
    int chosen_copy = 0;
    double certified_opt = 0.0;
    double makespan = 0.0;
    double achieved_ratio = 0.0;
    Instance instance;  // the realized input, spoke requests included
    Trace trace;
};

// Plays the interactive adversary against the strategy: starts
// tree_node_count(k) robots at the origin, at t=1 releases the request
// pattern on a tree copy no robot is touching, then watches [2, 1+sqrt(2)]
// for a moment when at most N-2 active robots are inside the shrinking
// ball around the origin or parked on spokes; if found, releases one
// request per spoke at distance t* and certifies opt = t*, otherwise
// certifies opt = 1.
AdversaryReport run_adversary(int k, const StrategyFactory& factory,
                              const AdversaryOptions& opts = {});

nlohmann::json report_to_json(const AdversaryReport& report, const std::string& strategy_name);

}  // namespace ftag

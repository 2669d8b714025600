#include "ftag/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ftag {

namespace {

const double kSqrt2 = std::sqrt(2.0);

}  // namespace

int TreeSpec::down_degree(int node) const {
    int d = 0;
    for (const auto& n : nodes) d += n.parent == node ? 1 : 0;
    return d;
}

double TreeSpec::depth_of(int node) const {
    double d = 0.0;
    for (int cur = node; nodes[cur].parent >= 0; cur = nodes[cur].parent)
        d += nodes[cur].edge_len;
    return d;
}

long long tree_node_count(int k) {
    if (k < 0) throw KTooLarge("negative tree level");
    long long n = 1;
    for (int i = 0; i < k; ++i) {
        if (n > 1000000) throw KTooLarge("tree level " + std::to_string(k) + " overflows");
        n = n * n + 1;
    }
    return n;
}

TreeSpec build_tree(int k) {
    if (k < 0 || k > 3)
        throw KTooLarge("tree level " + std::to_string(k) + " unsupported (0..3)");

    TreeSpec t;
    t.k = 0;
    t.nodes = {TreeSpec::Node{-1, 0, 0.0}};
    if (k >= 1) {
        t.k = 1;
        t.nodes.push_back(TreeSpec::Node{0, 1, 1.0});
    }
    for (int level = 2; level <= k; ++level) {
        TreeSpec next;
        next.k = level;
        next.nodes = {TreeSpec::Node{-1, 0, 0.0}};
        int subtrees = t.node_count();
        for (int s = 0; s < subtrees; ++s) {
            int base = next.node_count();
            for (int j = 0; j < t.node_count(); ++j) {
                const auto& src = t.nodes[j];
                TreeSpec::Node n;
                n.layer = src.layer + 1;
                if (src.parent < 0) {  // subtree root hangs off the new root
                    n.parent = 0;
                    n.edge_len = 0.5;
                } else {
                    n.parent = base + src.parent;
                    n.edge_len = src.edge_len / 2.0;
                }
                next.nodes.push_back(n);
            }
        }
        t = std::move(next);
    }

    t.layer_counts.assign(t.k + 1, 0);
    for (const auto& n : t.nodes) t.layer_counts[n.layer] += 1;
    return t;
}

LowerBoundMetric build_metric_k(int k) {
    if (k < 1 || k > 3)
        throw KTooLarge("metric level " + std::to_string(k) + " unsupported (1..3)");

    LowerBoundMetric lbm;
    lbm.k = k;
    lbm.tree = build_tree(k);
    const int n = lbm.tree.node_count();

    GraphSpec g;
    g.vertices.push_back("p0");
    for (int i = 1; i < n; ++i) {
        g.vertices.push_back("q" + std::to_string(i));
        g.edges.push_back({"p0", g.vertices.back(), 1.0 + kSqrt2});
    }

    auto node_name = [](int copy, int node) {
        return "c" + std::to_string(copy) + "n" + std::to_string(node);
    };
    for (int c = 0; c <= n; ++c) {
        for (int j = 0; j < n; ++j) g.vertices.push_back(node_name(c, j));
        for (int j = 1; j < n; ++j)
            g.edges.push_back(
                {node_name(c, lbm.tree.nodes[j].parent), node_name(c, j), lbm.tree.nodes[j].edge_len});
        for (int j = 0; j < n; ++j) g.edges.push_back({"p0", node_name(c, j), 1.0});
    }

    auto metric = std::make_shared<const MetricSpace>(build_metric(g));
    lbm.metric = metric;
    lbm.origin = *metric->vertex_index("p0");
    for (int i = 1; i < n; ++i)
        lbm.spoke_vertices.push_back(*metric->vertex_index("q" + std::to_string(i)));
    for (int e = 0; e < metric->edge_count(); ++e) {
        const auto& edge = metric->edge(e);
        for (int sv : lbm.spoke_vertices)
            if (edge.u == sv || edge.v == sv) lbm.spoke_edges.push_back(e);
    }
    for (int c = 0; c <= n; ++c) {
        LowerBoundMetric::Copy copy;
        std::set<int> verts;
        for (int j = 0; j < n; ++j) {
            int v = *metric->vertex_index(node_name(c, j));
            copy.node_vertex.push_back(v);
            verts.insert(v);
        }
        for (int e = 0; e < metric->edge_count(); ++e) {
            const auto& edge = metric->edge(e);
            bool u_in = verts.count(edge.u) > 0, v_in = verts.count(edge.v) > 0;
            if (u_in && v_in)
                copy.tree_edges.push_back(e);
            else if ((u_in || v_in) && (edge.u == lbm.origin || edge.v == lbm.origin))
                copy.link_edges.push_back(e);
        }
        lbm.copies.push_back(std::move(copy));
    }
    return lbm;
}

std::vector<RobotSpec> sigma_requests(const TreeSpec& tree,
                                      const std::vector<int>& copy_node_vertices, double release,
                                      int first_id) {
    std::vector<RobotSpec> out;
    int id = first_id;
    for (int j = 0; j < tree.node_count(); ++j) {
        int d = tree.down_degree(j);
        int count;
        if (d == 0)
            count = 1;  // leaf
        else if (j == 0)
            count = d;  // the root keeps its full down-degree
        else
            count = std::max(d - 1, 1);
        for (int c = 0; c < count; ++c)
            out.push_back({id++, Point::at_vertex(copy_node_vertices[j]), release, false});
    }
    return out;
}

RobotCountReport robot_count_check(const TreeSpec& tree) {
    std::vector<int> robots_in_layer(tree.k + 1, 0);
    std::vector<bool> layer_has_excess(tree.k + 1, false);
    for (int j = 0; j < tree.node_count(); ++j) {
        int d = tree.down_degree(j);
        int layer = tree.nodes[j].layer;
        int count = d == 0 ? 1 : (j == 0 ? d : std::max(d - 1, 1));
        robots_in_layer[layer] += count;
        if (j != 0 && d == 1) layer_has_excess[layer] = true;  // floor raised d-1=0 to 1
    }

    RobotCountReport report;
    for (int layer = 1; layer <= tree.k; ++layer)
        if (layer_has_excess[layer]) report.excess_layers.push_back(layer);

    int prefix = 0;
    bool clean = true;  // no excess among layers 1..i-1 so far
    for (int i = 1; i <= tree.k; ++i) {
        prefix += robots_in_layer[i - 1];
        if (i >= 2 && layer_has_excess[i - 1]) clean = false;
        if (!clean) continue;
        if (prefix != tree.layer_counts[i])
            throw CountMismatch("layer " + std::to_string(i) + ": " + std::to_string(prefix) +
                                " robots above vs " + std::to_string(tree.layer_counts[i]) +
                                " nodes");
        report.checked_layers.push_back(i);
    }
    return report;
}

double r_bound(int k) {
    if (k < 0) throw KTooLarge("negative level");
    return 1.0 + kSqrt2 - std::pow(kSqrt2 - 1.0, k + 1);
}

namespace {

bool copy_occupied(const LowerBoundMetric::Copy& copy, const std::map<int, Point>& positions) {
    std::set<int> verts(copy.node_vertex.begin(), copy.node_vertex.end());
    std::set<int> edges(copy.tree_edges.begin(), copy.tree_edges.end());
    edges.insert(copy.link_edges.begin(), copy.link_edges.end());
    for (const auto& [id, p] : positions) {
        (void)id;
        if (p.is_vertex() ? verts.count(p.vertex_id) > 0 : edges.count(p.edge_id) > 0)
            return true;
    }
    return false;
}

bool on_spoke(const LowerBoundMetric& lbm, const Point& p) {
    if (p.is_vertex())
        return std::find(lbm.spoke_vertices.begin(), lbm.spoke_vertices.end(), p.vertex_id) !=
               lbm.spoke_vertices.end();
    return std::find(lbm.spoke_edges.begin(), lbm.spoke_edges.end(), p.edge_id) !=
           lbm.spoke_edges.end();
}

std::map<int, Point> clamped_positions(const Trace& trace, double t) {
    return positions_at(trace, std::min(t, trace.end_time));
}

}  // namespace

AdversaryReport run_adversary(int k, const StrategyFactory& factory,
                              const AdversaryOptions& opts) {
    LowerBoundMetric lbm = build_metric_k(k);
    const int n = lbm.tree.node_count();
    const Point origin = Point::at_vertex(lbm.origin);
    const double window_end = 1.0 + kSqrt2;

    Instance starters;
    starters.metric = lbm.metric;
    for (int i = 0; i < n; ++i) starters.robots.push_back({i, origin, 0.0, true});

    // phase 1: watch the swarm until t=1, then pick an untouched copy
    Trace warmup;
    {
        auto strat = factory();
        SimOptions so;
        so.max_time = opts.max_time;
        so.stop_at = 1.0;
        warmup = simulate(starters, *strat, so);
    }
    auto at_one = clamped_positions(warmup, 1.0);
    int chosen = -1;
    for (size_t c = 0; c < lbm.copies.size() && chosen < 0; ++c)
        if (!copy_occupied(lbm.copies[c], at_one)) chosen = static_cast<int>(c);
    if (chosen < 0) throw NoEmptyCopy("every tree copy is occupied at t=1");

    Instance with_tree = starters;
    for (const auto& r : sigma_requests(lbm.tree, lbm.copies[chosen].node_vertex, 1.0, n))
        with_tree.robots.push_back(r);

    // phase 2: replay deterministically and watch the ball around the origin
    Trace window;
    {
        auto strat = factory();
        SimOptions so;
        so.max_time = opts.max_time;
        so.stop_at = window_end;
        window = simulate(with_tree, *strat, so);
    }

    std::vector<double> samples;
    for (double t = 2.0; t < window_end; t += opts.dt) samples.push_back(t);
    samples.push_back(window_end);
    for (const auto& ev : window.events)
        if (ev.time >= 2.0 && ev.time <= window_end) samples.push_back(ev.time);
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

    std::optional<double> t_star;
    for (double t : samples) {
        int inside = 0;
        for (const auto& [id, pos] : clamped_positions(window, t)) {
            if (!active_at(window, id, t)) continue;
            double d = distance(*lbm.metric, pos, origin);
            if (d <= t * (kSqrt2 - 1.0) + opts.ball_tol || on_spoke(lbm, pos)) ++inside;
        }
        if (inside <= n - 2) {
            t_star = t;
            break;
        }
    }

    AdversaryReport report;
    report.k = k;
    report.chosen_copy = chosen;
    report.t_star = t_star;

    if (t_star) {
        report.kase = AdversaryCase::case2;
        report.certified_opt = *t_star;
        Instance final_inst = with_tree;
        int id = static_cast<int>(final_inst.robots.size());
        for (size_t s = 0; s < lbm.spoke_edges.size(); ++s)
            final_inst.robots.push_back(
                {id++, Point::on_edge(lbm.spoke_edges[s], *t_star), *t_star, false});
        auto strat = factory();
        SimOptions so;
        so.max_time = opts.max_time;
        report.trace = simulate(final_inst, *strat, so);
        report.instance = std::move(final_inst);
    } else {
        report.kase = AdversaryCase::case1;
        report.certified_opt = 1.0;
        auto strat = factory();
        SimOptions so;
        so.max_time = opts.max_time;
        report.trace = simulate(with_tree, *strat, so);
        report.instance = std::move(with_tree);
    }
    report.makespan = report.trace.makespan;
    report.achieved_ratio = ratio(report.trace, report.certified_opt);
    return report;
}

nlohmann::json report_to_json(const AdversaryReport& report, const std::string& strategy_name) {
    nlohmann::json j = {
        {"k", report.k},
        {"strategy", strategy_name},
        {"case", report.kase == AdversaryCase::case1 ? "case1" : "case2"},
        {"chosen_copy", report.chosen_copy},
        {"certified_opt", report.certified_opt},
        {"makespan", report.makespan},
        {"achieved_ratio", report.achieved_ratio},
        {"r_bound", r_bound(report.k)},
        {"instance", instance_to_json(report.instance)},
    };
    if (report.t_star)
        j["t_star"] = *report.t_star;
    else
        j["t_star"] = nullptr;
    return j;
}

}  // namespace ftag

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "ftag/adversary.hpp"

using namespace ftag;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kRho = 1.0 + kSqrt2;

GraphSpec fig1_spec() {
    std::ifstream in(std::string(FTAG_FIXTURE_DIR) + "/fig1_metric.json");
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return graph_from_json(nlohmann::json::parse(ss.str()), "fig1");
}

}  // namespace

TEST_CASE("node counts follow N_{k+1} = N_k^2 + 1") {
    CHECK(tree_node_count(0) == 1);
    CHECK(tree_node_count(1) == 2);
    CHECK(tree_node_count(2) == 5);
    CHECK(tree_node_count(3) == 26);
    CHECK(tree_node_count(4) == 677);
}

TEST_CASE("build_tree matches the recursive construction") {
    TreeSpec t0 = build_tree(0);
    CHECK(t0.node_count() == 1);
    CHECK(t0.layer_counts == std::vector<int>{1});

    TreeSpec t1 = build_tree(1);
    CHECK(t1.node_count() == 2);
    CHECK(t1.layer_counts == std::vector<int>{1, 1});
    CHECK(t1.nodes[1].edge_len == 1.0);

    TreeSpec t2 = build_tree(2);
    CHECK(t2.node_count() == 5);
    CHECK(t2.layer_counts == std::vector<int>{1, 2, 2});

    TreeSpec t3 = build_tree(3);
    CHECK(t3.node_count() == 26);
    CHECK(t3.layer_counts == std::vector<int>{1, 5, 10, 10});

    // every root-to-leaf path has length exactly 1
    for (const TreeSpec& t : {t1, t2, t3})
        for (int j = 0; j < t.node_count(); ++j)
            if (t.down_degree(j) == 0)
                CHECK(t.depth_of(j) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(build_tree(4), KTooLarge);
    CHECK_THROWS_AS(build_tree(-1), KTooLarge);
}

TEST_CASE("M_1 is the figure-1 metric") {
    LowerBoundMetric lbm = build_metric_k(1);
    CHECK(lbm.metric->vertex_count() == 8);
    CHECK(lbm.metric->edge_count() == 10);
    CHECK(lbm.spoke_vertices.size() == 1);
    CHECK(lbm.copies.size() == 3);
    CHECK(weighted_isomorphic(lbm.metric->graph(), fig1_spec()));
}

TEST_CASE("M_2 counts and distances") {
    LowerBoundMetric lbm = build_metric_k(2);
    CHECK(lbm.metric->vertex_count() == 35);  // origin + 4 spokes + 6 copies of 5
    CHECK(lbm.spoke_vertices.size() == 4);
    CHECK(lbm.copies.size() == 6);

    const Point origin = Point::at_vertex(lbm.origin);
    for (const auto& copy : lbm.copies)
        for (int v : copy.node_vertex)
            CHECK(distance(*lbm.metric, origin, Point::at_vertex(v)) ==
                  doctest::Approx(1.0).epsilon(1e-12));
    for (int sv : lbm.spoke_vertices)
        CHECK(distance(*lbm.metric, origin, Point::at_vertex(sv)) ==
              doctest::Approx(kRho).epsilon(1e-12));

    CHECK_THROWS_AS(build_metric_k(0), KTooLarge);
    CHECK_THROWS_AS(build_metric_k(4), KTooLarge);
}

TEST_CASE("M_2 serializes to the committed fixture") {
    std::ifstream in(std::string(FTAG_FIXTURE_DIR) + "/m2_graph.json");
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json fixture = nlohmann::json::parse(ss.str());
    nlohmann::json built = graph_to_json(build_metric_k(2).metric->graph());
    CHECK(built == fixture);
}

TEST_CASE("M_3 builds at full size") {
    LowerBoundMetric lbm = build_metric_k(3);
    CHECK(lbm.metric->vertex_count() == 1 + 25 + 27 * 26);
    const Point origin = Point::at_vertex(lbm.origin);
    CHECK(distance(*lbm.metric, origin, Point::at_vertex(lbm.copies[26].node_vertex[25])) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sigma_requests applies the down-degree rule") {
    TreeSpec t0 = build_tree(0);
    TreeSpec t1 = build_tree(1);
    TreeSpec t2 = build_tree(2);

    std::vector<int> ids0 = {0};
    CHECK(sigma_requests(t0, ids0, 1.0, 10).size() == 1);

    LowerBoundMetric m1 = build_metric_k(1);
    auto reqs1 = sigma_requests(t1, m1.copies[0].node_vertex, 1.0, 2);
    CHECK(reqs1.size() == 2);  // one at the root, one at the leaf
    CHECK(reqs1[0].id == 2);
    CHECK(reqs1[1].id == 3);
    CHECK(reqs1[0].release == 1.0);

    LowerBoundMetric m2 = build_metric_k(2);
    auto reqs2 = sigma_requests(t2, m2.copies[0].node_vertex, 1.0, 5);
    CHECK(reqs2.size() == 6);  // root 2, two mid nodes 1 each, two leaves 1 each
    int at_root = 0;
    for (const auto& r : reqs2)
        at_root += same_point(r.home, Point::at_vertex(m2.copies[0].node_vertex[0])) ? 1 : 0;
    CHECK(at_root == 2);
}

TEST_CASE("robot_count_check verifies the layer identity") {
    RobotCountReport r1 = robot_count_check(build_tree(1));
    CHECK(r1.checked_layers == std::vector<int>{1});
    CHECK(r1.excess_layers.empty());

    RobotCountReport r2 = robot_count_check(build_tree(2));
    CHECK(r2.checked_layers == std::vector<int>{1});
    CHECK(r2.excess_layers == std::vector<int>{1});  // down-degree-1 mid layer

    RobotCountReport r3 = robot_count_check(build_tree(3));
    CHECK(r3.checked_layers == std::vector<int>{1, 2});
    CHECK(r3.excess_layers == std::vector<int>{2});
}

TEST_CASE("r_bound values and limit") {
    CHECK(r_bound(0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(r_bound(1) == doctest::Approx(3.0 * kSqrt2 - 2.0).epsilon(1e-15));
    CHECK(r_bound(2) == doctest::Approx(kRho - std::pow(kSqrt2 - 1.0, 3)).epsilon(1e-15));
    for (int k = 0; k < 10; ++k) {
        CHECK(r_bound(k + 1) > r_bound(k));
        double iterated = r_bound(k) + kSqrt2 * (1.0 - r_bound(k) * (kSqrt2 - 1.0));
        CHECK(std::abs(r_bound(k + 1) - iterated) <= 1e-12);
    }
    CHECK(kRho - r_bound(10) < 1e-3);
}

TEST_CASE("the k=1 adversary beats the bound against both strategies") {
    AdversaryReport patience = run_adversary(1, make_strategy_factory("patience"));
    CHECK(patience.kase == AdversaryCase::case1);
    CHECK(patience.certified_opt == doctest::Approx(1.0));
    CHECK(patience.achieved_ratio == doctest::Approx(kRho).epsilon(1e-8));
    CHECK(patience.achieved_ratio >= r_bound(1) - 0.01);

    AdversaryReport greedy = run_adversary(1, make_strategy_factory("greedy"));
    CHECK(greedy.kase == AdversaryCase::case2);
    REQUIRE(greedy.t_star.has_value());
    CHECK(*greedy.t_star >= 2.0);
    CHECK(greedy.certified_opt == doctest::Approx(*greedy.t_star));
    CHECK(greedy.achieved_ratio >= r_bound(1) - 0.01);

    // the certified optimum is sound: it is at least the last release
    double last_release = 0.0;
    for (const auto& r : greedy.instance.robots)
        last_release = std::max(last_release, r.release);
    CHECK(greedy.certified_opt >= last_release - 1e-12);
}

TEST_CASE("adversary runs are deterministic") {
    AdversaryReport a = run_adversary(1, make_strategy_factory("greedy"));
    AdversaryReport b = run_adversary(1, make_strategy_factory("greedy"));
    CHECK(a.achieved_ratio == b.achieved_ratio);
    CHECK(a.chosen_copy == b.chosen_copy);
    CHECK(a.instance.robots.size() == b.instance.robots.size());
    REQUIRE(a.trace.events.size() == b.trace.events.size());
    for (size_t i = 0; i < a.trace.events.size(); ++i)
        CHECK(a.trace.events[i].time == b.trace.events[i].time);
}

TEST_CASE("adversary reports serialize") {
    AdversaryReport report = run_adversary(1, make_strategy_factory("greedy"));
    nlohmann::json j = report_to_json(report, "greedy");
    CHECK(j["k"] == 1);
    CHECK(j["case"] == "case2");
    CHECK(j["achieved_ratio"].get<double>() == doctest::Approx(report.achieved_ratio));
    // the realized instance replays through the normal loader
    Instance replay = instance_from_json(j["instance"]);
    CHECK(replay.robots.size() == report.instance.robots.size());
}

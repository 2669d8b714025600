#include <doctest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "ftag/instance.hpp"
#include "ftag/metric.hpp"
#include "ftag/random_instances.hpp"

using namespace ftag;

namespace {

const double kSqrt2 = std::sqrt(2.0);

GraphSpec fig1_spec() {
    std::ifstream in(std::string(FTAG_FIXTURE_DIR) + "/fig1_metric.json");
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return graph_from_json(nlohmann::json::parse(ss.str()), "fig1");
}

Point vertex(const MetricSpace& m, const std::string& name) {
    auto idx = m.vertex_index(name);
    REQUIRE(idx.has_value());
    return Point::at_vertex(*idx);
}

// Independent distance oracle: enumerate every simple vertex path and every
// way of leaving/entering via edge endpoints.
double oracle_vertex_distance(const GraphSpec& g, int u, int v) {
    int n = static_cast<int>(g.vertices.size());
    std::vector<std::vector<double>> direct(n, std::vector<double>(n, 1e18));
    auto index = [&](const std::string& name) {
        for (int i = 0; i < n; ++i)
            if (g.vertices[i] == name) return i;
        return -1;
    };
    for (const auto& e : g.edges) {
        int a = index(e.u), b = index(e.v);
        direct[a][b] = std::min(direct[a][b], e.length);
        direct[b][a] = std::min(direct[b][a], e.length);
    }
    double best = u == v ? 0.0 : 1e18;
    std::vector<bool> visited(n, false);
    std::function<void(int, double)> dfs = [&](int cur, double len) {
        if (cur == v) {
            best = std::min(best, len);
            return;
        }
        visited[cur] = true;
        for (int next = 0; next < n; ++next)
            if (!visited[next] && direct[cur][next] < 1e17) dfs(next, len + direct[cur][next]);
        visited[cur] = false;
    };
    if (u != v) dfs(u, 0.0);
    return best;
}

double oracle_distance(const GraphSpec& g, const MetricSpace& m, const Point& a, const Point& b) {
    auto exits = [&](const Point& p) -> std::vector<std::pair<int, double>> {
        if (p.is_vertex()) return {{p.vertex_id, 0.0}};
        const auto& e = m.edge(p.edge_id);
        return {{e.u, p.offset}, {e.v, e.length - p.offset}};
    };
    Point na = m.normalized(a), nb = m.normalized(b);
    double best = 1e18;
    if (same_point(na, nb)) return 0.0;
    if (!na.is_vertex() && !nb.is_vertex() && na.edge_id == nb.edge_id)
        best = std::abs(na.offset - nb.offset);
    for (auto [va, ca] : exits(na))
        for (auto [vb, cb] : exits(nb))
            best = std::min(best, ca + oracle_vertex_distance(g, va, vb) + cb);
    return best;
}

GraphSpec random_graph(Rng& rng, int max_vertices) {
    GraphSpec g;
    int n = rng.uniform_int(2, max_vertices);
    for (int i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
    for (int i = 1; i < n; ++i)
        g.edges.push_back(
            {g.vertices[rng.uniform_int(0, i - 1)], g.vertices[i], rng.uniform(0.2, 2.0)});
    int extra = rng.uniform_int(0, n);
    for (int i = 0; i < extra; ++i) {
        int u = rng.uniform_int(0, n - 1), v = rng.uniform_int(0, n - 1);
        if (u != v) g.edges.push_back({g.vertices[u], g.vertices[v], rng.uniform(0.2, 2.0)});
    }
    return g;
}

Point random_point(Rng& rng, const MetricSpace& m) {
    if (m.edge_count() > 0 && rng.chance(0.5)) {
        int e = rng.uniform_int(0, m.edge_count() - 1);
        return Point::on_edge(e, rng.uniform(0.0, m.edge(e).length));
    }
    return Point::at_vertex(rng.uniform_int(0, m.vertex_count() - 1));
}

}  // namespace

TEST_CASE("build_metric on the figure-1 graph") {
    MetricSpace m = build_metric(fig1_spec());
    CHECK(m.vertex_count() == 8);
    CHECK(m.edge_count() == 10);
    CHECK(distance(m, vertex(m, "p0"), vertex(m, "p7")) == doctest::Approx(1 + kSqrt2));
    CHECK(distance(m, vertex(m, "p1"), vertex(m, "p1")) == 0.0);
    CHECK(distance(m, vertex(m, "p1"), vertex(m, "p3")) == doctest::Approx(2.0));
    CHECK(distance(m, vertex(m, "p1"), vertex(m, "p3")) ==
          doctest::Approx(oracle_vertex_distance(fig1_spec(), 1, 3)));
}

TEST_CASE("build_metric rejects bad graphs") {
    GraphSpec trivial;
    trivial.vertices = {"a"};
    CHECK(build_metric(trivial).vertex_count() == 1);

    GraphSpec split;
    split.vertices = {"a", "b", "c"};
    split.edges = {{"a", "b", 1.0}};
    CHECK_THROWS_AS(build_metric(split), DisconnectedGraph);

    GraphSpec zero;
    zero.vertices = {"a", "b"};
    zero.edges = {{"a", "b", 0.0}};
    CHECK_THROWS_AS(build_metric(zero), NonpositiveEdgeLength);

    GraphSpec ghost;
    ghost.vertices = {"a"};
    ghost.edges = {{"a", "x", 1.0}};
    CHECK_THROWS_AS(build_metric(ghost), UnknownVertex);
}

TEST_CASE("shortest_path realizes the distance") {
    MetricSpace m = build_metric(fig1_spec());

    PathPlan direct = shortest_path(m, vertex(m, "p3"), vertex(m, "p4"));
    CHECK(direct.total_length == doctest::Approx(1.0));
    CHECK(direct.waypoints.size() == 2);

    PathPlan loop = shortest_path(m, vertex(m, "p1"), vertex(m, "p1"));
    CHECK(loop.total_length == 0.0);
    CHECK(loop.waypoints.size() == 1);

    PathPlan via = shortest_path(m, vertex(m, "p1"), vertex(m, "p3"));
    CHECK(via.total_length == doctest::Approx(2.0));
    REQUIRE(via.waypoints.size() == 3);
    CHECK(via.waypoints[1].vertex_id == *m.vertex_index("p0"));
}

TEST_CASE("position_along interpolates at unit speed") {
    MetricSpace m = build_metric(fig1_spec());
    Point p0 = vertex(m, "p0"), p1 = vertex(m, "p1"), p3 = vertex(m, "p3");

    PathPlan spoke = shortest_path(m, p0, vertex(m, "p7"));
    Point mid = position_along(spoke, 1.0);
    CHECK_FALSE(mid.is_vertex());
    CHECK(distance(m, mid, p0) == doctest::Approx(1.0));

    CHECK(same_point(position_along(spoke, 0.0), p0));

    PathPlan two_leg = make_plan(m, {p1, p0, p3});
    Point past = position_along(two_leg, 1.5);
    CHECK_FALSE(past.is_vertex());
    CHECK(past.offset == doctest::Approx(0.5));
    CHECK(distance(m, past, p0) == doctest::Approx(0.5));
    CHECK(distance(m, past, p3) == doctest::Approx(0.5));

    CHECK_THROWS_AS(position_along(two_leg, 2.5), ElapsedOutOfRange);
    CHECK_THROWS_AS(position_along(two_leg, -0.5), ElapsedOutOfRange);
}

TEST_CASE("crossing_time finds the first contact") {
    MetricSpace m = build_metric(fig1_spec());
    Point p0 = vertex(m, "p0"), p3 = vertex(m, "p3"), p4 = vertex(m, "p4");

    PathPlan out = shortest_path(m, p0, p3);
    auto hit = crossing_time(m, out, 0.0, p3, 1e-9);
    REQUIRE(hit.has_value());
    CHECK(*hit == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_FALSE(crossing_time(m, out, 0.0, vertex(m, "p5"), 1e-9).has_value());

    PathPlan swing = make_plan(m, {p3, p0, p4});
    int e04 = -1;
    for (int e = 0; e < m.edge_count(); ++e)
        if (m.edge(e).length == 1.0 &&
            ((m.vertex_name(m.edge(e).u) == "p0" && m.vertex_name(m.edge(e).v) == "p4") ||
             (m.vertex_name(m.edge(e).v) == "p0" && m.vertex_name(m.edge(e).u) == "p4")))
            e04 = e;
    REQUIRE(e04 >= 0);
    auto mid_hit = crossing_time(m, swing, 2.0, Point::on_edge(e04, 0.5), 1e-9);
    REQUIRE(mid_hit.has_value());
    CHECK(*mid_hit == doctest::Approx(3.5).epsilon(1e-6));

    // a crossing strictly before earliest_from is ignored
    auto later = crossing_time(m, swing, 2.0, p0, 1e-9, 3.5);
    CHECK_FALSE(later.has_value());
}

TEST_CASE("interior points on parallel and non-geodesic edges") {
    GraphSpec g;
    g.vertices = {"a", "b", "c"};
    g.edges = {{"a", "b", 10.0}, {"a", "c", 1.0}, {"c", "b", 1.0}};
    MetricSpace m = build_metric(g);

    CHECK(distance(m, Point::at_vertex(0), Point::at_vertex(1)) == doctest::Approx(2.0));
    // leaving the long edge through both endpoints beats walking along it
    CHECK(distance(m, Point::on_edge(0, 1.0), Point::on_edge(0, 9.0)) == doctest::Approx(4.0));
    CHECK(distance(m, Point::on_edge(0, 9.0), Point::at_vertex(1)) == doctest::Approx(1.0));
    CHECK(distance(m, Point::on_edge(0, 5.0), Point::at_vertex(2)) == doctest::Approx(6.0));

    GraphSpec twin;
    twin.vertices = {"a", "b"};
    twin.edges = {{"a", "b", 3.0}, {"a", "b", 1.0}};
    MetricSpace mt = build_metric(twin);
    CHECK(distance(mt, Point::at_vertex(0), Point::at_vertex(1)) == doctest::Approx(1.0));
    // midpoint of the longer parallel edge exits through an endpoint
    CHECK(distance(mt, Point::on_edge(0, 1.5), Point::on_edge(1, 0.5)) == doctest::Approx(2.0));
}

TEST_CASE("point normalization and validation") {
    MetricSpace m = build_metric(fig1_spec());
    CHECK(m.normalized(Point::on_edge(0, 0.0)).is_vertex());
    CHECK(m.normalized(Point::on_edge(0, 1.0)).is_vertex());
    CHECK_FALSE(m.normalized(Point::on_edge(0, 0.25)).is_vertex());
    CHECK_THROWS_AS(m.normalized(Point::on_edge(0, 1.5)), InvalidPoint);
    CHECK_THROWS_AS(m.normalized(Point::on_edge(99, 0.5)), InvalidPoint);
    CHECK_THROWS_AS(m.normalized(Point::at_vertex(42)), InvalidPoint);
    CHECK_THROWS_AS(distance(m, Point::at_vertex(42), Point::at_vertex(0)), InvalidPoint);
}

TEST_CASE("metric axioms hold on random graphs") {
    Rng rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        MetricSpace m = build_metric(random_graph(rng, 8));
        for (int i = 0; i < 12; ++i) {
            Point a = random_point(rng, m), b = random_point(rng, m), c = random_point(rng, m);
            double ab = distance(m, a, b);
            double ba = distance(m, b, a);
            double ac = distance(m, a, c);
            double cb = distance(m, c, b);
            CHECK(ab >= 0.0);
            CHECK(std::abs(ab - ba) <= 1e-9);
            CHECK(ab <= ac + cb + 1e-9);
            CHECK(distance(m, a, a) == 0.0);
        }
    }
}

TEST_CASE("shortest_path length equals distance and motion is 1-Lipschitz") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        MetricSpace m = build_metric(random_graph(rng, 8));
        Point a = random_point(rng, m), b = random_point(rng, m);
        PathPlan plan = shortest_path(m, a, b);
        CHECK(plan.total_length == doctest::Approx(distance(m, a, b)).epsilon(1e-9));
        CHECK(same_point(position_along(plan, 0.0), m.normalized(a)));
        CHECK(same_point(position_along(plan, plan.total_length), m.normalized(b)));
        for (int i = 0; i < 6; ++i) {
            double s = rng.uniform(0.0, plan.total_length);
            double t = rng.uniform(0.0, plan.total_length);
            double moved = distance(m, position_along(plan, s), position_along(plan, t));
            CHECK(moved <= std::abs(s - t) + 1e-9);
        }
    }
}

TEST_CASE("distance agrees with the simple-path oracle on small graphs") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        GraphSpec g = random_graph(rng, 5);
        MetricSpace m = build_metric(g);
        for (int i = 0; i < 10; ++i) {
            Point a = random_point(rng, m), b = random_point(rng, m);
            CHECK(distance(m, a, b) ==
                  doctest::Approx(oracle_distance(g, m, a, b)).epsilon(1e-9));
        }
    }
}

TEST_CASE("weighted graph isomorphism") {
    GraphSpec fig1 = fig1_spec();
    GraphSpec shuffled = fig1;
    std::swap(shuffled.vertices[1], shuffled.vertices[5]);
    CHECK(weighted_isomorphic(fig1, shuffled));

    GraphSpec other = fig1;
    other.edges[9].length = 2.0;
    CHECK_FALSE(weighted_isomorphic(fig1, other));
}

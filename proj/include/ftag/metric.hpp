#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ftag/errors.hpp"

namespace ftag {

// A location in the metric space: either a vertex, or an interior point of
// an edge at a given offset from the edge's `u` endpoint. Offsets of 0 or
// full edge length normalize to the vertex form.
struct Point {
    int vertex_id = -1;   // >= 0 iff vertex form
    int edge_id = -1;     // >= 0 iff edge form
    double offset = 0.0;  // distance from edge's u endpoint

    static Point at_vertex(int v) { return Point{v, -1, 0.0}; }
    static Point on_edge(int e, double off) { return Point{-1, e, off}; }

    bool is_vertex() const { return vertex_id >= 0; }
};

// Exact structural equality (after normalization both forms compare field
// by field). Use distance() for metric proximity.
bool same_point(const Point& a, const Point& b);

// Weighted-graph description, also the JSON wire form. Edge order defines
// edge indices; parallel edges between the same endpoints are allowed and
// kept distinct.
struct GraphSpec {
    struct Edge {
        std::string u;
        std::string v;
        double length = 0.0;
    };
    std::vector<std::string> vertices;
    std::vector<Edge> edges;
};

// The metric space induced by a positively weighted connected graph:
// points live on vertices and edge interiors, distances are shortest paths
// that may travel along edge interiors. Immutable after build; safe to
// share across threads.
class MetricSpace {
public:
    struct Edge {
        int u = -1;
        int v = -1;
        double length = 0.0;
    };

    int vertex_count() const { return static_cast<int>(names_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::string& vertex_name(int v) const { return names_[v]; }
    std::optional<int> vertex_index(std::string_view name) const;
    const Edge& edge(int e) const { return edges_[e]; }
    double vertex_distance(int u, int v) const { return dist_[u][v]; }
    const GraphSpec& graph() const { return graph_; }

    // Validates ids/offsets and collapses edge endpoints to vertex form.
    // Throws InvalidPoint.
    Point normalized(const Point& p) const;

    // Vertices of the shortest u->v path, endpoints included.
    std::vector<int> vertex_path(int u, int v) const;

private:
    friend MetricSpace build_metric(const GraphSpec& g);

    GraphSpec graph_;
    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<std::vector<double>> dist_;  // all vertex pairs
    std::vector<std::vector<int>> pred_;     // pred_[s][v]: previous hop on s->v
};

// A unit-speed route: waypoints where each consecutive pair lies on a
// common edge, plus the resolved per-edge segments used for interpolation.
struct PathPlan {
    struct Segment {
        int edge = -1;
        int u = -1;  // edge endpoints, for contact tests
        int v = -1;
        double edge_length = 0.0;
        double from = 0.0;  // offsets from u
        double to = 0.0;
        double length() const { return from < to ? to - from : from - to; }
    };
    std::vector<Point> waypoints;
    std::vector<Segment> segments;
    double total_length = 0.0;

    const Point& first() const { return waypoints.front(); }
    const Point& last() const { return waypoints.back(); }
};

// Builds and validates the space: positive edge lengths, known endpoints,
// connectivity; precomputes all vertex-pair shortest paths.
// Throws NonpositiveEdgeLength, UnknownVertex, DisconnectedGraph.
MetricSpace build_metric(const GraphSpec& g);

// Shortest-path length between two points, travelling along edges.
double distance(const MetricSpace& m, const Point& a, const Point& b);

// A geodesic realizing distance(m, a, b).
PathPlan shortest_path(const MetricSpace& m, const Point& a, const Point& b);

// A plan through the given waypoints (each consecutive pair must share an
// edge); total_length is the sum of the leg lengths, not necessarily the
// a-to-b distance. Throws InvalidPoint if a pair cannot be connected.
PathPlan make_plan(const MetricSpace& m, const std::vector<Point>& waypoints);

// The unique point at arc length `elapsed` along the plan.
// Throws ElapsedOutOfRange outside [0, total_length].
Point position_along(const PathPlan& plan, double elapsed);

// Earliest absolute time t >= max(depart, earliest_from) at which a unit
// speed mover that departed at `depart` along `plan` is within `tol` of
// `target`; nullopt if that never happens during the plan.
std::optional<double> crossing_time(const MetricSpace& m, const PathPlan& plan,
                                    double depart, const Point& target, double tol,
                                    double earliest_from = 0.0);

// Weighted-graph isomorphism on the specs (labels ignored, lengths compared
// within tol). Intended for the small construction graphs used here.
bool weighted_isomorphic(const GraphSpec& a, const GraphSpec& b, double tol = 1e-9);

}  // namespace ftag

#include "ftag/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

namespace ftag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSnapTol = 1e-12;  // offset snapping to edge endpoints

}  // namespace

bool same_point(const Point& a, const Point& b) {
    if (a.is_vertex() != b.is_vertex()) return false;
    if (a.is_vertex()) return a.vertex_id == b.vertex_id;
    return a.edge_id == b.edge_id && std::abs(a.offset - b.offset) <= kSnapTol;
}

std::optional<int> MetricSpace::vertex_index(std::string_view name) const {
    for (int i = 0; i < vertex_count(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

Point MetricSpace::normalized(const Point& p) const {
    if (p.is_vertex()) {
        if (p.vertex_id >= vertex_count())
            throw InvalidPoint("vertex id " + std::to_string(p.vertex_id) + " out of range");
        return p;
    }
    if (p.edge_id < 0 || p.edge_id >= edge_count())
        throw InvalidPoint("edge id " + std::to_string(p.edge_id) + " out of range");
    const Edge& e = edges_[p.edge_id];
    if (p.offset < -kSnapTol || p.offset > e.length + kSnapTol)
        throw InvalidPoint("offset " + std::to_string(p.offset) + " outside edge of length " +
                           std::to_string(e.length));
    if (p.offset <= kSnapTol) return Point::at_vertex(e.u);
    if (p.offset >= e.length - kSnapTol) return Point::at_vertex(e.v);
    return p;
}

std::vector<int> MetricSpace::vertex_path(int u, int v) const {
    std::vector<int> rev;
    for (int cur = v; cur != u; cur = pred_[u][cur]) rev.push_back(cur);
    rev.push_back(u);
    std::reverse(rev.begin(), rev.end());
    return rev;
}

MetricSpace build_metric(const GraphSpec& g) {
    if (g.vertices.empty()) throw UnknownVertex("empty vertex list");

    MetricSpace m;
    m.graph_ = g;
    m.names_ = g.vertices;

    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(g.vertices.size()); ++i) {
        if (!index.emplace(g.vertices[i], i).second)
            throw UnknownVertex("duplicate vertex name '" + g.vertices[i] + "'");
    }

    for (const auto& e : g.edges) {
        auto iu = index.find(e.u);
        auto iv = index.find(e.v);
        if (iu == index.end()) throw UnknownVertex("edge endpoint '" + e.u + "' is not a vertex");
        if (iv == index.end()) throw UnknownVertex("edge endpoint '" + e.v + "' is not a vertex");
        if (!(e.length > 0.0))
            throw NonpositiveEdgeLength("edge (" + e.u + "," + e.v + ") has length " +
                                        std::to_string(e.length));
        m.edges_.push_back({iu->second, iv->second, e.length});
    }

    const int n = m.vertex_count();
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& e : m.edges_) {
        adj[e.u].push_back({e.v, e.length});
        adj[e.v].push_back({e.u, e.length});
    }

    m.dist_.assign(n, std::vector<double>(n, kInf));
    m.pred_.assign(n, std::vector<int>(n, -1));
    for (int s = 0; s < n; ++s) {
        auto& dist = m.dist_[s];
        auto& pred = m.pred_[s];
        dist[s] = 0.0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
        heap.push({0.0, s});
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            for (auto [v, w] : adj[u]) {
                if (d + w < dist[v]) {
                    dist[v] = d + w;
                    pred[v] = u;
                    heap.push({dist[v], v});
                }
            }
        }
        for (int v = 0; v < n; ++v)
            if (dist[v] == kInf)
                throw DisconnectedGraph("no path from '" + m.names_[s] + "' to '" + m.names_[v] +
                                        "'");
    }
    return m;
}

namespace {

// candidate exits from a point: (vertex, cost to reach it along its edge)
struct Exit {
    int vertex;
    double cost;
};

std::vector<Exit> exits_of(const MetricSpace& m, const Point& p) {
    if (p.is_vertex()) return {{p.vertex_id, 0.0}};
    const auto& e = m.edge(p.edge_id);
    return {{e.u, p.offset}, {e.v, e.length - p.offset}};
}

// The cheapest edge joining two vertices, or -1.
int direct_edge(const MetricSpace& m, int u, int v) {
    int best = -1;
    for (int i = 0; i < m.edge_count(); ++i) {
        const auto& e = m.edge(i);
        if ((e.u == u && e.v == v) || (e.u == v && e.v == u))
            if (best < 0 || e.length < m.edge(best).length) best = i;
    }
    return best;
}

}  // namespace

double distance(const MetricSpace& m, const Point& a_in, const Point& b_in) {
    const Point a = m.normalized(a_in);
    const Point b = m.normalized(b_in);
    if (same_point(a, b)) return 0.0;

    double best = kInf;
    if (!a.is_vertex() && !b.is_vertex() && a.edge_id == b.edge_id)
        best = std::abs(a.offset - b.offset);
    for (const Exit& ea : exits_of(m, a))
        for (const Exit& eb : exits_of(m, b))
            best = std::min(best, ea.cost + m.vertex_distance(ea.vertex, eb.vertex) + eb.cost);
    return best;
}

namespace {

PathPlan resolve_plan(const MetricSpace& m, const std::vector<Point>& raw) {
    PathPlan plan;
    for (const Point& p : raw) {
        Point q = m.normalized(p);
        if (plan.waypoints.empty() || !same_point(plan.waypoints.back(), q))
            plan.waypoints.push_back(q);
    }
    if (plan.waypoints.empty()) throw InvalidPoint("empty waypoint list");

    for (size_t i = 0; i + 1 < plan.waypoints.size(); ++i) {
        const Point& p = plan.waypoints[i];
        const Point& q = plan.waypoints[i + 1];
        PathPlan::Segment seg;
        if (!p.is_vertex() && !q.is_vertex()) {
            if (p.edge_id != q.edge_id)
                throw InvalidPoint("consecutive interior waypoints on different edges");
            seg.edge = p.edge_id;
            seg.from = p.offset;
            seg.to = q.offset;
        } else if (!p.is_vertex() || !q.is_vertex()) {
            const Point& interior = p.is_vertex() ? q : p;
            const Point& vert = p.is_vertex() ? p : q;
            const auto& e = m.edge(interior.edge_id);
            double vert_off;
            if (e.u == vert.vertex_id)
                vert_off = 0.0;
            else if (e.v == vert.vertex_id)
                vert_off = e.length;
            else
                throw InvalidPoint("waypoint vertex not an endpoint of the adjacent edge");
            seg.edge = interior.edge_id;
            seg.from = p.is_vertex() ? vert_off : interior.offset;
            seg.to = p.is_vertex() ? interior.offset : vert_off;
        } else {
            int e = direct_edge(m, p.vertex_id, q.vertex_id);
            if (e < 0)
                throw InvalidPoint("no edge joins consecutive waypoint vertices '" +
                                   m.vertex_name(p.vertex_id) + "' and '" +
                                   m.vertex_name(q.vertex_id) + "'");
            seg.edge = e;
            seg.from = m.edge(e).u == p.vertex_id ? 0.0 : m.edge(e).length;
            seg.to = m.edge(e).u == q.vertex_id ? 0.0 : m.edge(e).length;
        }
        seg.u = m.edge(seg.edge).u;
        seg.v = m.edge(seg.edge).v;
        seg.edge_length = m.edge(seg.edge).length;
        if (seg.length() > 0.0) {
            plan.segments.push_back(seg);
            plan.total_length += seg.length();
        }
    }
    return plan;
}

}  // namespace

PathPlan make_plan(const MetricSpace& m, const std::vector<Point>& waypoints) {
    return resolve_plan(m, waypoints);
}

PathPlan shortest_path(const MetricSpace& m, const Point& a_in, const Point& b_in) {
    const Point a = m.normalized(a_in);
    const Point b = m.normalized(b_in);
    if (same_point(a, b)) {
        PathPlan plan;
        plan.waypoints.push_back(a);
        return plan;
    }

    // pick the best route among same-edge direct travel and all
    // exit-vertex pair combinations
    double best = kInf;
    bool direct = false;
    Exit best_a{-1, 0}, best_b{-1, 0};
    if (!a.is_vertex() && !b.is_vertex() && a.edge_id == b.edge_id) {
        best = std::abs(a.offset - b.offset);
        direct = true;
    }
    for (const Exit& ea : exits_of(m, a)) {
        for (const Exit& eb : exits_of(m, b)) {
            double c = ea.cost + m.vertex_distance(ea.vertex, eb.vertex) + eb.cost;
            if (c < best) {
                best = c;
                direct = false;
                best_a = ea;
                best_b = eb;
            }
        }
    }

    std::vector<Point> waypoints;
    waypoints.push_back(a);
    if (!direct) {
        for (int v : m.vertex_path(best_a.vertex, best_b.vertex))
            waypoints.push_back(Point::at_vertex(v));
    }
    waypoints.push_back(b);
    return resolve_plan(m, waypoints);
}

Point position_along(const PathPlan& plan, double elapsed) {
    if (elapsed < -1e-9 || elapsed > plan.total_length + 1e-9)
        throw ElapsedOutOfRange("elapsed " + std::to_string(elapsed) + " outside [0, " +
                                std::to_string(plan.total_length) + "]");
    elapsed = std::clamp(elapsed, 0.0, plan.total_length);
    double acc = 0.0;
    for (const auto& seg : plan.segments) {
        double len = seg.length();
        if (elapsed <= acc + len) {
            double s = elapsed - acc;
            double off = seg.from < seg.to ? seg.from + s : seg.from - s;
            // snap to endpoints so positions normalize like any other Point
            if (off <= kSnapTol) return Point::at_vertex(seg.u);
            if (off >= seg.edge_length - kSnapTol) return Point::at_vertex(seg.v);
            return Point::on_edge(seg.edge, off);
        }
        acc += len;
    }
    return plan.waypoints.back();
}

namespace {

// Earliest s in [lo, hi] with a + slope*s <= tol, or nullopt.
std::optional<double> earliest_linear(double a, double slope, double lo, double hi, double tol) {
    if (a + slope * lo <= tol) return lo;
    if (slope >= 0.0) return std::nullopt;  // increasing or constant, already above tol
    double s = (a - tol) / -slope;
    if (s > hi) return std::nullopt;
    return std::max(s, lo);
}

// Earliest s in [lo, hi] with |a + slope*s| <= tol, or nullopt.
std::optional<double> earliest_abs_linear(double a, double slope, double lo, double hi,
                                          double tol) {
    if (std::abs(a + slope * lo) <= tol) return lo;
    if (slope == 0.0) return std::nullopt;
    double s1 = (-tol - a) / slope;
    double s2 = (tol - a) / slope;
    double in_lo = std::min(s1, s2);
    double in_hi = std::max(s1, s2);
    if (in_hi < lo || in_lo > hi) return std::nullopt;
    return std::max(in_lo, lo);
}

}  // namespace

std::optional<double> crossing_time(const MetricSpace& m, const PathPlan& plan, double depart,
                                    const Point& target_in, double tol, double earliest_from) {
    const Point target = m.normalized(target_in);
    const double floor_time = std::max(depart, earliest_from);

    if (plan.segments.empty()) {
        // an instantaneous (zero length) plan: contact iff already there
        if (distance(m, plan.waypoints.front(), target) <= tol) return floor_time;
        return std::nullopt;
    }

    double seg_start = 0.0;  // arc length at segment begin
    for (const auto& seg : plan.segments) {
        const double len = seg.length();
        const double dir = seg.from < seg.to ? 1.0 : -1.0;
        double lo = std::max(0.0, floor_time - depart - seg_start);
        if (lo <= len) {
            // distance to target as a function of progress s is the min of
            // up to three |linear| candidates: same-edge direct travel and
            // leaving via either endpoint
            std::optional<double> hit;
            auto consider = [&](std::optional<double> s) {
                if (s && (!hit || *s < *hit)) hit = s;
            };
            if (!target.is_vertex() && target.edge_id == seg.edge)
                consider(earliest_abs_linear(seg.from - target.offset, dir, lo, len, tol));
            double du = distance(m, Point::at_vertex(seg.u), target);
            double dv = distance(m, Point::at_vertex(seg.v), target);
            consider(earliest_linear(seg.from + du, dir, lo, len, tol));
            consider(earliest_linear(seg.edge_length - seg.from + dv, -dir, lo, len, tol));
            if (hit) return depart + seg_start + *hit;
        }
        seg_start += len;
    }
    return std::nullopt;
}

namespace {

struct IsoGraph {
    int n = 0;
    // multiset of incident edge lengths per vertex, sorted
    std::vector<std::vector<double>> incident;
    // adjacency as sorted multiset of lengths per vertex pair
    std::map<std::pair<int, int>, std::vector<double>> pairs;
};

IsoGraph iso_prep(const GraphSpec& g) {
    IsoGraph r;
    r.n = static_cast<int>(g.vertices.size());
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < r.n; ++i) index[g.vertices[i]] = i;
    r.incident.resize(r.n);
    for (const auto& e : g.edges) {
        int u = index.at(e.u), v = index.at(e.v);
        r.incident[u].push_back(e.length);
        r.incident[v].push_back(e.length);
        auto key = std::minmax(u, v);
        r.pairs[{key.first, key.second}].push_back(e.length);
    }
    for (auto& inc : r.incident) std::sort(inc.begin(), inc.end());
    for (auto& [k, lens] : r.pairs) std::sort(lens.begin(), lens.end());
    return r;
}

bool lens_match(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

bool iso_extend(const IsoGraph& A, const IsoGraph& B, std::vector<int>& map_ab,
                std::vector<bool>& used, int next, double tol) {
    if (next == A.n) return true;
    for (int cand = 0; cand < B.n; ++cand) {
        if (used[cand]) continue;
        if (!lens_match(A.incident[next], B.incident[cand], tol)) continue;
        bool ok = true;
        for (int prev = 0; prev < next && ok; ++prev) {
            auto ka = std::minmax(prev, next);
            auto kb = std::minmax(map_ab[prev], cand);
            auto ia = A.pairs.find({ka.first, ka.second});
            auto ib = B.pairs.find({kb.first, kb.second});
            bool ha = ia != A.pairs.end(), hb = ib != B.pairs.end();
            if (ha != hb)
                ok = false;
            else if (ha && !lens_match(ia->second, ib->second, tol))
                ok = false;
        }
        if (!ok) continue;
        map_ab[next] = cand;
        used[cand] = true;
        if (iso_extend(A, B, map_ab, used, next + 1, tol)) return true;
        used[cand] = false;
    }
    return false;
}

}  // namespace

bool weighted_isomorphic(const GraphSpec& a, const GraphSpec& b, double tol) {
    if (a.vertices.size() != b.vertices.size() || a.edges.size() != b.edges.size()) return false;
    IsoGraph A = iso_prep(a), B = iso_prep(b);
    std::vector<int> map_ab(A.n, -1);
    std::vector<bool> used(B.n, false);
    return iso_extend(A, B, map_ab, used, 0, tol);
}

}  // namespace ftag

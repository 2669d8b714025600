#include "ftag/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ftag {

using nlohmann::json;

const RobotSpec* Instance::find(int id) const {
    for (const auto& r : robots)
        if (r.id == id) return &r;
    return nullptr;
}

int Instance::active_count() const {
    int n = 0;
    for (const auto& r : robots) n += r.initially_active ? 1 : 0;
    return n;
}

int Instance::frozen_count() const {
    return static_cast<int>(robots.size()) - active_count();
}

void validate(const Instance& inst) {
    if (!inst.metric) throw InvalidInstance("instance has no metric");
    if (inst.active_count() == 0) throw NoActiveRobot("instance has no initially active robot");

    std::set<int> ids;
    for (const auto& r : inst.robots) {
        if (!ids.insert(r.id).second)
            throw InvalidInstance("duplicate robot id " + std::to_string(r.id));
        if (r.initially_active && r.release != 0.0)
            throw ActiveWithPositiveRelease("robot " + std::to_string(r.id) +
                                            " is active but released at " +
                                            std::to_string(r.release));
        if (r.release < 0.0)
            throw InvalidInstance("robot " + std::to_string(r.id) + " has negative release");
        try {
            (void)inst.metric->normalized(r.home);
        } catch (const InvalidPoint& e) {
            throw InvalidHome("robot " + std::to_string(r.id) + ": " + e.what());
        }
    }

    bool seen_frozen = false;
    double prev = 0.0;
    for (const auto& r : inst.robots) {
        if (r.initially_active) {
            if (seen_frozen)
                throw UnsortedReleases("active robot " + std::to_string(r.id) +
                                       " listed after a frozen robot");
            continue;
        }
        if (seen_frozen && r.release < prev)
            throw UnsortedReleases("release " + std::to_string(r.release) + " of robot " +
                                   std::to_string(r.id) + " precedes " + std::to_string(prev));
        seen_frozen = true;
        prev = r.release;
    }
}

Instance truncate(const Instance& inst, double time) {
    Instance out;
    out.metric = inst.metric;
    for (const auto& r : inst.robots)
        if (r.release <= time) out.robots.push_back(r);
    return out;
}

namespace {

void check_fields(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) throw SchemaError(path + ": unknown field '" + it.key() + "'");
    }
}

const json& field(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + ": missing field '" + key + "'");
    return *it;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path + ": expected a number");
    return j.get<double>();
}

std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path + ": expected a string");
    return j.get<std::string>();
}

}  // namespace

GraphSpec graph_from_json(const json& j, const std::string& path) {
    check_fields(j, {"vertices", "edges"}, path);
    GraphSpec g;
    const json& verts = field(j, "vertices", path);
    if (!verts.is_array()) throw SchemaError(path + ".vertices: expected an array");
    for (size_t i = 0; i < verts.size(); ++i)
        g.vertices.push_back(string_at(verts[i], path + ".vertices[" + std::to_string(i) + "]"));
    const json& edges = field(j, "edges", path);
    if (!edges.is_array()) throw SchemaError(path + ".edges: expected an array");
    for (size_t i = 0; i < edges.size(); ++i) {
        std::string ep = path + ".edges[" + std::to_string(i) + "]";
        const json& e = edges[i];
        check_fields(e, {"u", "v", "length"}, ep);
        g.edges.push_back({string_at(field(e, "u", ep), ep + ".u"),
                           string_at(field(e, "v", ep), ep + ".v"),
                           number_at(field(e, "length", ep), ep + ".length")});
    }
    return g;
}

json graph_to_json(const GraphSpec& g) {
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back({{"u", e.u}, {"v", e.v}, {"length", e.length}});
    return {{"vertices", g.vertices}, {"edges", edges}};
}

Point point_from_json(const MetricSpace& m, const json& j, const std::string& path) {
    if (!j.is_object() || j.size() != 1)
        throw SchemaError(path + ": expected exactly one of 'vertex' or 'edge'");
    if (j.contains("vertex")) {
        std::string name = string_at(j["vertex"], path + ".vertex");
        auto idx = m.vertex_index(name);
        if (!idx) throw SchemaError(path + ".vertex: unknown vertex '" + name + "'");
        return Point::at_vertex(*idx);
    }
    if (j.contains("edge")) {
        const json& e = j["edge"];
        std::string ep = path + ".edge";
        check_fields(e, {"index", "offset"}, ep);
        const json& idx = field(e, "index", ep);
        if (!idx.is_number_integer()) throw SchemaError(ep + ".index: expected an integer");
        int index = idx.get<int>();
        double offset = number_at(field(e, "offset", ep), ep + ".offset");
        if (index < 0 || index >= m.edge_count())
            throw SchemaError(ep + ".index: edge " + std::to_string(index) + " out of range");
        try {
            return m.normalized(Point::on_edge(index, offset));
        } catch (const InvalidPoint& err) {
            throw SchemaError(ep + ": " + err.what());
        }
    }
    throw SchemaError(path + ": expected 'vertex' or 'edge'");
}

json point_to_json(const MetricSpace& m, const Point& p_in) {
    Point p = m.normalized(p_in);
    if (p.is_vertex()) return {{"vertex", m.vertex_name(p.vertex_id)}};
    return {{"edge", {{"index", p.edge_id}, {"offset", p.offset}}}};
}

Instance instance_from_json(const json& j) {
    check_fields(j, {"metric", "robots"}, "instance");
    GraphSpec g = graph_from_json(field(j, "metric", "instance"), "instance.metric");
    std::shared_ptr<const MetricSpace> metric;
    try {
        metric = std::make_shared<const MetricSpace>(build_metric(g));
    } catch (const Error& e) {
        throw SchemaError(std::string("instance.metric: ") + e.what());
    }

    Instance inst;
    inst.metric = metric;
    const json& robots = field(j, "robots", "instance");
    if (!robots.is_array()) throw SchemaError("instance.robots: expected an array");
    for (size_t i = 0; i < robots.size(); ++i) {
        std::string rp = "instance.robots[" + std::to_string(i) + "]";
        const json& r = robots[i];
        check_fields(r, {"id", "point", "release", "active"}, rp);
        RobotSpec spec;
        const json& id = field(r, "id", rp);
        if (!id.is_number_integer()) throw SchemaError(rp + ".id: expected an integer");
        spec.id = id.get<int>();
        spec.home = point_from_json(*metric, field(r, "point", rp), rp + ".point");
        spec.release = number_at(field(r, "release", rp), rp + ".release");
        const json& act = field(r, "active", rp);
        if (!act.is_boolean()) throw SchemaError(rp + ".active: expected a boolean");
        spec.initially_active = act.get<bool>();
        inst.robots.push_back(spec);
    }
    validate(inst);
    return inst;
}

Instance load_instance(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    return instance_from_json(j);
}

json instance_to_json(const Instance& inst) {
    json robots = json::array();
    for (const auto& r : inst.robots)
        robots.push_back({{"id", r.id},
                          {"point", point_to_json(*inst.metric, r.home)},
                          {"release", r.release},
                          {"active", r.initially_active}});
    return {{"metric", graph_to_json(inst.metric->graph())}, {"robots", robots}};
}

std::string save_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

}  // namespace ftag

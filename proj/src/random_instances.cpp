#include "ftag/random_instances.hpp"

#include <algorithm>

namespace ftag {

namespace {

Point random_point(Rng& rng, const MetricSpace& m, bool allow_interior) {
    if (allow_interior && m.edge_count() > 0 && rng.chance(0.5)) {
        int e = rng.uniform_int(0, m.edge_count() - 1);
        double len = m.edge(e).length;
        return Point::on_edge(e, rng.uniform(0.05 * len, 0.95 * len));
    }
    return Point::at_vertex(rng.uniform_int(0, m.vertex_count() - 1));
}

}  // namespace

Instance random_instance(std::uint64_t seed, const RandomInstanceParams& params) {
    Rng rng(seed);

    GraphSpec g;
    int n = rng.uniform_int(2, params.max_vertices);
    for (int i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
    for (int i = 1; i < n; ++i)
        g.edges.push_back(
            {g.vertices[rng.uniform_int(0, i - 1)], g.vertices[i], rng.uniform(0.25, 2.0)});
    int extra = rng.uniform_int(0, n - 1);
    for (int i = 0; i < extra; ++i) {
        int u = rng.uniform_int(0, n - 1);
        int v = rng.uniform_int(0, n - 1);
        if (u == v) continue;
        g.edges.push_back({g.vertices[u], g.vertices[v], rng.uniform(0.25, 2.0)});
    }

    Instance inst;
    inst.metric = std::make_shared<const MetricSpace>(build_metric(g));

    int id = 0;
    int starters = rng.uniform_int(1, params.max_starters);
    for (int i = 0; i < starters; ++i)
        inst.robots.push_back(
            {id++, random_point(rng, *inst.metric, params.edge_interior_homes), 0.0, true});

    int frozen = rng.uniform_int(params.min_frozen, params.max_frozen);
    std::vector<double> releases;
    for (int i = 0; i < frozen; ++i)
        releases.push_back(i == 0 ? rng.uniform(1.0, params.max_release)
                                  : rng.uniform(0.0, params.max_release));
    std::sort(releases.begin(), releases.end());
    for (double r : releases)
        inst.robots.push_back(
            {id++, random_point(rng, *inst.metric, params.edge_interior_homes), r, false});

    validate(inst);
    return inst;
}

}  // namespace ftag

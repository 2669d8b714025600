#include "ftag/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "ftag/adversary.hpp"
#include "ftag/random_instances.hpp"

namespace ftag {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kRho = 1.0 + kSqrt2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read fixture " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", x);
    return buf;
}

// Shared material for criteria 2, 3 and 9: the seeded patience suite.
struct PatienceSuite {
    std::vector<Instance> instances;
    std::vector<Trace> traces;
    std::vector<double> opts;
    std::vector<double> ratios;
    bool any_late = false;
};

PatienceSuite run_patience_suite(int count) {
    PatienceSuite suite;
    RandomInstanceParams params;  // <=6 vertices, <=5 frozen, releases in [0,3]
    for (int seed = 0; seed < count; ++seed) {
        Instance inst = random_instance(static_cast<std::uint64_t>(seed), params);
        PatienceStrategy strategy;
        Trace trace = simulate(inst, strategy);
        double opt = opt_exact(inst).makespan;
        suite.instances.push_back(std::move(inst));
        suite.ratios.push_back(ratio(trace, opt));
        suite.opts.push_back(opt);
        suite.any_late = suite.any_late || strategy.step1_late();
        suite.traces.push_back(std::move(trace));
    }
    return suite;
}

struct Ctx {
    AcceptanceOptions opts;
    std::unique_ptr<PatienceSuite> suite;

    const PatienceSuite& patience_suite() {
        if (!suite) suite = std::make_unique<PatienceSuite>(run_patience_suite(200));
        return *suite;
    }
    std::string fixture(const std::string& name) const {
        return opts.fixtures_dir + "/" + name;
    }
};

CriterionResult c1_opt_feasibility(Ctx& ctx) {
    Instance two = load_instance(read_file(ctx.fixture("sigma_a_m1.json")));
    Instance one = load_instance(read_file(ctx.fixture("sigma_a_m1_single.json")));
    double m2 = opt_exact(two).makespan;
    double m1 = opt_exact(one).makespan;
    bool pass = std::abs(m2 - 1.0) <= 1e-9 && std::abs(m1 - 2.0) <= 1e-9;
    return {1, "opt feasibility pair on sigma_A(M_1)", pass,
            "expected 1.0 and 2.0, got " + num(m2) + " and " + num(m1), 0};
}

CriterionResult c2_upper_bound(Ctx& ctx) {
    const auto& suite = ctx.patience_suite();
    double worst = 0.0;
    int worst_seed = -1;
    for (size_t i = 0; i < suite.ratios.size(); ++i)
        if (suite.ratios[i] > worst) {
            worst = suite.ratios[i];
            worst_seed = static_cast<int>(i);
        }
    bool pass = worst <= kRho + 1e-6 && !suite.any_late;
    return {2, "patience ratio <= 1+sqrt(2) on 200 random instances", pass,
            "bound " + num(kRho) + ", worst ratio " + num(worst) + " (seed " +
                std::to_string(worst_seed) + (suite.any_late ? ", late step 1!" : "") + ")",
            0};
}

CriterionResult c3_nearby(Ctx& ctx) {
    const auto& suite = ctx.patience_suite();
    double worst_excess = -1.0;
    for (size_t i = 0; i < suite.traces.size(); ++i) {
        const Trace& trace = suite.traces[i];
        for (double t = 0.0; t <= trace.end_time + 1e-12; t += 0.01) {
            double tc = std::min(t, trace.end_time);
            for (const auto& [id, pos] : positions_at(trace, tc)) {
                double d = distance(*trace.metric, pos, trace.homes.at(id));
                worst_excess = std::max(worst_excess, d - tc / kRho);
            }
        }
    }
    bool pass = worst_excess <= 1e-6;
    return {3, "distance-to-home <= T/(1+sqrt(2)) in every patience trace", pass,
            "worst excess over the bound " + num(worst_excess), 0};
}

CriterionResult c4_lower_bound_k1(Ctx&) {
    AdversaryReport greedy = run_adversary(1, make_strategy_factory("greedy"));
    AdversaryReport patience = run_adversary(1, make_strategy_factory("patience"));
    double bound = 3.0 * kSqrt2 - 2.0 - 0.01;
    bool pass = greedy.achieved_ratio >= bound && patience.achieved_ratio >= bound &&
                std::abs(patience.achieved_ratio - kRho) <= 1e-6;
    return {4, "adversary k=1 beats 3sqrt(2)-2 on greedy and patience", pass,
            "bound " + num(bound) + ", greedy " + num(greedy.achieved_ratio) + ", patience " +
                num(patience.achieved_ratio) + " (expected " + num(kRho) + ")",
            0};
}

CriterionResult c5_lower_bound_k2(Ctx&) {
    AdversaryReport greedy = run_adversary(2, make_strategy_factory("greedy"));
    AdversaryReport patience = run_adversary(2, make_strategy_factory("patience"));
    double bound = r_bound(2) - 0.01;
    bool pass = greedy.achieved_ratio >= bound && patience.achieved_ratio >= bound;
    return {5, "adversary k=2 beats R_2 on greedy and patience", pass,
            "bound " + num(bound) + ", greedy " + num(greedy.achieved_ratio) + ", patience " +
                num(patience.achieved_ratio),
            0};
}

CriterionResult c6_constructions(Ctx& ctx) {
    std::string detail;
    bool pass = true;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    };

    long long want[4] = {1, 2, 5, 26};
    for (int k = 0; k <= 3; ++k) {
        expect(tree_node_count(k) == want[k], "N_" + std::to_string(k) + " count");
        expect(build_tree(k).node_count() == want[k], "T_" + std::to_string(k) + " size");
    }

    for (int k = 1; k <= 2; ++k) {
        LowerBoundMetric lbm = build_metric_k(k);
        const Point origin = Point::at_vertex(lbm.origin);
        for (const auto& copy : lbm.copies)
            for (int v : copy.node_vertex)
                expect(std::abs(distance(*lbm.metric, origin, Point::at_vertex(v)) - 1.0) <= 1e-9,
                       "M_" + std::to_string(k) + " tree vertex distance");
        for (int j = 0; j < lbm.tree.node_count(); ++j)
            if (lbm.tree.down_degree(j) == 0)
                expect(std::abs(lbm.tree.depth_of(j) - 1.0) <= 1e-9,
                       "M_" + std::to_string(k) + " root-to-leaf length");
        for (int sv : lbm.spoke_vertices)
            expect(std::abs(distance(*lbm.metric, origin, Point::at_vertex(sv)) - kRho) <= 1e-9,
                   "M_" + std::to_string(k) + " spoke distance");
    }

    nlohmann::json fig1 = nlohmann::json::parse(read_file(ctx.fixture("fig1_metric.json")));
    GraphSpec fig1_graph = graph_from_json(fig1, "fig1");
    expect(weighted_isomorphic(build_metric_k(1).metric->graph(), fig1_graph),
           "M_1 isomorphic to the figure-1 fixture");

    if (detail.empty()) detail = "N_k = 1,2,5,26; unit tree distances; spokes at 1+sqrt(2)";
    return {6, "lower-bound construction invariants", pass, detail, 0};
}

CriterionResult c7_r_bound_identity(Ctx&) {
    bool pass = std::abs(r_bound(0) - 2.0) <= 1e-12 &&
                std::abs(r_bound(1) - (3.0 * kSqrt2 - 2.0)) <= 1e-12;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        double iterated = r_bound(k) + kSqrt2 * (1.0 - r_bound(k) * (kSqrt2 - 1.0));
        worst = std::max(worst, std::abs(r_bound(k + 1) - iterated));
    }
    pass = pass && worst <= 1e-12 && (kRho - r_bound(10)) < 1e-3 && kRho > r_bound(10);
    return {7, "R_k matches its recurrence and limit", pass,
            "worst recurrence residual " + num(worst) + ", 1+sqrt(2)-R_10 = " +
                num(kRho - r_bound(10)),
            0};
}

CriterionResult c8_solver_oracle(Ctx&) {
    double worst = 0.0;
    int worst_seed = -1;
    for (int seed = 1000; seed < 1100; ++seed) {
        Instance inst = random_instance(static_cast<std::uint64_t>(seed));
        double exact = opt_exact(inst).makespan;
        double brute = opt_bruteforce(inst).makespan;
        if (std::abs(exact - brute) > worst) {
            worst = std::abs(exact - brute);
            worst_seed = seed;
        }
    }
    bool pass = worst <= 1e-9;
    return {8, "opt_exact equals opt_bruteforce on 100 random instances", pass,
            "worst |exact - brute| " + num(worst) + " (seed " + std::to_string(worst_seed) + ")",
            0};
}

CriterionResult c9_engine_properties(Ctx& ctx) {
    const auto& suite = ctx.patience_suite();
    std::string detail;
    bool pass = true;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    };

    for (size_t i = 0; i < suite.traces.size(); ++i) {
        const Trace& trace = suite.traces[i];
        std::string tag = " (seed " + std::to_string(i) + ")";

        // speed limit over sampled time pairs
        std::vector<double> ts;
        for (double t = 0.0; t <= trace.end_time + 1e-12; t += 0.05)
            ts.push_back(std::min(t, trace.end_time));
        std::vector<std::map<int, Point>> pos;
        for (double t : ts) pos.push_back(positions_at(trace, t));
        for (size_t a = 0; a + 1 < ts.size(); ++a) {
            for (size_t step : {size_t(1), size_t(7)}) {
                size_t b = a + step;
                if (b >= ts.size()) continue;
                for (const auto& [id, pa] : pos[a]) {
                    double moved = distance(*trace.metric, pa, pos[b].at(id));
                    expect(moved <= ts[b] - ts[a] + 1e-9, "speed limit violated" + tag);
                }
            }
        }

        // causality: wakes respect releases, frozen robots stay home
        for (const auto& [id, wake] : trace.wake_times) {
            expect(wake >= trace.releases.at(id) - 1e-12, "wake precedes release" + tag);
            for (double f : {0.25, 0.75}) {
                double t = wake * f;
                double d = distance(*trace.metric, position_at(trace, id, t),
                                    trace.homes.at(id));
                expect(d <= 1e-9, "frozen robot moved before waking" + tag);
            }
        }
    }

    // determinism: rerunning a sample of instances reproduces every event
    for (size_t i = 0; i < suite.instances.size(); i += 20) {
        PatienceStrategy strategy;
        Trace again = simulate(suite.instances[i], strategy);
        const Trace& ref = suite.traces[i];
        bool same = again.events.size() == ref.events.size() &&
                    again.makespan == ref.makespan && again.end_time == ref.end_time;
        for (size_t e = 0; same && e < ref.events.size(); ++e)
            same = ref.events[e].time == again.events[e].time &&
                   ref.events[e].kind == again.events[e].kind &&
                   ref.events[e].robot == again.events[e].robot;
        expect(same, "rerun diverged (seed " + std::to_string(i) + ")");
    }

    if (pass) detail = "speed limit, causality and determinism hold on the criterion-2 suite";
    return {9, "engine speed-limit, causality and determinism", pass, detail, 0};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
    Ctx ctx{opts, nullptr};
    struct Entry {
        int id;
        const char* name;
        double budget;  // seconds, 0 = unbounded
        std::function<CriterionResult(Ctx&)> fn;
    };
    std::vector<Entry> criteria = {
        {1, "opt feasibility pair on sigma_A(M_1)", 1.0, c1_opt_feasibility},
        {2, "patience ratio <= 1+sqrt(2) on 200 random instances", 120.0, c2_upper_bound},
        {3, "distance-to-home <= T/(1+sqrt(2)) in every patience trace", 0.0, c3_nearby},
        {4, "adversary k=1 beats 3sqrt(2)-2 on greedy and patience", 10.0, c4_lower_bound_k1},
        {5, "adversary k=2 beats R_2 on greedy and patience", 120.0, c5_lower_bound_k2},
        {6, "lower-bound construction invariants", 0.0, c6_constructions},
        {7, "R_k matches its recurrence and limit", 0.0, c7_r_bound_identity},
        {8, "opt_exact equals opt_bruteforce on 100 random instances", 60.0, c8_solver_oracle},
        {9, "engine speed-limit, causality and determinism", 0.0, c9_engine_properties},
    };

    std::vector<CriterionResult> results;
    for (auto& entry : criteria) {
        if (!opts.filter.empty() &&
            std::string(entry.name).find(opts.filter) == std::string::npos &&
            std::to_string(entry.id) != opts.filter)
            continue;
        auto start = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = entry.fn(ctx);
        } catch (const std::exception& e) {
            r.id = entry.id;
            r.name = entry.name;
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (entry.budget > 0.0 && r.seconds >= entry.budget) {
            r.pass = false;
            r.detail += " [over " + num(entry.budget) + "s budget]";
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace ftag

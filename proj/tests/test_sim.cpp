#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "ftag/random_instances.hpp"
#include "ftag/sim.hpp"
#include "ftag/strategies.hpp"

using namespace ftag;

namespace {

Instance fixture(const std::string& name) {
    std::ifstream in(std::string(FTAG_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_instance(ss.str());
}

// Fixed script issued at t=0, then silence. Useful for oracle traces.
class ScriptStrategy : public Strategy {
public:
    explicit ScriptStrategy(Plan plan) : plan_(std::move(plan)) {}
    Plan on_start(const StateView&) override { return plan_; }
    Plan on_release(const StateView&, int) override { return {}; }
    std::optional<Plan> on_wake(const StateView&, int) override { return std::nullopt; }

private:
    Plan plan_;
};

class NullStrategy : public Strategy {
public:
    Plan on_start(const StateView&) override { return {}; }
    Plan on_release(const StateView&, int) override { return {}; }
    std::optional<Plan> on_wake(const StateView&, int) override { return std::nullopt; }
};

Point vertex(const MetricSpace& m, const std::string& name) {
    return Point::at_vertex(*m.vertex_index(name));
}

int count_events(const Trace& t, EventKind kind) {
    int n = 0;
    for (const auto& ev : t.events) n += ev.kind == kind ? 1 : 0;
    return n;
}

}  // namespace

TEST_CASE("scripted starters meet the releases exactly on time") {
    Instance inst = fixture("sigma_a_m1.json");
    Plan plan;
    plan.robot_legs[0] = {Leg::go_to(vertex(*inst.metric, "p3"))};
    plan.robot_legs[1] = {Leg::go_to(vertex(*inst.metric, "p4"))};
    ScriptStrategy strategy(plan);
    Trace trace = simulate(inst, strategy);
    CHECK(trace.makespan == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(trace.wake_times.size() == 2);
    CHECK(count_events(trace, EventKind::release) == 2);
    CHECK(trace.complete);
}

TEST_CASE("no frozen robots, empty wake set") {
    Instance inst = fixture("sigma_a_m1.json");
    inst.robots.resize(2);
    NullStrategy strategy;
    Trace trace = simulate(inst, strategy);
    CHECK(trace.makespan == 0.0);
    CHECK(trace.wake_times.empty());
    CHECK(trace.end_time == 0.0);
}

TEST_CASE("a strategy that never moves exceeds the horizon") {
    Instance inst = fixture("sigma_a_m1.json");
    NullStrategy strategy;
    CHECK_THROWS_AS(simulate(inst, strategy), HorizonExceeded);
}

TEST_CASE("stop_at cuts a run cleanly without error") {
    Instance inst = fixture("sigma_a_m1.json");
    NullStrategy strategy;
    SimOptions so;
    so.stop_at = 1.5;
    Trace trace = simulate(inst, strategy, so);
    CHECK_FALSE(trace.complete);
    CHECK(trace.end_time == doctest::Approx(1.5));
    CHECK(count_events(trace, EventKind::release) == 2);
}

TEST_CASE("positions interpolate along the route") {
    Instance inst = fixture("sigma_a_m1.json");
    Plan plan;
    plan.robot_legs[0] = {Leg::go_to(vertex(*inst.metric, "p3"))};
    plan.robot_legs[1] = {Leg::go_to(vertex(*inst.metric, "p4"))};
    ScriptStrategy strategy(plan);
    Trace trace = simulate(inst, strategy);

    auto at0 = positions_at(trace, 0.0);
    for (const auto& [id, pos] : at0) CHECK(same_point(pos, trace.homes.at(id)));

    Point mid = position_at(trace, 0, 0.5);
    CHECK(distance(*inst.metric, mid, vertex(*inst.metric, "p0")) == doctest::Approx(0.5));
    CHECK(distance(*inst.metric, mid, vertex(*inst.metric, "p3")) == doctest::Approx(0.5));

    CHECK_THROWS_AS(position_at(trace, 0, trace.end_time + 1.0), TimeOutOfRange);
    CHECK_THROWS_AS(position_at(trace, 0, -0.5), TimeOutOfRange);
}

TEST_CASE("waits hold robots in place and contact wakes mid-edge") {
    GraphSpec g;
    g.vertices = {"a", "b", "c"};
    g.edges = {{"a", "b", 1.0}, {"b", "c", 1.0}, {"a", "c", 4.0}};
    auto metric = std::make_shared<const MetricSpace>(build_metric(g));

    Instance inst;
    inst.metric = metric;
    inst.robots = {{0, Point::at_vertex(0), 0.0, true}, {1, Point::at_vertex(2), 3.0, false}};

    // wait at home until 2, then head for c through b
    Plan plan;
    plan.robot_legs[0] = {Leg::wait_until(2.0), Leg::go_to(Point::at_vertex(2))};
    ScriptStrategy strategy(plan);
    Trace trace = simulate(inst, strategy);

    CHECK(same_point(position_at(trace, 0, 1.0), Point::at_vertex(0)));
    CHECK(distance(*metric, position_at(trace, 0, 3.0), Point::at_vertex(0)) ==
          doctest::Approx(1.0));
    // release at 3 while mid-route; arrival contact at 4 wakes the robot
    CHECK(trace.makespan == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("simultaneous events order releases before wakes before arrivals") {
    Instance inst = fixture("sigma_a_m1.json");
    Plan plan;
    plan.robot_legs[0] = {Leg::go_to(vertex(*inst.metric, "p3"))};
    plan.robot_legs[1] = {Leg::go_to(vertex(*inst.metric, "p4"))};
    ScriptStrategy strategy(plan);
    Trace trace = simulate(inst, strategy);

    std::vector<EventKind> kinds;
    std::vector<int> robots;
    for (const auto& ev : trace.events) {
        if (std::abs(ev.time - 1.0) > 1e-6) continue;
        kinds.push_back(ev.kind);
        robots.push_back(ev.robot);
    }
    REQUIRE(kinds.size() == 6);  // 2 releases, 2 wakes, 2 arrivals
    CHECK(kinds[0] == EventKind::release);
    CHECK(kinds[1] == EventKind::release);
    CHECK(robots[0] < robots[1]);
    CHECK(kinds[2] == EventKind::wake);
    CHECK(kinds[3] == EventKind::wake);
    CHECK(kinds[4] == EventKind::arrival);
    CHECK(kinds[5] == EventKind::arrival);
}

TEST_CASE("ratio guards its denominator") {
    Instance inst = fixture("sigma_a_m1.json");
    Plan plan;
    plan.robot_legs[0] = {Leg::go_to(vertex(*inst.metric, "p3"))};
    plan.robot_legs[1] = {Leg::go_to(vertex(*inst.metric, "p4"))};
    ScriptStrategy strategy(plan);
    Trace trace = simulate(inst, strategy);
    CHECK(ratio(trace, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ratio(trace, 0.5) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK_THROWS_AS(ratio(trace, 0.0), NonpositiveOpt);
    CHECK_THROWS_AS(ratio(trace, -1.0), NonpositiveOpt);
}

TEST_CASE("plans referencing frozen robots are rejected") {
    Instance inst = fixture("sigma_a_m1.json");
    Plan plan;
    plan.robot_legs[2] = {Leg::go_to(vertex(*inst.metric, "p0"))};  // still frozen
    ScriptStrategy strategy(plan);
    CHECK_THROWS_AS(simulate(inst, strategy), StrategyError);
}

TEST_CASE("decreasing wait times are rejected") {
    Instance inst = fixture("sigma_a_m1.json");
    Plan plan;
    plan.robot_legs[0] = {Leg::wait_until(2.0), Leg::wait_until(1.0)};
    ScriptStrategy strategy(plan);
    CHECK_THROWS_AS(simulate(inst, strategy), StrategyError);
}

TEST_CASE("runs are deterministic event for event") {
    for (int seed : {2, 9, 17}) {
        Instance inst = random_instance(seed);
        GreedyStrategy s1, s2;
        Trace a = simulate(inst, s1);
        Trace b = simulate(inst, s2);
        REQUIRE(a.events.size() == b.events.size());
        CHECK(a.makespan == b.makespan);
        for (size_t i = 0; i < a.events.size(); ++i) {
            CHECK(a.events[i].time == b.events[i].time);
            CHECK(a.events[i].kind == b.events[i].kind);
            CHECK(a.events[i].robot == b.events[i].robot);
        }
    }
}

TEST_CASE("speed limit and causality on random greedy runs") {
    for (int seed : {4, 21, 33, 48}) {
        Instance inst = random_instance(seed);
        GreedyStrategy strategy;
        Trace trace = simulate(inst, strategy);
        for (const auto& [id, wake] : trace.wake_times)
            CHECK(wake >= trace.releases.at(id) - 1e-12);
        double makespan = 0.0;
        for (const auto& [id, wake] : trace.wake_times) makespan = std::max(makespan, wake);
        CHECK(trace.makespan == doctest::Approx(makespan).epsilon(1e-12));
        for (double t = 0.0; t + 0.25 <= trace.end_time; t += 0.25) {
            auto now = positions_at(trace, t);
            auto later = positions_at(trace, t + 0.25);
            for (const auto& [id, pos] : now)
                CHECK(distance(*inst.metric, pos, later.at(id)) <= 0.25 + 1e-9);
        }
    }
}

TEST_CASE("trace CSV has the expected shape") {
    Instance inst = fixture("sigma_a_m1.json");
    Plan plan;
    plan.robot_legs[0] = {Leg::go_to(vertex(*inst.metric, "p3"))};
    plan.robot_legs[1] = {Leg::go_to(vertex(*inst.metric, "p4"))};
    ScriptStrategy strategy(plan);
    Trace trace = simulate(inst, strategy);

    std::string csv = trace_csv(trace);
    CHECK(csv.find("time,event,robot,location") == 0);
    CHECK(csv.find("release,2,p3") != std::string::npos);
    CHECK(csv.find("wake,3,p4") != std::string::npos);

    std::string positions = sampled_positions_csv(trace, 0.5);
    CHECK(positions.find("time,robot,location") == 0);
    CHECK(positions.find("0.500000000,0,") != std::string::npos);
}

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftag/instance.hpp"

namespace ftag {

// One motion instruction for a robot: move to a point at unit speed, or
// stand still until an absolute time.
struct Leg {
    enum class Kind { go_to, wait_until };
    Kind kind = Kind::go_to;
    Point target;
    double until = 0.0;

    static Leg go_to(const Point& p) { return Leg{Kind::go_to, p, 0.0}; }
    static Leg wait_until(double t) { return Leg{Kind::wait_until, Point{}, t}; }
};

using LegList = std::vector<Leg>;

// Per-robot leg lists returned by strategy callbacks. Robots present in the
// map have their remaining legs replaced (an empty list halts the robot in
// place); absent robots continue whatever they were doing.
struct Plan {
    std::map<int, LegList> robot_legs;
    bool empty() const { return robot_legs.empty(); }
};

enum class RobotStatus { frozen_unreleased, frozen_released, active };

// What a strategy is allowed to see: only robots that have been released
// (or started active), with their current positions.
struct RobotView {
    int id = 0;
    Point home;
    double release = 0.0;
    bool initially_active = false;
    RobotStatus status = RobotStatus::frozen_released;
    Point position;
};

struct StateView {
    double now = 0.0;
    std::shared_ptr<const MetricSpace> metric;
    std::vector<RobotView> robots;  // released robots only, ascending id

    const RobotView* find(int id) const;
};

// An online algorithm. Callbacks fire at the start of the run, whenever a
// frozen robot is released, and whenever a robot wakes; each may overwrite
// any part of the current plan. One strategy object serves one run.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual Plan on_start(const StateView& view) = 0;
    virtual Plan on_release(const StateView& view, int robot) = 0;
    virtual std::optional<Plan> on_wake(const StateView& view, int robot) = 0;
};

struct SimOptions {
    double max_time = 100.0;           // hard horizon; HorizonExceeded if work remains
    double contact_tol = 1e-9;         // wake distance
    std::optional<double> stop_at;     // clean early cutoff (no error)
};

enum class EventKind { release, wake, arrival, replan };

struct TraceEvent {
    double time = 0.0;
    EventKind kind = EventKind::release;
    int robot = -1;  // -1 for the initial replan
    Point where;
};

// A contiguous stretch of motion along one plan. Positions between spans
// are constant.
struct MotionSpan {
    double t0 = 0.0;
    double t1 = 0.0;
    PathPlan plan;
};

// Everything observable about one run: the time-ordered event log plus
// enough motion data to reconstruct any robot's position at any time.
struct Trace {
    std::shared_ptr<const MetricSpace> metric;
    std::vector<TraceEvent> events;
    std::map<int, Point> homes;
    std::map<int, std::vector<MotionSpan>> motion;
    std::map<int, double> wake_times;  // frozen robots that woke
    std::map<int, double> releases;    // frozen robots only
    std::map<int, bool> initially_active;
    double makespan = 0.0;  // last wake time, 0 if none
    double end_time = 0.0;
    bool complete = true;  // false when stop_at cut the run short
};

// Runs the instance under the strategy: releases fire at their times, an
// active robot passing within contact_tol of a released frozen robot wakes
// it at the exact crossing time, simultaneous events process as releases,
// then wakes, then arrivals (lower robot id first). Ends when all released
// robots are awake and every leg list is exhausted.
// Throws HorizonExceeded, StrategyError.
Trace simulate(const Instance& inst, Strategy& strategy, const SimOptions& opts = {});

// Exact interpolated positions of every robot at time t in [0, end_time].
std::map<int, Point> positions_at(const Trace& trace, double t);
Point position_at(const Trace& trace, int robot, double t);

// Whether the robot is awake at time t (initially active or woken by then).
bool active_at(const Trace& trace, int robot, double t);

// trace.makespan / opt. Throws NonpositiveOpt.
double ratio(const Trace& trace, double opt);

// CSV export: time,event,robot,location rows.
std::string trace_csv(const Trace& trace);
// CSV export: positions of every robot sampled each dt.
std::string sampled_positions_csv(const Trace& trace, double dt);

// "p3", "edge#4@0.500000000", used by both CSV writers.
std::string point_label(const MetricSpace& m, const Point& p);

}  // namespace ftag

#include "ftag/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ftag {

const RobotView* StateView::find(int id) const {
    for (const auto& r : robots)
        if (r.id == id) return &r;
    return nullptr;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fixed9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", x);
    return buf;
}

struct Rt {
    const RobotSpec* spec = nullptr;
    RobotStatus status = RobotStatus::frozen_unreleased;
    Point home;
    Point pos;        // position when not moving
    LegList legs;     // pending legs, front is current once materialized
    bool has_current = false;
    bool moving = false;
    PathPlan path;       // current go_to route
    double path_t0 = 0;  // absolute start of current route
    double leg_end = 0;  // absolute completion of current leg
};

class Engine {
public:
    Engine(const Instance& inst, Strategy& strategy, const SimOptions& opts)
        : inst_(inst), strat_(strategy), opts_(opts), m_(*inst.metric) {}

    Trace run() {
        validate(inst_);
        init();

        Plan start = strat_.on_start(make_view());
        apply_plan(start, -1);
        process_instant(0.0);

        const double horizon = std::min(opts_.max_time, opts_.stop_at.value_or(kInf));
        const bool stop_cut = opts_.stop_at.has_value() && *opts_.stop_at < opts_.max_time;
        bool quiescent = false;
        while (true) {
            double tn = next_event_time();
            if (tn == kInf) {
                quiescent = true;
                break;
            }
            if (tn > horizon) {
                now_ = horizon;
                break;
            }
            now_ = tn;
            process_instant(now_);
        }

        if (unwoken_released_count() > 0) {
            // a stop_at cutoff is an observation window, not a failure
            if (!stop_cut)
                throw HorizonExceeded(quiescent
                                          ? "released robots remain frozen and no further "
                                            "events exist"
                                          : "released robots remain frozen at the time horizon " +
                                                std::to_string(opts_.max_time));
            now_ = horizon;  // the stalled world stays observable through the window
            quiescent = false;
        } else if (quiescent && stop_cut) {
            now_ = std::max(now_, horizon);
        }

        trace_.end_time = now_;
        trace_.complete = quiescent;
        for (auto& [id, rt] : robots_) {
            (void)id;
            if (rt.moving) close_span(rt, now_);
        }
        double makespan = 0.0;
        for (const auto& [id, t] : trace_.wake_times) {
            (void)id;
            makespan = std::max(makespan, t);
        }
        trace_.makespan = makespan;
        return std::move(trace_);
    }

private:
    void init() {
        trace_.metric = inst_.metric;
        for (const auto& spec : inst_.robots) {
            Rt rt;
            rt.spec = &spec;
            rt.home = m_.normalized(spec.home);
            rt.pos = rt.home;
            rt.status = spec.initially_active ? RobotStatus::active
                                              : RobotStatus::frozen_unreleased;
            robots_.emplace(spec.id, rt);
            trace_.homes[spec.id] = rt.pos;
            trace_.initially_active[spec.id] = spec.initially_active;
            if (!spec.initially_active) {
                trace_.releases[spec.id] = spec.release;
                pending_releases_.push_back(spec.id);
            }
        }
        std::sort(pending_releases_.begin(), pending_releases_.end(), [this](int a, int b) {
            double ra = robots_.at(a).spec->release, rb = robots_.at(b).spec->release;
            return ra != rb ? ra < rb : a < b;
        });
    }

    Point current_position(const Rt& rt) const {
        if (!rt.moving) return rt.pos;
        return position_along(rt.path, now_ - rt.path_t0);
    }

    StateView make_view() {
        StateView view;
        view.now = now_;
        view.metric = inst_.metric;
        for (const auto& [id, rt] : robots_) {
            if (rt.status == RobotStatus::frozen_unreleased) continue;
            view.robots.push_back({id, rt.home, rt.spec->release, rt.spec->initially_active,
                                   rt.status, current_position(rt)});
        }
        return view;
    }

    void log(EventKind kind, int robot, const Point& where) {
        trace_.events.push_back({now_, kind, robot, where});
    }

    void open_span(Rt& rt) {
        trace_.motion[rt.spec->id].push_back({rt.path_t0, rt.path_t0, rt.path});
    }

    void close_span(Rt& rt, double t) {
        auto& spans = trace_.motion[rt.spec->id];
        spans.back().t1 = t;
        rt.moving = false;
    }

    // Materializes legs until one is actually in progress. Zero-length
    // go_to legs complete silently.
    void start_legs(Rt& rt) {
        rt.has_current = false;
        while (!rt.legs.empty()) {
            Leg& leg = rt.legs.front();
            if (leg.kind == Leg::Kind::wait_until) {
                rt.leg_end = std::max(now_, leg.until);
                rt.has_current = true;
                return;
            }
            PathPlan plan;
            try {
                plan = shortest_path(m_, rt.pos, leg.target);
            } catch (const Error& e) {
                throw StrategyError(std::string("invalid go_to target: ") + e.what());
            }
            if (plan.total_length <= 0.0) {
                rt.legs.erase(rt.legs.begin());
                continue;
            }
            rt.path = std::move(plan);
            rt.path_t0 = now_;
            rt.leg_end = now_ + rt.path.total_length;
            rt.moving = true;
            rt.has_current = true;
            open_span(rt);
            return;
        }
    }

    void halt(Rt& rt) {
        if (rt.moving) {
            rt.pos = current_position(rt);
            close_span(rt, now_);
        }
        rt.legs.clear();
        rt.has_current = false;
    }

    void apply_plan(const Plan& plan, int trigger) {
        if (plan.empty()) return;
        for (const auto& [id, legs] : plan.robot_legs) {
            auto it = robots_.find(id);
            if (it == robots_.end())
                throw StrategyError("plan references unknown robot " + std::to_string(id));
            if (it->second.status != RobotStatus::active)
                throw StrategyError("plan references robot " + std::to_string(id) +
                                    " which is not active");
            double prev_wait = -kInf;
            for (const Leg& leg : legs) {
                if (leg.kind == Leg::Kind::wait_until) {
                    if (leg.until < prev_wait)
                        throw StrategyError("wait_until times decrease for robot " +
                                            std::to_string(id));
                    prev_wait = leg.until;
                }
            }
        }
        for (const auto& [id, legs] : plan.robot_legs) {
            Rt& rt = robots_.at(id);
            halt(rt);
            rt.legs = legs;
            start_legs(rt);
        }
        Point where;
        if (trigger >= 0) where = current_position(robots_.at(trigger));
        log(EventKind::replan, trigger, where);
    }

    // earliest time >= now at which some active robot touches f's home
    double contact_time(const Rt& f) const {
        double best = kInf;
        for (const auto& [id, rt] : robots_) {
            (void)id;
            if (rt.status != RobotStatus::active) continue;
            if (rt.moving) {
                auto t = crossing_time(m_, rt.path, rt.path_t0, f.pos, opts_.contact_tol, now_);
                if (t) best = std::min(best, std::max(*t, now_));
            } else if (distance(m_, rt.pos, f.pos) <= opts_.contact_tol) {
                best = std::min(best, now_);
            }
        }
        return best;
    }

    int unwoken_released_count() const {
        int n = 0;
        for (const auto& [id, rt] : robots_) {
            (void)id;
            n += rt.status == RobotStatus::frozen_released ? 1 : 0;
        }
        return n;
    }

    double next_event_time() const {
        double tn = kInf;
        if (release_cursor_ < pending_releases_.size())
            tn = std::min(tn, robots_.at(pending_releases_[release_cursor_]).spec->release);
        for (const auto& [id, rt] : robots_) {
            (void)id;
            if (rt.has_current) tn = std::min(tn, rt.leg_end);
            if (rt.status == RobotStatus::frozen_released) tn = std::min(tn, contact_time(rt));
        }
        return tn;
    }

    void process_instant(double t) {
        while (true) {
            // releases first
            std::vector<int> batch;
            while (release_cursor_ < pending_releases_.size()) {
                int id = pending_releases_[release_cursor_];
                if (robots_.at(id).spec->release > t) break;
                batch.push_back(id);
                ++release_cursor_;
            }
            if (!batch.empty()) {
                for (int id : batch) {
                    Rt& rt = robots_.at(id);
                    rt.status = RobotStatus::frozen_released;
                    log(EventKind::release, id, rt.pos);
                }
                for (int id : batch) apply_plan(strat_.on_release(make_view(), id), id);
                continue;
            }

            // then contact wakes
            std::vector<int> woken;
            for (const auto& [id, rt] : robots_)
                if (rt.status == RobotStatus::frozen_released && contact_time(rt) <= t)
                    woken.push_back(id);
            if (!woken.empty()) {
                for (int id : woken) {
                    Rt& rt = robots_.at(id);
                    rt.status = RobotStatus::active;
                    trace_.wake_times[id] = t;
                    log(EventKind::wake, id, rt.pos);
                    auto plan = strat_.on_wake(make_view(), id);
                    if (plan) apply_plan(*plan, id);
                }
                continue;
            }

            // then leg completions
            bool completed = false;
            for (auto& [id, rt] : robots_) {
                if (!rt.has_current || rt.leg_end > t) continue;
                completed = true;
                if (rt.moving) {
                    rt.pos = rt.path.last();
                    close_span(rt, rt.leg_end);
                    log(EventKind::arrival, id, rt.pos);
                }
                rt.legs.erase(rt.legs.begin());
                rt.has_current = false;
                start_legs(rt);
            }
            if (!completed) break;
        }
    }

    const Instance& inst_;
    Strategy& strat_;
    SimOptions opts_;
    const MetricSpace& m_;
    std::map<int, Rt> robots_;
    std::vector<int> pending_releases_;
    size_t release_cursor_ = 0;
    double now_ = 0.0;
    Trace trace_;
};

}  // namespace

Trace simulate(const Instance& inst, Strategy& strategy, const SimOptions& opts) {
    return Engine(inst, strategy, opts).run();
}

Point position_at(const Trace& trace, int robot, double t) {
    if (t < -1e-12 || t > trace.end_time + 1e-12)
        throw TimeOutOfRange("time " + std::to_string(t) + " outside [0, " +
                             std::to_string(trace.end_time) + "]");
    auto hm = trace.homes.find(robot);
    if (hm == trace.homes.end())
        throw TimeOutOfRange("unknown robot " + std::to_string(robot));
    Point pos = hm->second;
    auto ms = trace.motion.find(robot);
    if (ms == trace.motion.end()) return pos;
    for (const MotionSpan& span : ms->second) {
        if (t < span.t0) break;
        double elapsed = std::min(t, span.t1) - span.t0;
        pos = position_along(span.plan, elapsed);
    }
    return pos;
}

std::map<int, Point> positions_at(const Trace& trace, double t) {
    std::map<int, Point> out;
    for (const auto& [id, home] : trace.homes) {
        (void)home;
        out[id] = position_at(trace, id, t);
    }
    return out;
}

bool active_at(const Trace& trace, int robot, double t) {
    if (trace.initially_active.at(robot)) return true;
    auto it = trace.wake_times.find(robot);
    return it != trace.wake_times.end() && it->second <= t;
}

double ratio(const Trace& trace, double opt) {
    if (!(opt > 0.0)) throw NonpositiveOpt("opt must be positive, got " + std::to_string(opt));
    return trace.makespan / opt;
}

std::string point_label(const MetricSpace& m, const Point& p_in) {
    Point p = m.normalized(p_in);
    if (p.is_vertex()) return m.vertex_name(p.vertex_id);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "edge#%d@%.9f", p.edge_id, p.offset);
    return buf;
}

namespace {

const char* kind_name(EventKind k) {
    switch (k) {
        case EventKind::release: return "release";
        case EventKind::wake: return "wake";
        case EventKind::arrival: return "arrival";
        case EventKind::replan: return "replan";
    }
    return "?";
}

}  // namespace

std::string trace_csv(const Trace& trace) {
    std::string out = "time,event,robot,location\n";
    for (const auto& ev : trace.events) {
        out += fixed9(ev.time);
        out += ',';
        out += kind_name(ev.kind);
        out += ',';
        out += ev.robot >= 0 ? std::to_string(ev.robot) : std::string("-");
        out += ',';
        out += ev.robot >= 0 ? point_label(*trace.metric, ev.where) : std::string("-");
        out += '\n';
    }
    return out;
}

std::string sampled_positions_csv(const Trace& trace, double dt) {
    std::string out = "time,robot,location\n";
    for (double t = 0.0; t <= trace.end_time + 1e-12; t += dt) {
        double tc = std::min(t, trace.end_time);
        for (const auto& [id, pos] : positions_at(trace, tc)) {
            out += fixed9(tc);
            out += ',';
            out += std::to_string(id);
            out += ',';
            out += point_label(*trace.metric, pos);
            out += '\n';
        }
    }
    return out;
}

}  // namespace ftag

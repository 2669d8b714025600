#include "ftag/strategies.hpp"

#include <algorithm>
#include <cmath>

namespace ftag {

PatienceStrategy::PatienceStrategy(PatienceConfig cfg) : cfg_(cfg) {
    if (cfg_.wait_factor < 1.0)
        throw StrategyError("wait factor " + std::to_string(cfg_.wait_factor) +
                            " would replay before the optimum can be ready");
}

Plan PatienceStrategy::on_start(const StateView&) { return {}; }

// Recomputes the offline schedule for the currently released set. Released
// robots arriving in the same instant share one solve.
void PatienceStrategy::resolve(const StateView& view) {
    std::vector<int> ids;
    for (const auto& r : view.robots) ids.push_back(r.id);
    if (ids == solved_ids_) return;

    Instance truncated;
    truncated.metric = view.metric;
    for (const auto& r : view.robots)
        truncated.robots.push_back({r.id, r.home, r.release, r.initially_active});
    std::sort(truncated.robots.begin(), truncated.robots.end(),
              [](const RobotSpec& a, const RobotSpec& b) {
                  if (a.initially_active != b.initially_active) return a.initially_active;
                  if (a.release != b.release) return a.release < b.release;
                  return a.id < b.id;
              });

    try {
        solution_ = cfg_.backend == OptBackend::exact
                        ? opt_exact(truncated, {cfg_.frozen_cap})
                        : greedy_upper_bound(truncated);
    } catch (const Error& e) {
        throw OptBackendFailure(e.what());
    }
    solved_ids_ = ids;
    last_opt_ = solution_.makespan;
    delta_ = cfg_.wait_factor * solution_.makespan;
}

// The full plan for one robot under the current replay: go home, wait for
// the shifted wake moment, visit the assigned targets on the shifted
// schedule, then go home again.
LegList PatienceStrategy::legs_for(const StateView& view, const RobotView& rv) const {
    double own_wake = 0.0;
    if (auto it = solution_.wake_time.find(rv.id); it != solution_.wake_time.end())
        own_wake = it->second;

    LegList legs;
    if (rv.status == RobotStatus::active &&
        distance(*view.metric, rv.position, rv.home) > 1e-12)
        legs.push_back(Leg::go_to(rv.home));
    legs.push_back(Leg::wait_until(delta_ + own_wake));

    auto seq = solution_.waker_seq.find(rv.id);
    if (seq != solution_.waker_seq.end() && !seq->second.empty()) {
        for (int target : seq->second) {
            const RobotView* tv = view.find(target);
            legs.push_back(Leg::go_to(tv->home));
            legs.push_back(Leg::wait_until(delta_ + solution_.wake_time.at(target)));
        }
        legs.push_back(Leg::go_to(rv.home));
    }
    return legs;
}

Plan PatienceStrategy::on_release(const StateView& view, int) {
    resolve(view);

    Plan plan;
    stored_.clear();
    for (const auto& rv : view.robots) {
        LegList legs = legs_for(view, rv);
        if (rv.status == RobotStatus::active) {
            // step 1 must finish before the replay departs
            if (view.now + distance(*view.metric, rv.position, rv.home) > delta_ + 1e-9)
                late_ = true;
            plan.robot_legs[rv.id] = std::move(legs);
        } else {
            stored_[rv.id] = std::move(legs);
        }
    }
    return plan;
}

std::optional<Plan> PatienceStrategy::on_wake(const StateView&, int robot) {
    auto it = stored_.find(robot);
    if (it == stored_.end()) return std::nullopt;
    Plan plan;
    plan.robot_legs[robot] = std::move(it->second);
    stored_.erase(it);
    return plan;
}

Plan GreedyStrategy::on_start(const StateView& view) { return dispatch(view); }
Plan GreedyStrategy::on_release(const StateView& view, int) { return dispatch(view); }
std::optional<Plan> GreedyStrategy::on_wake(const StateView& view, int) {
    Plan p = dispatch(view);
    if (p.empty()) return std::nullopt;
    return p;
}

Plan GreedyStrategy::dispatch(const StateView& view) {
    Plan plan;

    // drop assignments whose target woke; the chaser halts unless reassigned
    for (auto it = assignment_.begin(); it != assignment_.end();) {
        const RobotView* target = view.find(it->second);
        if (!target || target->status == RobotStatus::active) {
            plan.robot_legs[it->first] = {};
            it = assignment_.erase(it);
        } else {
            ++it;
        }
    }

    std::vector<int> taken;
    for (const auto& [robot, target] : assignment_) {
        (void)robot;
        taken.push_back(target);
    }

    // repeatedly match the globally closest idle robot / open request pair,
    // so the nearer of two idle robots wins a contested target
    while (true) {
        const RobotView* chaser = nullptr;
        const RobotView* target = nullptr;
        double best_d = 0.0;
        for (const auto& rv : view.robots) {
            if (rv.status != RobotStatus::active || assignment_.count(rv.id)) continue;
            for (const auto& fv : view.robots) {
                if (fv.status != RobotStatus::frozen_released) continue;
                if (std::find(taken.begin(), taken.end(), fv.id) != taken.end()) continue;
                double d = distance(*view.metric, rv.position, fv.home);
                if (!chaser || d < best_d) {
                    chaser = &rv;
                    target = &fv;
                    best_d = d;
                }
            }
        }
        if (!chaser) break;
        assignment_[chaser->id] = target->id;
        taken.push_back(target->id);
        plan.robot_legs[chaser->id] = {Leg::go_to(target->home)};
    }
    return plan;
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, const PatienceConfig& cfg) {
    if (name == "patience") return std::make_unique<PatienceStrategy>(cfg);
    if (name == "greedy") return std::make_unique<GreedyStrategy>();
    throw StrategyError("unknown strategy '" + name + "'");
}

StrategyFactory make_strategy_factory(const std::string& name, const PatienceConfig& cfg) {
    (void)make_strategy(name, cfg);  // fail fast on unknown names
    return [name, cfg] { return make_strategy(name, cfg); };
}

}  // namespace ftag

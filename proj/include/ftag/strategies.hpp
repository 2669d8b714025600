#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ftag/sim.hpp"
#include "ftag/solver.hpp"

namespace ftag {

enum class OptBackend { exact, greedy_upper_bound };

struct PatienceConfig {
    double wait_factor = 1.4142135623730951;  // sqrt(2)
    OptBackend backend = OptBackend::exact;
    int frozen_cap = 12;  // forwarded to the exact backend
};

// The patience strategy: on every release, recompute the optimal offline
// schedule for the robots revealed so far, send everyone home, wait until
// wait_factor times that optimum, replay the schedule shifted by that
// amount, then return home and wait. Robots woken mid-plan by incidental
// contact keep their role in the pending replay.
class PatienceStrategy : public Strategy {
public:
    explicit PatienceStrategy(PatienceConfig cfg = {});

    Plan on_start(const StateView& view) override;
    Plan on_release(const StateView& view, int robot) override;
    std::optional<Plan> on_wake(const StateView& view, int robot) override;

    // True if some robot could not be back home by the wait deadline at
    // some release. Never happens with the default wait factor.
    bool step1_late() const { return late_; }
    double last_opt() const { return last_opt_; }

private:
    void resolve(const StateView& view);
    LegList legs_for(const StateView& view, const RobotView& rv) const;

    PatienceConfig cfg_;
    std::vector<int> solved_ids_;  // released set of the cached solve
    OfflineSolution solution_;
    double delta_ = 0.0;  // replay start offset
    double last_opt_ = 0.0;
    std::map<int, LegList> stored_;  // replay legs for still-frozen robots
    bool late_ = false;
};

// Baseline: every idle active robot chases the nearest unassigned released
// frozen robot (ties to the lower id); unassigned robots idle in place.
class GreedyStrategy : public Strategy {
public:
    Plan on_start(const StateView& view) override;
    Plan on_release(const StateView& view, int robot) override;
    std::optional<Plan> on_wake(const StateView& view, int robot) override;

private:
    Plan dispatch(const StateView& view);

    std::map<int, int> assignment_;  // active robot -> frozen target
};

// Strategy factories by name ("patience", "greedy"); a factory builds a
// fresh strategy per simulation run.
using StrategyFactory = std::function<std::unique_ptr<Strategy>()>;
std::unique_ptr<Strategy> make_strategy(const std::string& name, const PatienceConfig& cfg = {});
StrategyFactory make_strategy_factory(const std::string& name, const PatienceConfig& cfg = {});

}  // namespace ftag

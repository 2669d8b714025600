#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftag/instance.hpp"

namespace ftag {

// A complete offline schedule in sequence form: each robot personally
// wakes the listed frozen robots in order, travelling directly between
// their homes and waiting at a target until its release. Wake times chain
// as wake(child) = max(release(child), wake(waker's previous stop) +
// travel), so the waker relation is a forest rooted at the initially
// active robots.
struct OfflineSolution {
    std::map<int, std::vector<int>> waker_seq;  // robot id -> frozen ids it wakes
    std::map<int, double> wake_time;            // frozen robot id -> wake time
    double makespan = 0.0;
};

struct SolverOptions {
    int frozen_cap = 12;  // opt_exact refuses larger inputs
};

// Exact minimum makespan by depth-first branch and bound: branch on the
// chronologically next wake assignment, prune on a release/dispatch lower
// bound, seed the incumbent with greedy_upper_bound. Throws TooLarge when
// the frozen count exceeds the cap, InvalidInstance subclasses otherwise.
OfflineSolution opt_exact(const Instance& inst, const SolverOptions& opts = {});

// Exhaustive reference: enumerates every assignment of the frozen robots
// into ordered waker sequences and keeps the best. Only usable as a
// correctness oracle; capped at 7 frozen robots.
OfflineSolution opt_bruteforce(const Instance& inst);

// Feasible schedule by repeatedly dispatching the earliest-free active
// robot to the nearest unassigned frozen robot. Upper-bounds opt_exact.
OfflineSolution greedy_upper_bound(const Instance& inst);

// Recomputes every wake time from waker_seq alone and returns the
// makespan; throws InconsistentSolution on cycles, orphans, duplicates, or
// when the recomputation disagrees with the solution's stored times.
double evaluate(const OfflineSolution& sol, const Instance& inst);

nlohmann::json solution_to_json(const OfflineSolution& sol);

}  // namespace ftag

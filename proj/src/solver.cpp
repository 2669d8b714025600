#include "ftag/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ftag {

namespace {

constexpr double kTieTol = 1e-9;    // chronological-branching slack
constexpr double kPruneTol = 1e-12;
constexpr double kSameTol = 1e-12;  // identical-state detection

// Index-based view of an instance used by all solver routines: robots are
// addressed by their position in inst.robots, with a precomputed
// home-to-home distance matrix.
struct Board {
    const Instance* inst = nullptr;
    int n = 0;
    std::vector<int> actives;  // indices of initially active robots
    std::vector<int> frozen;   // indices of frozen robots
    std::vector<double> release;
    std::vector<std::vector<double>> dist;  // home-to-home
    std::vector<int> loc_class;             // coincident-home equivalence class

    int frozen_slot(int robot_index) const {
        for (size_t s = 0; s < frozen.size(); ++s)
            if (frozen[s] == robot_index) return static_cast<int>(s);
        return -1;
    }
};

Board make_board(const Instance& inst) {
    Board b;
    b.inst = &inst;
    b.n = static_cast<int>(inst.robots.size());
    b.release.resize(b.n);
    for (int i = 0; i < b.n; ++i) {
        b.release[i] = inst.robots[i].release;
        (inst.robots[i].initially_active ? b.actives : b.frozen).push_back(i);
    }
    b.dist.assign(b.n, std::vector<double>(b.n, 0.0));
    for (int i = 0; i < b.n; ++i)
        for (int j = i + 1; j < b.n; ++j)
            b.dist[i][j] = b.dist[j][i] =
                distance(*inst.metric, inst.robots[i].home, inst.robots[j].home);
    b.loc_class.resize(b.n);
    for (int i = 0; i < b.n; ++i) {
        b.loc_class[i] = i;
        for (int j = 0; j < i; ++j)
            if (b.dist[i][j] <= kSameTol) {
                b.loc_class[i] = b.loc_class[j];
                break;
            }
    }
    return b;
}

// Plays out per-robot wake sequences (robot index -> frozen robot indices)
// and fills wake times. Returns false if the sequences do not reach every
// frozen robot (cycle or orphan).
bool chain_eval(const Board& b, const std::vector<std::vector<int>>& seqs,
                std::vector<double>& wake, double& makespan) {
    wake.assign(b.n, -1.0);
    std::vector<int> stack;
    for (int a : b.actives) {
        wake[a] = 0.0;
        stack.push_back(a);
    }
    makespan = 0.0;
    int woken = 0;
    while (!stack.empty()) {
        int r = stack.back();
        stack.pop_back();
        double t = wake[r];
        int pos = r;
        for (int f : seqs[r]) {
            t = std::max(t + b.dist[pos][f], b.release[f]);
            wake[f] = t;
            makespan = std::max(makespan, t);
            pos = f;
            stack.push_back(f);
            ++woken;
        }
    }
    return woken == static_cast<int>(b.frozen.size());
}

OfflineSolution pack_solution(const Board& b, const std::vector<std::vector<int>>& seqs,
                              const std::vector<double>& wake, double makespan) {
    OfflineSolution sol;
    sol.makespan = makespan;
    for (int i = 0; i < b.n; ++i)
        if (!seqs[i].empty()) {
            auto& out = sol.waker_seq[b.inst->robots[i].id];
            for (int f : seqs[i]) out.push_back(b.inst->robots[f].id);
        }
    for (int f : b.frozen) sol.wake_time[b.inst->robots[f].id] = wake[f];
    return sol;
}

}  // namespace

OfflineSolution greedy_upper_bound(const Instance& inst) {
    validate(inst);
    Board b = make_board(inst);

    struct Act {
        int robot;
        int pos;
        double free;
    };
    std::vector<Act> acts;
    for (int a : b.actives) acts.push_back({a, a, 0.0});
    std::vector<int> unassigned = b.frozen;
    std::vector<std::vector<int>> seqs(b.n);

    while (!unassigned.empty()) {
        int ai = 0;
        for (int i = 1; i < static_cast<int>(acts.size()); ++i) {
            if (acts[i].free < acts[ai].free ||
                (acts[i].free == acts[ai].free &&
                 inst.robots[acts[i].robot].id < inst.robots[acts[ai].robot].id))
                ai = i;
        }
        Act& a = acts[ai];
        size_t fi = 0;
        for (size_t i = 1; i < unassigned.size(); ++i) {
            double di = b.dist[a.pos][unassigned[i]];
            double dbest = b.dist[a.pos][unassigned[fi]];
            if (di < dbest || (di == dbest && inst.robots[unassigned[i]].id <
                                                  inst.robots[unassigned[fi]].id))
                fi = i;
        }
        int f = unassigned[fi];
        unassigned.erase(unassigned.begin() + fi);
        double w = std::max(a.free + b.dist[a.pos][f], b.release[f]);
        seqs[a.robot].push_back(f);
        a.pos = f;
        a.free = w;
        acts.push_back({f, f, w});
    }

    std::vector<double> wake;
    double makespan = 0.0;
    chain_eval(b, seqs, wake, makespan);
    return pack_solution(b, seqs, wake, makespan);
}

namespace {

struct BnB {
    const Board& b;
    double best;
    std::vector<std::vector<int>> best_seqs;
    std::vector<double> best_wake;

    std::vector<std::vector<int>> seqs;
    std::vector<double> wake;

    struct Act {
        int robot;
        int pos;
        double free;
    };
    std::vector<Act> acts;
    unsigned unwoken;  // bitmask over frozen slots

    explicit BnB(const Board& board) : b(board) {
        seqs.assign(b.n, {});
        wake.assign(b.n, -1.0);
    }

    double lower_bound(double cur_max) const {
        double lb = cur_max;
        for (size_t s = 0; s < b.frozen.size(); ++s) {
            if (!(unwoken & (1u << s))) continue;
            int f = b.frozen[s];
            double dispatch = std::numeric_limits<double>::infinity();
            for (const Act& a : acts)
                dispatch = std::min(dispatch, a.free + b.dist[a.pos][f]);
            lb = std::max(lb, std::max(b.release[f], dispatch));
        }
        return lb;
    }

    void dfs(double last, double cur_max) {
        if (unwoken == 0) {
            if (cur_max < best - kPruneTol) {
                best = cur_max;
                best_seqs = seqs;
                best_wake = wake;
            }
            return;
        }
        if (lower_bound(cur_max) >= best - kPruneTol) return;

        struct Cand {
            double w;
            int fid;
            int slot;  // frozen slot
            int ai;    // active index
        };
        std::vector<Cand> cands;
        for (size_t s = 0; s < b.frozen.size(); ++s) {
            if (!(unwoken & (1u << s))) continue;
            int f = b.frozen[s];
            for (int ai = 0; ai < static_cast<int>(acts.size()); ++ai) {
                // symmetry: identical active states are interchangeable,
                // branch only through the first one
                bool dup = false;
                for (int aj = 0; aj < ai && !dup; ++aj)
                    dup = b.loc_class[acts[aj].pos] == b.loc_class[acts[ai].pos] &&
                          std::abs(acts[aj].free - acts[ai].free) <= kSameTol;
                if (dup) continue;
                double w = std::max(acts[ai].free + b.dist[acts[ai].pos][f], b.release[f]);
                if (w < last - kTieTol) continue;  // keep wake events chronological
                cands.push_back({w, b.inst->robots[f].id, static_cast<int>(s), ai});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
            if (x.w != y.w) return x.w < y.w;
            if (x.fid != y.fid) return x.fid < y.fid;
            return x.ai < y.ai;
        });

        for (const Cand& c : cands) {
            if (std::max(cur_max, c.w) >= best - kPruneTol) continue;
            int f = b.frozen[c.slot];
            Act saved = acts[c.ai];
            acts[c.ai].pos = f;
            acts[c.ai].free = c.w;
            acts.push_back({f, f, c.w});
            seqs[saved.robot].push_back(f);
            wake[f] = c.w;
            unwoken &= ~(1u << c.slot);

            dfs(c.w, std::max(cur_max, c.w));

            unwoken |= 1u << c.slot;
            wake[f] = -1.0;
            seqs[saved.robot].pop_back();
            acts.pop_back();
            acts[c.ai] = saved;
        }
    }
};

}  // namespace

OfflineSolution opt_exact(const Instance& inst, const SolverOptions& opts) {
    validate(inst);
    if (inst.frozen_count() > opts.frozen_cap)
        throw TooLarge("instance has " + std::to_string(inst.frozen_count()) +
                       " frozen robots, cap is " + std::to_string(opts.frozen_cap));
    Board b = make_board(inst);
    if (b.frozen.empty()) return pack_solution(b, std::vector<std::vector<int>>(b.n), {}, 0.0);

    OfflineSolution seed = greedy_upper_bound(inst);

    BnB search(b);
    search.best = seed.makespan;
    for (int a : b.actives) search.acts.push_back({a, a, 0.0});
    search.unwoken = (1u << b.frozen.size()) - 1u;
    search.dfs(0.0, 0.0);

    if (search.best_seqs.empty()) return seed;  // greedy was already optimal
    return pack_solution(b, search.best_seqs, search.best_wake, search.best);
}

namespace {

struct BruteForce {
    const Board& b;
    std::vector<std::vector<int>> seqs;  // per robot index
    std::vector<int> parent;             // frozen slot -> host robot index
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<int>> best_seqs;
    std::vector<double> best_wake;
    std::vector<double> wake_buf;

    explicit BruteForce(const Board& board) : b(board) {
        seqs.assign(b.n, {});
        parent.assign(b.frozen.size(), -1);
    }

    bool creates_cycle(int host, int placed) const {
        for (int cur = host; cur != placed;) {
            int slot = b.frozen_slot(cur);
            if (slot < 0) return false;  // reached an initially active root
            cur = parent[slot];
            if (cur < 0) return false;  // host chain not placed yet
        }
        return true;
    }

    void enumerate(size_t slot) {
        if (slot == b.frozen.size()) {
            double makespan = 0.0;
            if (!chain_eval(b, seqs, wake_buf, makespan)) return;
            if (makespan < best) {
                best = makespan;
                best_seqs = seqs;
                best_wake = wake_buf;
            }
            return;
        }
        int f = b.frozen[slot];
        for (int host = 0; host < b.n; ++host) {
            if (host == f) continue;
            if (creates_cycle(host, f)) continue;
            parent[slot] = host;
            auto& list = seqs[host];
            for (size_t pos = 0; pos <= list.size(); ++pos) {
                list.insert(list.begin() + pos, f);
                enumerate(slot + 1);
                list.erase(list.begin() + pos);
            }
            parent[slot] = -1;
        }
    }
};

}  // namespace

OfflineSolution opt_bruteforce(const Instance& inst) {
    validate(inst);
    if (inst.frozen_count() > 7)
        throw TooLarge("brute force capped at 7 frozen robots, got " +
                       std::to_string(inst.frozen_count()));
    Board b = make_board(inst);
    if (b.frozen.empty()) return pack_solution(b, std::vector<std::vector<int>>(b.n), {}, 0.0);

    BruteForce bf(b);
    bf.enumerate(0);
    return pack_solution(b, bf.best_seqs, bf.best_wake, bf.best);
}

double evaluate(const OfflineSolution& sol, const Instance& inst) {
    validate(inst);
    Board b = make_board(inst);

    std::map<int, int> index_of;
    for (int i = 0; i < b.n; ++i) index_of[inst.robots[i].id] = i;

    std::vector<std::vector<int>> seqs(b.n);
    std::vector<int> seen(b.n, 0);
    for (const auto& [id, children] : sol.waker_seq) {
        auto it = index_of.find(id);
        if (it == index_of.end())
            throw InconsistentSolution("waker id " + std::to_string(id) + " not in instance");
        for (int cid : children) {
            auto ct = index_of.find(cid);
            if (ct == index_of.end())
                throw InconsistentSolution("woken id " + std::to_string(cid) +
                                           " not in instance");
            if (inst.robots[ct->second].initially_active)
                throw InconsistentSolution("robot " + std::to_string(cid) +
                                           " is initially active but listed as woken");
            if (seen[ct->second]++)
                throw InconsistentSolution("robot " + std::to_string(cid) + " woken twice");
            seqs[it->second].push_back(ct->second);
        }
    }

    std::vector<double> wake;
    double makespan = 0.0;
    if (!chain_eval(b, seqs, wake, makespan))
        throw InconsistentSolution("waker sequences contain a cycle or an orphaned robot");

    for (int f : b.frozen) {
        int id = inst.robots[f].id;
        auto it = sol.wake_time.find(id);
        if (it == sol.wake_time.end())
            throw InconsistentSolution("missing wake time for robot " + std::to_string(id));
        if (std::abs(it->second - wake[f]) > 1e-9)
            throw InconsistentSolution("stored wake time " + std::to_string(it->second) +
                                       " for robot " + std::to_string(id) +
                                       " disagrees with recomputed " + std::to_string(wake[f]));
    }
    if (std::abs(makespan - sol.makespan) > 1e-9)
        throw InconsistentSolution("stored makespan " + std::to_string(sol.makespan) +
                                   " disagrees with recomputed " + std::to_string(makespan));
    return makespan;
}

nlohmann::json solution_to_json(const OfflineSolution& sol) {
    nlohmann::json wake = nlohmann::json::object();
    for (const auto& [id, t] : sol.wake_time) wake[std::to_string(id)] = t;
    nlohmann::json seqs = nlohmann::json::object();
    for (const auto& [id, children] : sol.waker_seq)
        if (!children.empty()) seqs[std::to_string(id)] = children;
    return {{"makespan", sol.makespan}, {"wake_times", wake}, {"waker_seq", seqs}};
}

}  // namespace ftag

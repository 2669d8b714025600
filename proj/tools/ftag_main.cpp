#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ftag/acceptance.hpp"
#include "ftag/adversary.hpp"

namespace {

using namespace ftag;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", x);
    return buf;
}

int solver_cap() {
    if (const char* env = std::getenv("FTAG_SOLVER_CAP")) return std::atoi(env);
    return SolverOptions{}.frozen_cap;
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const SchemaError*>(&e)) return 2;
    if (dynamic_cast<const TooLarge*>(&e)) return 3;
    if (dynamic_cast<const HorizonExceeded*>(&e)) return 4;
    return 1;
}

struct Cli {
    // solve
    std::string solve_path;
    std::string solve_backend = "exact";
    std::string solution_out;
    // simulate
    std::string sim_path;
    std::string sim_strategy = "patience";
    double wait_factor = 1.4142135623730951;
    std::string opt_backend = "exact";
    double opt_value = 0.0;
    bool opt_given = false;
    std::string trace_out;
    std::string positions_out;
    double positions_dt = 0.1;
    double max_time = 100.0;
    // adversary
    int k = 1;
    std::string adv_strategy = "greedy";
    double dt = 1e-3;
    std::string report_out;
    // verify
    std::string fixtures = "tests/fixtures";
    std::string filter;
};

PatienceConfig patience_config(const Cli& cli) {
    PatienceConfig cfg;
    cfg.wait_factor = cli.wait_factor;
    cfg.frozen_cap = solver_cap();
    if (cli.opt_backend == "greedy")
        cfg.backend = OptBackend::greedy_upper_bound;
    else if (cli.opt_backend != "exact")
        throw StrategyError("unknown opt backend '" + cli.opt_backend + "'");
    return cfg;
}

int cmd_solve(const Cli& cli) {
    Instance inst = load_instance(read_file(cli.solve_path));
    OfflineSolution sol;
    if (cli.solve_backend == "exact")
        sol = opt_exact(inst, {solver_cap()});
    else if (cli.solve_backend == "brute")
        sol = opt_bruteforce(inst);
    else if (cli.solve_backend == "greedy")
        sol = greedy_upper_bound(inst);
    else
        throw Error("unknown solve backend '" + cli.solve_backend + "'");
    std::cout << "makespan " << num(sol.makespan) << "\n";
    if (!cli.solution_out.empty()) write_file(cli.solution_out, solution_to_json(sol).dump(2) + "\n");
    return 0;
}

int cmd_simulate(const Cli& cli) {
    Instance inst = load_instance(read_file(cli.sim_path));
    auto strategy = make_strategy(cli.sim_strategy, patience_config(cli));
    SimOptions so;
    so.max_time = cli.max_time;
    Trace trace = simulate(inst, *strategy, so);
    std::cout << "makespan " << num(trace.makespan) << "\n";

    double opt = cli.opt_value;
    if (!cli.opt_given && inst.frozen_count() <= solver_cap())
        opt = opt_exact(inst, {solver_cap()}).makespan;
    if (opt > 0.0)
        std::cout << "ratio " << num(ratio(trace, opt)) << " (opt " << num(opt) << ")\n";

    if (!cli.trace_out.empty()) write_file(cli.trace_out, trace_csv(trace));
    if (!cli.positions_out.empty())
        write_file(cli.positions_out, sampled_positions_csv(trace, cli.positions_dt));
    return 0;
}

int cmd_adversary(const Cli& cli) {
    AdversaryOptions opts;
    opts.dt = cli.dt;
    opts.max_time = cli.max_time;
    AdversaryReport report =
        run_adversary(cli.k, make_strategy_factory(cli.adv_strategy, patience_config(cli)), opts);
    std::cout << "k=" << cli.k << " strategy=" << cli.adv_strategy << " case="
              << (report.kase == AdversaryCase::case1 ? "case1" : "case2")
              << " t_star=" << (report.t_star ? num(*report.t_star) : "-")
              << " certified_opt=" << num(report.certified_opt)
              << " makespan=" << num(report.makespan) << "\n";
    std::cout << "ratio " << num(report.achieved_ratio) << " vs r_bound(" << cli.k << ") "
              << num(r_bound(cli.k)) << "\n";
    if (!cli.report_out.empty())
        write_file(cli.report_out, report_to_json(report, cli.adv_strategy).dump(2) + "\n");
    return 0;
}

int cmd_verify(const Cli& cli) {
    AcceptanceOptions opts;
    opts.fixtures_dir = cli.fixtures;
    if (const char* env = std::getenv("FTAG_FIXTURES")) opts.fixtures_dir = env;
    opts.filter = cli.filter;
    auto results = run_acceptance(opts);
    bool all = true;
    for (const auto& r : results) {
        std::printf("%-4s C%d %-58s %8.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.detail.c_str());
        all = all && r.pass;
    }
    if (results.empty()) {
        std::cout << "no criteria matched filter '" << cli.filter << "'\n";
        return 1;
    }
    std::cout << (all ? "all criteria passed" : "some criteria FAILED") << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online time-dependent freeze-tag toolkit"};
    app.require_subcommand(1);
    Cli cli;

    auto* solve = app.add_subcommand("solve", "exact offline makespan of an instance");
    solve->add_option("instance", cli.solve_path, "instance JSON file")->required();
    solve->add_option("--backend", cli.solve_backend, "exact | brute | greedy");
    solve->add_option("--solution", cli.solution_out, "write the solution JSON here");

    auto* sim = app.add_subcommand("simulate", "run a strategy on an instance");
    sim->add_option("instance", cli.sim_path, "instance JSON file")->required();
    sim->add_option("--strategy", cli.sim_strategy, "patience | greedy");
    sim->add_option("--wait-factor", cli.wait_factor, "patience wait multiplier");
    sim->add_option("--opt-backend", cli.opt_backend, "exact | greedy (patience backend)");
    auto* optflag = sim->add_option("--opt", cli.opt_value, "known offline optimum for the ratio");
    sim->add_option("--trace", cli.trace_out, "write the event CSV here");
    sim->add_option("--positions", cli.positions_out, "write sampled positions CSV here");
    sim->add_option("--positions-dt", cli.positions_dt, "sampling step for --positions");
    sim->add_option("--max-time", cli.max_time, "simulation horizon");

    auto* adv = app.add_subcommand("adversary", "run the lower-bound adversary");
    adv->add_option("--k", cli.k, "construction level (1..3)")->required();
    adv->add_option("--strategy", cli.adv_strategy, "patience | greedy");
    adv->add_option("--dt", cli.dt, "trigger sampling step");
    adv->add_option("--wait-factor", cli.wait_factor, "patience wait multiplier");
    adv->add_option("--opt-backend", cli.opt_backend, "exact | greedy (patience backend)");
    adv->add_option("--max-time", cli.max_time, "simulation horizon");
    adv->add_option("--report", cli.report_out, "write the report JSON here");

    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    verify->add_option("--fixtures", cli.fixtures, "fixture directory");
    verify->add_option("--filter", cli.filter, "criterion name substring or number");

    CLI11_PARSE(app, argc, argv);
    cli.opt_given = optflag->count() > 0;

    try {
        if (solve->parsed()) return cmd_solve(cli);
        if (sim->parsed()) return cmd_simulate(cli);
        if (adv->parsed()) return cmd_adversary(cli);
        if (verify->parsed()) return cmd_verify(cli);
    } catch (const ftag::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

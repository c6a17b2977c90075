#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "balpart/bench.hpp"
#include "balpart/bnc.hpp"
#include "balpart/io.hpp"
#include "balpart/oracle.hpp"
#include "balpart/tabu.hpp"

using namespace balpart;

namespace {

void print_evaluation(const Instance& inst, const Partition& p, const Evaluation& ev) {
    std::cout << "d = " << std::setprecision(10) << ev.d << "\n"
              << "f = " << ev.f << "\n"
              << "infeasible classes = " << ev.infeasible_classes.size() << "\n"
              << "forbidden hits = " << ev.forbidden_hits << "\n";
    for (int c = 0; c < p.k(); ++c) {
        std::cout << "class " << c << " (w=" << p.weight_of(c) << "):";
        for (int v : p.nodes_of(c)) std::cout << " " << v;
        std::cout << "\n";
    }
    (void)inst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"balanced k-way partitioning with weight windows"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    double time_limit = 3600.0;
    int threads = 1;
    bool quiet = false;
    app.add_option("--seed", seed, "master random seed");
    app.add_option("--time-limit", time_limit, "wall-clock limit in seconds");
    app.add_option("--threads", threads, "worker threads for solve / parallel bench cells");
    app.add_flag("--quiet", quiet, "suppress progress output");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random instance file");
    int gen_n = 0, gen_k = 0;
    std::string gen_out;
    gen->add_option("n", gen_n, "nodes")->required();
    gen->add_option("k", gen_k, "classes")->required();
    gen->add_option("-o,--out", gen_out, "output path")->required();

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "run the exact branch-and-cut solver");
    std::string solve_path, solve_strategy = "s5", solve_summary, solve_cutlog, solve_solution;
    solve_cmd->add_option("instance", solve_path, "instance file")->required();
    solve_cmd->add_option("-s,--strategy", solve_strategy,
                          "s1..s5, optionally +2part/+wcover/+wlower/+wupper");
    solve_cmd->add_option("--summary-out", solve_summary, "append a JSON run summary line");
    solve_cmd->add_option("--cut-log", solve_cutlog, "stream accepted cuts to a text log");
    solve_cmd->add_option("--solution-out", solve_solution, "write the incumbent partition file");

    // tabu
    auto* tabu_cmd = app.add_subcommand("tabu", "run the two-stage tabu search heuristic");
    std::string tabu_path, tabu_trace;
    long long tabu_iters = -1;
    tabu_cmd->add_option("instance", tabu_path, "instance file")->required();
    tabu_cmd->add_option("--iters", tabu_iters, "iteration budget (default: fitted formula)");
    tabu_cmd->add_option("--trace", tabu_trace, "write improvement trace (iteration, f)");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "enumerate all balanced partitions (small n)");
    std::string oracle_path;
    int oracle_cap = 13;
    oracle_cmd->add_option("instance", oracle_path, "instance file")->required();
    oracle_cmd->add_option("--cap", oracle_cap, "largest n the oracle accepts");

    // export-lp
    auto* export_cmd = app.add_subcommand("export-lp", "write the full model in LP format");
    std::string export_path, export_out, export_form = "f2";
    export_cmd->add_option("instance", export_path, "instance file")->required();
    export_cmd->add_option("-o,--out", export_out, "output path")->required();
    export_cmd->add_option("-f,--formulation", export_form, "f1 or f2");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a partition file");
    std::string eval_inst, eval_part;
    eval_cmd->add_option("instance", eval_inst, "instance file")->required();
    eval_cmd->add_option("partition", eval_part, "partition file")->required();

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "run an instances x strategies comparison");
    std::string bench_spec;
    bench_cmd->add_option("spec", bench_spec, "bench spec file")->required();

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "print model statistics for an instance");
    std::string stats_path, stats_form = "f2";
    stats_cmd->add_option("instance", stats_path, "instance file")->required();
    stats_cmd->add_option("-f,--formulation", stats_form, "f1 or f2");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Instance inst = generate_random(gen_n, gen_k, seed);
            save_instance(inst, gen_out);
            std::cout << "wrote " << gen_out << " (n=" << inst.n << ", k=" << inst.k
                      << ", wl=" << inst.wl << ", wu=" << inst.wu << ")\n";
            std::cout << "necessary feasibility condition: "
                      << (check_necessary_feasibility(inst) ? "holds" : "VIOLATED") << "\n";
            return 0;
        }

        if (*solve_cmd) {
            Instance inst = load_instance(solve_path);
            Strategy strat = make_strategy(solve_strategy);
            SolveOptions opts;
            opts.seed = seed;
            opts.time_limit = time_limit;
            opts.threads = threads;
            if (!quiet) opts.log = &std::cout;
            std::ofstream cutlog;
            if (!solve_cutlog.empty()) {
                cutlog.open(solve_cutlog);
                opts.cut_log = &cutlog;
            }
            SolveReport rep = solve(inst, strat, opts);
            std::cout << "status: " << solve_status_name(rep.status) << "\n";
            if (rep.status == SolveStatus::Infeasible)
                std::cout << "reason: " << rep.infeasible_reason << "\n";
            if (rep.incumbent) {
                std::cout << "objective: " << std::setprecision(10) << rep.objective << "\n";
                Evaluation ev = evaluate(inst, *rep.incumbent);
                print_evaluation(inst, *rep.incumbent, ev);
                if (!solve_solution.empty())
                    save_partition(inst, *rep.incumbent, ev, solve_solution);
            }
            if (rep.best_bound > -kInf)
                std::cout << "best bound: " << rep.best_bound << "\n";
            if (rep.gap() < kInf)
                std::cout << "gap: " << std::setprecision(4) << 100.0 * rep.gap() << "%\n";
            std::cout << "nodes: " << rep.nodes << "\n"
                      << "cuts: triangle=" << rep.cuts.triangle
                      << " lazy=" << rep.cuts.lazy_triangle
                      << " 2part=" << rep.cuts.two_partition
                      << " wcover=" << rep.cuts.weight_cover
                      << " wlower=" << rep.cuts.weight_lower
                      << " wupper=" << rep.cuts.weight_upper << "\n"
                      << "time: " << std::setprecision(3) << rep.wall_seconds << "s\n";
            if (!solve_summary.empty()) {
                std::ofstream out(solve_summary, std::ios::app);
                out << run_summary_json(solve_path, solve_strategy, seed, rep) << "\n";
            }
            if (rep.status == SolveStatus::TimeLimit) return 2;
            if (rep.status == SolveStatus::Infeasible) return 3;
            return 0;
        }

        if (*tabu_cmd) {
            Instance inst = load_instance(tabu_path);
            TabuOptions topts;
            topts.seed = seed;
            topts.it_limit = tabu_iters;
            TabuResult res = tabu_search(inst, topts);
            std::cout << "iterations: " << res.iterations << "\n"
                      << "best f: " << std::setprecision(10) << res.best_eval.f << "\n"
                      << "best d: " << res.best_eval.d << "\n"
                      << "infeasible classes: " << res.best_eval.infeasible_classes.size() << "\n"
                      << "last improvement at iteration: "
                      << (res.improvements.empty() ? 0 : res.improvements.back().iter) << "\n";
            if (!tabu_trace.empty()) {
                std::ofstream out(tabu_trace);
                for (const auto& imp : res.improvements)
                    out << imp.iter << " " << std::setprecision(17) << imp.f << "\n";
            }
            return 0;
        }

        if (*oracle_cmd) {
            Instance inst = load_instance(oracle_path);
            EnumerationResult res = enumerate_partitions(inst, nullptr, oracle_cap);
            std::cout << "enumerated balanced partitions: " << res.enumerated_count << "\n"
                      << "feasible: " << res.feasible_count << "\n";
            if (!res.feasible()) {
                std::cout << "status: Infeasible\n";
                return 3;
            }
            std::cout << "optimum: " << std::setprecision(10) << res.optimum << "\n"
                      << "optimal partitions (up to relabeling): " << res.optimal_assigns.size()
                      << "\n";
            Partition p = Partition::from_assign(inst, res.optimal_assigns.front());
            print_evaluation(inst, p, evaluate(inst, p));
            return 0;
        }

        if (*export_cmd) {
            Instance inst = load_instance(export_path);
            Formulation f = export_form == "f1" ? Formulation::F1 : Formulation::F2;
            if (f == Formulation::F1 && inst.n % inst.k != 0) inst = add_dummies(inst);
            export_lp_file(inst, f, export_out);
            std::cout << "wrote " << export_out << "\n";
            return 0;
        }

        if (*eval_cmd) {
            Instance inst = load_instance(eval_inst);
            Partition p = load_partition(inst, eval_part);
            print_evaluation(inst, p, evaluate(inst, p));
            return 0;
        }

        if (*bench_cmd) {
            BenchSpec spec = load_bench_spec(bench_spec);
            if (threads > 1) spec.jobs = threads;
            if (time_limit != 3600.0) spec.time_limit = time_limit;
            if (seed != 1) spec.master_seed = seed;
            BenchResult res = run_bench(spec, quiet ? nullptr : &std::cout);
            std::string text = res.text_table();
            std::ofstream(spec.out_prefix + ".txt") << text;
            std::ofstream(spec.out_prefix + ".csv") << res.csv_table();
            std::cout << text;
            std::cout << "wrote " << spec.out_prefix << ".txt and " << spec.out_prefix << ".csv\n";
            return 0;
        }

        if (*stats_cmd) {
            Instance inst = load_instance(stats_path);
            ModelConfig cfg;
            cfg.formulation = stats_form == "f1" ? Formulation::F1 : Formulation::F2;
            if (cfg.formulation == Formulation::F1 && inst.n % inst.k != 0)
                inst = add_dummies(inst);
            Model m = build_model(inst, cfg);
            std::cout << m.stats.to_text();
            std::cout << "decile sizes:";
            std::vector<int> sizes(11, 0);
            for (const TriRow& t : m.pool.rows) ++sizes[t.decile];
            for (int r = 1; r <= 10; ++r) std::cout << " " << sizes[r];
            std::cout << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "balpart/bench.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "balpart/io.hpp"

namespace balpart {

using nlohmann::json;

BenchSpec load_bench_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    static const std::set<std::string> known = {"instances", "strategies", "master_seed",
                                                "time_limit", "jobs", "out_prefix"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::runtime_error("bench spec: unknown field '" + it.key() + "'");
    BenchSpec spec;
    for (auto& e : j.at("instances")) {
        BenchInstanceSpec is;
        if (e.contains("path")) {
            is.path = e["path"].get<std::string>();
            is.label = is.path;
        } else {
            is.n = e.at("n").get<int>();
            is.k = e.at("k").get<int>();
            if (e.contains("seed")) is.seed = e["seed"].get<std::uint64_t>();
        }
        spec.instances.push_back(std::move(is));
    }
    spec.strategies = j.at("strategies").get<std::vector<std::string>>();
    if (j.contains("master_seed")) spec.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("time_limit")) spec.time_limit = j["time_limit"].get<double>();
    if (j.contains("jobs")) spec.jobs = j["jobs"].get<int>();
    if (j.contains("out_prefix")) spec.out_prefix = j["out_prefix"].get<std::string>();
    if (spec.strategies.empty()) throw std::runtime_error("bench spec: no strategies");
    return spec;
}

namespace {

std::string fmt_obj(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << v;
    return os.str();
}

std::string fmt_time(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

std::string fmt_gap(double frac) {
    if (frac >= kInf) return "inf%";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << 100.0 * frac << "%";
    return os.str();
}

// nodes column and time-or-gap column for one cell
std::pair<std::string, std::string> cell_text(const BenchCell& c) {
    if (!c.ran || !c.error.empty()) return {"err", "err"};
    if (c.status == SolveStatus::Infeasible) return {"infeas", "-"};
    if (c.status == SolveStatus::TimeLimit) return {"-", fmt_gap(c.gap)};
    return {std::to_string(c.nodes), fmt_time(c.seconds)};
}

}  // namespace

BenchResult run_bench(const BenchSpec& spec, std::ostream* progress) {
    BenchResult result;
    result.spec = spec;

    // materialize instances up front
    std::vector<Instance> instances;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < spec.instances.size(); ++i) {
        BenchInstanceSpec is = spec.instances[i];
        if (!is.path.empty()) {
            instances.push_back(load_instance(is.path));
            labels.push_back(is.label);
        } else {
            std::uint64_t seed = is.seed ? is.seed : seed_split(spec.master_seed, i);
            instances.push_back(generate_random(is.n, is.k, seed));
            std::ostringstream lab;
            lab << "n" << is.n << "k" << is.k << "s" << seed;
            labels.push_back(lab.str());
        }
        result.spec.instances[i].label = labels.back();
    }

    std::size_t ni = instances.size(), ns = spec.strategies.size();
    result.cells.assign(ni, std::vector<BenchCell>(ns));

    std::mutex io_mu;
    std::atomic<std::size_t> next{0};
    auto run_cells = [&]() {
        while (true) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= ni * ns) return;
            std::size_t i = idx / ns, s = idx % ns;
            BenchCell& cell = result.cells[i][s];
            cell.ran = true;
            try {
                Strategy strat = make_strategy(spec.strategies[s]);
                SolveOptions opts;
                opts.seed = seed_split(spec.master_seed, 1000003ULL * (i + 1) + s);
                opts.time_limit = spec.time_limit;
                SolveReport rep = solve(instances[i], strat, opts);
                cell.status = rep.status;
                cell.objective = rep.objective;
                cell.gap = rep.gap();
                cell.seconds = rep.wall_seconds;
                cell.nodes = rep.nodes;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            if (progress) {
                std::lock_guard lk(io_mu);
                *progress << labels[i] << " / " << spec.strategies[s] << ": ";
                if (!cell.error.empty())
                    *progress << "error (" << cell.error << ")";
                else
                    *progress << solve_status_name(cell.status) << " obj="
                              << (cell.status == SolveStatus::Infeasible ? std::string("-")
                                                                         : fmt_obj(cell.objective))
                              << " nodes=" << cell.nodes << " time=" << fmt_time(cell.seconds)
                              << "s";
                *progress << "\n";
            }
        }
    };

    int jobs = std::max(1, spec.jobs);
    if (jobs == 1) {
        run_cells();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(run_cells);
        for (auto& t : pool) t.join();
    }
    return result;
}

namespace {

struct TableData {
    std::vector<std::vector<std::string>> rows;  // rendered cells
    std::vector<std::string> header;
};

TableData layout(const BenchResult& r) {
    const BenchSpec& spec = r.spec;
    std::size_t ni = spec.instances.size(), ns = spec.strategies.size();
    TableData td;
    td.header = {"inst", "value"};
    for (const std::string& s : spec.strategies) {
        td.header.push_back(s + ".nodes");
        td.header.push_back(s + ".time");
    }

    // instance rows
    for (std::size_t i = 0; i < ni; ++i) {
        std::vector<std::string> row;
        row.push_back(spec.instances[i].label);
        double value = kInf;
        for (std::size_t s = 0; s < ns; ++s)
            if (r.cells[i][s].solved()) {
                value = r.cells[i][s].objective;
                break;
            }
        row.push_back(value < kInf ? fmt_obj(value) : "-");
        for (std::size_t s = 0; s < ns; ++s) {
            auto [a, b] = cell_text(r.cells[i][s]);
            row.push_back(a);
            row.push_back(b);
        }
        td.rows.push_back(std::move(row));
    }

    // average row: over all instances, unless some cell failed or timed out,
    // in which case only instances solved by every strategy count (dagger)
    bool any_unsolved = false;
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t s = 0; s < ns; ++s)
            if (!r.cells[i][s].solved()) any_unsolved = true;
    std::vector<std::size_t> avg_set;
    for (std::size_t i = 0; i < ni; ++i) {
        bool all = true;
        for (std::size_t s = 0; s < ns; ++s)
            if (!r.cells[i][s].solved()) all = false;
        if (all || !any_unsolved) avg_set.push_back(i);
    }
    std::vector<std::string> avg_row;
    avg_row.push_back(any_unsolved ? "avg\xe2\x80\xa0" : "avg");
    double obj_sum = 0.0;
    std::vector<double> node_avg(ns, 0.0), time_avg(ns, 0.0);
    if (!avg_set.empty()) {
        for (std::size_t i : avg_set) obj_sum += r.cells[i][0].objective;
        for (std::size_t s = 0; s < ns; ++s) {
            for (std::size_t i : avg_set) {
                node_avg[s] += static_cast<double>(r.cells[i][s].nodes);
                time_avg[s] += r.cells[i][s].seconds;
            }
            node_avg[s] /= static_cast<double>(avg_set.size());
            time_avg[s] /= static_cast<double>(avg_set.size());
        }
        avg_row.push_back(fmt_obj(obj_sum / static_cast<double>(avg_set.size())));
    } else {
        avg_row.push_back("-");
    }
    std::size_t best_s = 0;
    for (std::size_t s = 1; s < ns; ++s)
        if (time_avg[s] < time_avg[best_s]) best_s = s;
    for (std::size_t s = 0; s < ns; ++s) {
        if (avg_set.empty()) {
            avg_row.push_back("-");
            avg_row.push_back("-");
            continue;
        }
        avg_row.push_back(fmt_time(node_avg[s]));
        avg_row.push_back(fmt_time(time_avg[s]) + (s == best_s ? "*" : ""));
    }
    td.rows.push_back(std::move(avg_row));
    return td;
}

}  // namespace

std::string BenchResult::text_table() const {
    TableData td = layout(*this);
    std::vector<std::size_t> widths(td.header.size(), 0);
    for (std::size_t c = 0; c < td.header.size(); ++c) widths[c] = td.header[c].size();
    for (auto& row : td.rows)
        for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << std::setw(static_cast<int>(widths[c]) + 2) << row[c];
        os << "\n";
    };
    emit(td.header);
    for (auto& row : td.rows) emit(row);
    return os.str();
}

std::string BenchResult::csv_table() const {
    TableData td = layout(*this);
    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << "\n";
    };
    emit(td.header);
    for (auto& row : td.rows) emit(row);
    return os.str();
}

std::string run_summary_json(const std::string& instance_label, const std::string& strategy,
                             std::uint64_t seed, const SolveReport& report) {
    json j;
    j["instance"] = instance_label;
    j["strategy"] = strategy;
    j["seed"] = seed;
    j["status"] = solve_status_name(report.status);
    if (report.incumbent) j["objective"] = report.objective;
    j["bound"] = report.best_bound <= -kInf ? json() : json(report.best_bound);
    j["gap"] = report.gap() >= kInf ? json() : json(report.gap());
    j["nodes"] = report.nodes;
    j["time_s"] = report.wall_seconds;
    j["lp_iterations"] = report.lp_iterations;
    j["tabu_iterations"] = report.tabu_iterations;
    json cuts;
    cuts["triangle"] = report.cuts.triangle;
    cuts["lazy_triangle"] = report.cuts.lazy_triangle;
    cuts["two_partition"] = report.cuts.two_partition;
    cuts["weight_cover"] = report.cuts.weight_cover;
    cuts["weight_lower"] = report.cuts.weight_lower;
    cuts["weight_upper"] = report.cuts.weight_upper;
    j["cuts"] = cuts;
    return j.dump();
}

}  // namespace balpart

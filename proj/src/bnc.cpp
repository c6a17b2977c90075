#include "balpart/bnc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <queue>
#include <set>
#include <thread>

namespace balpart {

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::TimeLimit: return "TimeLimit";
        default: return "Infeasible";
    }
}

Strategy make_strategy(const std::string& spec) {
    std::string s;
    for (char c : spec) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t cut = s.find('+', start);
        if (cut == std::string::npos) cut = s.size();
        parts.push_back(s.substr(start, cut - start));
        start = cut + 1;
    }

    Strategy st;
    st.name = s;
    const std::string& base = parts[0];
    std::set<int> all = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    if (base == "s1") {
        st.formulation = Formulation::F1;
        st.initial_deciles = all;
        st.warm_start = false;
        st.sep_two_partition = st.sep_weight_cover = false;
    } else if (base == "s2") {
        st.formulation = Formulation::F2;
        st.initial_deciles = all;
        st.warm_start = false;
        st.sep_two_partition = st.sep_weight_cover = false;
    } else if (base == "s3") {
        st.formulation = Formulation::F2;
        st.initial_deciles = all;
        st.warm_start = true;
        st.sep_two_partition = st.sep_weight_cover = false;
    } else if (base == "s4") {
        st.formulation = Formulation::F2;
        st.initial_deciles = {1, 2};
        st.warm_start = true;
        st.sep_two_partition = st.sep_weight_cover = false;
    } else if (base == "s5") {
        st.formulation = Formulation::F2;
        st.initial_deciles = {1, 2};
        st.warm_start = true;
        st.sep_two_partition = st.sep_weight_cover = true;
    } else {
        throw std::invalid_argument("unknown strategy '" + spec + "'");
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        if (p == "2part")
            st.sep_two_partition = true;
        else if (p == "wcover")
            st.sep_weight_cover = true;
        else if (p == "wlower")
            st.sep_weight_lower = true;
        else if (p == "wupper")
            st.sep_weight_upper = true;
        else
            throw std::invalid_argument("unknown strategy suffix '" + p + "'");
    }
    return st;
}

double SolveReport::gap() const {
    if (!incumbent) return kInf;
    if (std::fabs(objective) < 1e-12)
        return objective - best_bound <= 1e-9 ? 0.0 : kInf;
    return (objective - best_bound) / std::fabs(objective);
}

int select_branch_var(std::span<const double> x, double int_tol) {
    int best = -1;
    double best_dist = 0.5;
    for (std::size_t j = 0; j < x.size(); ++j) {
        double frac = std::fabs(x[j] - std::round(x[j]));
        if (frac <= int_tol) continue;
        double dist = std::fabs(x[j] - 0.5);
        if (best < 0 || dist < best_dist - 1e-15) {
            best = static_cast<int>(j);
            best_dist = dist;
        }
    }
    return best;
}

namespace {

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Partition decode_incumbent(std::span<const double> x, const Instance& model_inst,
                           const Instance& original) {
    int n = model_inst.n;
    DisjointSet ds(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (x[edge_index(i, j, n)] > 0.5) ds.join(i, j);
    // transitivity: same component must mean edge selected
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool same = ds.find(i) == ds.find(j);
            bool edge = x[edge_index(i, j, n)] > 0.5;
            if (same != edge)
                throw std::logic_error("decode: point is not a disjoint union of cliques (pair " +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
        }
    std::vector<int> class_of_root(n, -1);
    int classes = 0;
    std::vector<int> assign(original.n, -1);
    for (int v = 0; v < n; ++v) {
        int r = ds.find(v);
        if (class_of_root[r] < 0) class_of_root[r] = classes++;
        if (v < original.n) assign[v] = class_of_root[r];
    }
    if (classes != model_inst.k)
        throw std::logic_error("decode: component count " + std::to_string(classes) +
                               " != k = " + std::to_string(model_inst.k));
    return Partition::from_assign(original, std::move(assign));
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double prune_eps(double ub) { return 1e-6 * std::max(1.0, std::fabs(ub)); }

std::uint64_t cut_signature(const Cut& cut) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    mix(static_cast<std::uint64_t>(cut.family));
    std::vector<std::pair<int, long long>> entries;
    entries.reserve(cut.cols.size());
    for (std::size_t t = 0; t < cut.cols.size(); ++t)
        entries.emplace_back(cut.cols[t], std::llround(cut.coefs[t] * 1e9));
    std::sort(entries.begin(), entries.end());
    for (auto& [c, q] : entries) {
        mix(static_cast<std::uint64_t>(c));
        mix(static_cast<std::uint64_t>(q));
    }
    mix(static_cast<std::uint64_t>(cut.rel));
    mix(static_cast<std::uint64_t>(std::llround(cut.rhs * 1e9)));
    return h;
}

struct NodeState {
    long long id = 0;
    int depth = 0;
    double bound = -kInf;
    std::vector<std::pair<int, std::uint8_t>> fixings;
    LpBasis basis;
    int basis_rows = 0;
    int basis_worker = -1;
};

struct NodeHeapCmp {
    // min-heap by (bound, id)
    bool operator()(const NodeState& a, const NodeState& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

struct Shared {
    std::mutex mu;
    std::condition_variable cv;
    std::priority_queue<NodeState, std::vector<NodeState>, NodeHeapCmp> open;
    int working = 0;
    bool stop = false;
    bool timed_out = false;
    std::string error;

    double ub = kInf;
    std::optional<Partition> incumbent;
    long long next_id = 2;  // root is 1
    long long nodes = 0;
    CutCounts cuts;
    long long lp_iters = 0;
    std::vector<double> active_bound;

    double lower_bound_locked() const {
        double lb = kInf;
        if (!open.empty()) lb = std::min(lb, open.top().bound);
        for (double b : active_bound) lb = std::min(lb, b);
        return lb;
    }
};

class Worker {
  public:
    Worker(int wid, const Model& model, const Instance& orig, const Strategy& strat,
           const SolveOptions& opts, Shared& sh, Clock::time_point t0,
           std::optional<Clock::time_point> deadline)
        : wid_(wid),
          model_(model),
          orig_(orig),
          strat_(strat),
          opts_(opts),
          sh_(sh),
          t0_(t0),
          deadline_(deadline),
          lp_(model.lp),
          in_lp_(model.pool_in_lp) {
        lp_opts_.deadline = deadline_;
    }

    void run() {
        std::unique_lock lk(sh_.mu);
        while (true) {
            while (!sh_.stop && sh_.open.empty() && sh_.working > 0) sh_.cv.wait(lk);
            if (sh_.stop || sh_.open.empty()) return;
            NodeState node = sh_.open.top();
            sh_.open.pop();
            if (node.bound >= sh_.ub - prune_eps(sh_.ub)) continue;
            ++sh_.working;
            sh_.active_bound[wid_] = node.bound;
            lk.unlock();

            try {
                dive(std::move(node));
            } catch (const std::exception& e) {
                flag_error(e.what());
            }

            lk.lock();
            --sh_.working;
            sh_.active_bound[wid_] = kInf;
            if (sh_.open.empty() && sh_.working == 0) sh_.cv.notify_all();
        }
    }

  private:
    enum class Outcome { Fathomed, Branched, Aborted };

    void dive(NodeState node) {
        while (true) {
            {
                std::lock_guard lk(sh_.mu);
                if (sh_.stop) {
                    sh_.open.push(std::move(node));
                    return;
                }
            }
            NodeState child_take, child_push;
            Outcome out = process(node, child_take, child_push);
            if (out == Outcome::Aborted) {
                // hand the node back so its bound stays part of the global
                // lower bound
                std::lock_guard lk(sh_.mu);
                sh_.open.push(std::move(node));
                return;
            }
            if (out == Outcome::Fathomed) return;
            {
                std::lock_guard lk(sh_.mu);
                if (child_push.bound < sh_.ub - prune_eps(sh_.ub)) {
                    sh_.open.push(std::move(child_push));
                    sh_.cv.notify_one();
                }
                if (child_take.bound >= sh_.ub - prune_eps(sh_.ub)) return;
                sh_.active_bound[wid_] = child_take.bound;
            }
            node = std::move(child_take);
        }
    }

    bool expired() const { return deadline_ && Clock::now() >= *deadline_; }

    void flag_timeout() {
        std::lock_guard lk(sh_.mu);
        sh_.stop = true;
        sh_.timed_out = true;
        sh_.cv.notify_all();
    }

    void flag_error(const std::string& msg) {
        std::lock_guard lk(sh_.mu);
        sh_.stop = true;
        sh_.error = msg;
        sh_.cv.notify_all();
    }

    void apply_node_bounds(const NodeState& node) {
        lp_.lb = model_.lp.lb;
        lp_.ub = model_.lp.ub;
        for (auto [col, val] : node.fixings) {
            lp_.lb[col] = static_cast<double>(val);
            lp_.ub[col] = static_cast<double>(val);
        }
    }

    void note_cut(const Cut& cut, long long node_id) {
        if (opts_.cut_observer) opts_.cut_observer(cut, node_id);
        if (opts_.cut_log) {
            std::lock_guard lk(sh_.mu);
            *opts_.cut_log << "family=" << cut_family_name(cut.family)
                           << " violation=" << cut.violation << " support=" << cut.support.size()
                           << " node=" << node_id << "\n";
        }
    }

    Cut triangle_cut(int pool_idx, std::span<const double> x) const {
        LpRow row = model_.pool_row(pool_idx);
        Cut cut;
        cut.family = CutFamily::Triangle;
        cut.cols = std::move(row.cols);
        cut.coefs = std::move(row.coefs);
        cut.rel = row.rel;
        cut.rhs = row.rhs;
        cut.violation = cut.lhs_at(x) - cut.rhs;
        const TriRow& t = model_.pool.rows[pool_idx];
        cut.support = {t.i, t.j, t.l};
        return cut;
    }

    Outcome process(NodeState& node, NodeState& child_take, NodeState& child_push) {
        apply_node_bounds(node);

        LpBasis warm;
        bool have_warm = false;
        if (node.basis_worker == wid_ && !node.basis.empty() && node.basis_rows <= lp_.nrows()) {
            warm = extend_basis(node.basis, lp_.ncols, lp_.nrows());
            have_warm = true;
        }

        SplitMix64 sep_rng(seed_split(opts_.seed, 0x5e90000ULL + static_cast<std::uint64_t>(node.id)));

        {
            std::lock_guard lk(sh_.mu);
            ++sh_.nodes;
        }

        int rounds = 0;
        int round_cap = node.depth == 0 ? strat_.cut_rounds_root : strat_.cut_rounds_tree;
        double parent_bound = node.bound;
        LpResult res;
        while (true) {
            if (expired()) {
                flag_timeout();
                return Outcome::Aborted;
            }
            try {
                res = solve_lp(lp_, have_warm ? &warm : nullptr, lp_opts_);
            } catch (const SimplexInterrupted&) {
                flag_timeout();
                return Outcome::Aborted;
            } catch (const SimplexError& e) {
                if (have_warm) {
                    have_warm = false;  // re-solve from scratch once
                    continue;
                }
                flag_error("LP numerical failure at node " + std::to_string(node.id) + ": " +
                           e.what());
                return Outcome::Aborted;
            }
            {
                std::lock_guard lk(sh_.mu);
                sh_.lp_iters += res.iterations;
            }
            if (res.status == LpStatus::Infeasible) return Outcome::Fathomed;

            if (opts_.check_invariants && res.objective < parent_bound - 1e-7)
                throw std::logic_error("node bound decreased along the path");
            node.bound = std::max(node.bound, res.objective);

            double ub_snapshot;
            {
                std::lock_guard lk(sh_.mu);
                ub_snapshot = sh_.ub;
                sh_.active_bound[wid_] = node.bound;
            }
            if (node.bound >= ub_snapshot - prune_eps(ub_snapshot)) return Outcome::Fathomed;

            int branch_col = select_branch_var(res.x);
            if (branch_col < 0) {
                if (handle_integer(node, res)) {  // lazy rows added, resolve
                    warm = extend_basis(res.basis, lp_.ncols, lp_.nrows());
                    have_warm = true;
                    continue;
                }
                return Outcome::Fathomed;
            }

            if (rounds < round_cap) {
                SepContext ctx = node.depth == 0 ? SepContext::RootFractional
                                                 : SepContext::TreeFractional;
                std::vector<int> tris = separate_triangles(model_, in_lp_, res.x, ctx);
                if (!tris.empty()) {
                    for (int idx : tris) {
                        lp_.append_row(model_.pool_row(idx));
                        in_lp_[idx] = 1;
                        note_cut(triangle_cut(idx, res.x), node.id);
                    }
                    {
                        std::lock_guard lk(sh_.mu);
                        sh_.cuts.triangle += static_cast<long long>(tris.size());
                    }
                    warm = extend_basis(res.basis, lp_.ncols, lp_.nrows());
                    have_warm = true;
                    ++rounds;
                    continue;
                }
                // custom families run only when no triangle cut was found
                if (add_custom_cuts(node, res.x, sep_rng)) {
                    warm = extend_basis(res.basis, lp_.ncols, lp_.nrows());
                    have_warm = true;
                    ++rounds;
                    continue;
                }
            }

            // branch
            NodeState child0, child1;
            child0.depth = child1.depth = node.depth + 1;
            child0.bound = child1.bound = node.bound;
            child0.fixings = node.fixings;
            child1.fixings = node.fixings;
            child0.fixings.emplace_back(branch_col, 0);
            child1.fixings.emplace_back(branch_col, 1);
            child0.basis = res.basis;
            child1.basis = res.basis;
            child0.basis_rows = child1.basis_rows = lp_.nrows();
            child0.basis_worker = child1.basis_worker = wid_;
            {
                std::lock_guard lk(sh_.mu);
                child0.id = sh_.next_id++;
                child1.id = sh_.next_id++;
            }
            // dive toward the side the fractional value leans to; ties to 1
            bool take_one = res.x[branch_col] >= 0.5;
            child_take = take_one ? std::move(child1) : std::move(child0);
            child_push = take_one ? std::move(child0) : std::move(child1);
            return Outcome::Branched;
        }
    }

    // Integer LP point: enforce the whole pool lazily; otherwise try to
    // accept the incumbent.  Returns true when rows were added and the node
    // LP must be re-solved.
    bool handle_integer(NodeState& node, LpResult& res) {
        std::vector<double> xr(res.x.size());
        for (std::size_t j = 0; j < res.x.size(); ++j) xr[j] = std::round(res.x[j]);

        std::vector<int> violated;
        for (std::size_t idx = 0; idx < model_.pool.rows.size(); ++idx) {
            if (in_lp_[idx] || model_.pool.rows[idx].redundant) continue;
            const TriRow& t = model_.pool.rows[idx];
            double lhs = 0.0;
            auto row = model_.pool_row(static_cast<int>(idx));
            for (std::size_t e = 0; e < row.cols.size(); ++e) lhs += row.coefs[e] * xr[row.cols[e]];
            if (lhs > row.rhs + kFeasTol) violated.push_back(static_cast<int>(idx));
            (void)t;
        }
        if (!violated.empty()) {
            for (int idx : violated) {
                lp_.append_row(model_.pool_row(idx));
                in_lp_[idx] = 1;
                note_cut(triangle_cut(idx, xr), node.id);
            }
            std::lock_guard lk(sh_.mu);
            sh_.cuts.lazy_triangle += static_cast<long long>(violated.size());
            return true;
        }

        Partition p = decode_incumbent(xr, model_.inst, orig_);
        Evaluation ev = evaluate(orig_, p);
        if (!ev.feasible()) return false;  // tolerance-edge point; fathom
        if (opts_.check_invariants &&
            std::fabs(ev.d - res.objective) > 1e-6 * std::max(1.0, std::fabs(ev.d)))
            throw std::logic_error("incumbent objective disagrees with LP objective");
        std::lock_guard lk(sh_.mu);
        if (ev.d < sh_.ub - kWeightTol) {
            sh_.ub = ev.d;
            sh_.incumbent = std::move(p);
        }
        return false;
    }

    bool add_custom_cuts(const NodeState& node, std::span<const double> x, SplitMix64& rng) {
        bool added = false;
        auto add_family = [&](std::vector<Cut>&& cuts, long long& counter) {
            long long taken = 0;
            for (Cut& cut : cuts) {
                std::uint64_t sig = cut_signature(cut);
                if (!cut_seen_.insert(sig).second) continue;
                note_cut(cut, node.id);
                lp_.append_row(cut.row());
                ++taken;
                added = true;
            }
            if (taken) {
                std::lock_guard lk(sh_.mu);
                counter += taken;
            }
        };

        if (strat_.sep_two_partition)
            add_family(separate_two_partition(model_.vars, x, rng,
                                              model_.cfg.cut_violation_threshold),
                       sh_.cuts.two_partition);
        if (strat_.sep_weight_cover)
            add_family(separate_weight_cover(model_.inst, model_.vars, x,
                                             model_.cfg.cut_violation_threshold),
                       sh_.cuts.weight_cover);
        if (strat_.sep_weight_lower && model_.inst.n <= WeightBoundLimits{}.max_n)
            add_family(std::move(separate_weight_bounds_exhaustive(model_.inst, model_.vars, x,
                                                                   WeightBoundFamily::Lower)
                                     .cuts),
                       sh_.cuts.weight_lower);
        if (strat_.sep_weight_upper && model_.inst.n <= WeightBoundLimits{}.max_n)
            add_family(std::move(separate_weight_bounds_exhaustive(model_.inst, model_.vars, x,
                                                                   WeightBoundFamily::Upper)
                                     .cuts),
                       sh_.cuts.weight_upper);
        return added;
    }

    int wid_;
    const Model& model_;
    const Instance& orig_;
    const Strategy& strat_;
    const SolveOptions& opts_;
    Shared& sh_;
    Clock::time_point t0_;
    std::optional<Clock::time_point> deadline_;
    LinearProgram lp_;
    std::vector<char> in_lp_;
    std::set<std::uint64_t> cut_seen_;
    SimplexOptions lp_opts_;
};

}  // namespace

SolveReport solve(const Instance& inst, const Strategy& strategy, const SolveOptions& opts) {
    Clock::time_point t0 = Clock::now();
    inst.validate();

    SolveReport report;
    if (!check_necessary_feasibility(inst)) {
        report.status = SolveStatus::Infeasible;
        report.infeasible_reason = "necessary feasibility condition on k and the weight window fails";
        report.wall_seconds = seconds_since(t0);
        return report;
    }

    std::optional<Clock::time_point> deadline;
    if (opts.time_limit < kInf)
        deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(std::max(0.0, opts.time_limit)));

    // warm start from tabu search on the original instance
    std::optional<Partition> incumbent;
    double ub = kInf;
    if (strategy.warm_start) {
        TabuOptions topts;
        topts.seed = seed_split(opts.seed, 0x7ab0ULL);
        topts.deadline = deadline;
        TabuResult tr = tabu_search(inst, topts);
        report.tabu_iterations = tr.iterations;
        if (tr.best_eval.feasible()) {
            incumbent = tr.best;
            ub = tr.best_eval.d;
        }
    }

    Instance model_inst = inst;
    if (strategy.formulation == Formulation::F1 && inst.n % inst.k != 0)
        model_inst = add_dummies(inst);
    ModelConfig cfg;
    cfg.formulation = strategy.formulation;
    cfg.initial_deciles = strategy.initial_deciles;
    Model model = build_model(model_inst, cfg);

    Shared sh;
    sh.ub = ub;
    sh.incumbent = std::move(incumbent);
    int threads = std::max(1, opts.threads);
    sh.active_bound.assign(threads, kInf);

    NodeState root;
    root.id = 1;
    root.depth = 0;
    root.bound = -kInf;
    sh.open.push(std::move(root));

    bool deadline_hit_early = deadline && Clock::now() >= *deadline;
    if (deadline_hit_early) {
        sh.stop = true;
        sh.timed_out = true;
    }

    std::vector<Worker> workers;
    workers.reserve(threads);
    for (int w = 0; w < threads; ++w)
        workers.emplace_back(w, model, inst, strategy, opts, sh, t0, deadline);

    // progress monitor
    std::thread monitor;
    std::atomic<bool> monitor_stop{false};
    if (opts.log) {
        monitor = std::thread([&]() {
            double last = 0.0;
            while (!monitor_stop.load()) {
                std::this_thread::sleep_for(std::chrono::duration<double>(
                    std::max(0.05, std::min(opts.log_interval, 1.0))));
                double now = seconds_since(t0);
                if (now - last < opts.log_interval) continue;
                last = now;
                std::lock_guard lk(sh.mu);
                double lb = sh.lower_bound_locked();
                std::ostream& os = *opts.log;
                os << "[" << std::fixed << std::setprecision(1) << now << "s] nodes=" << sh.nodes
                   << " open=" << sh.open.size() << " bound=" << std::setprecision(4)
                   << (lb >= kInf ? sh.ub : lb) << " incumbent=";
                if (sh.incumbent) {
                    os << std::setprecision(4) << sh.ub << " gap=" << std::setprecision(2)
                       << (sh.ub != 0.0 ? 100.0 * (sh.ub - std::min(lb, sh.ub)) / sh.ub : 0.0)
                       << "%";
                } else {
                    os << "-";
                }
                os << "\n" << std::defaultfloat;
            }
        });
    }

    if (!sh.stop) {
        if (threads == 1) {
            workers[0].run();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < threads; ++w) pool.emplace_back([&workers, w] { workers[w].run(); });
            for (auto& t : pool) t.join();
        }
    }

    monitor_stop.store(true);
    if (monitor.joinable()) monitor.join();

    if (!sh.error.empty()) throw std::runtime_error("solve failed: " + sh.error);

    report.nodes = sh.nodes;
    report.cuts = sh.cuts;
    report.lp_iterations = sh.lp_iters;
    report.incumbent = std::move(sh.incumbent);
    report.objective = report.incumbent ? sh.ub : kInf;
    report.wall_seconds = seconds_since(t0);

    if (sh.timed_out) {
        report.status = SolveStatus::TimeLimit;
        double lb;
        {
            std::lock_guard lk(sh.mu);
            lb = sh.lower_bound_locked();
        }
        report.best_bound = lb >= kInf ? -kInf : lb;
        if (report.incumbent) report.best_bound = std::min(report.best_bound, report.objective);
    } else if (report.incumbent) {
        report.status = SolveStatus::Optimal;
        report.best_bound = report.objective;
    } else {
        report.status = SolveStatus::Infeasible;
        report.infeasible_reason = "search tree exhausted without a feasible partition";
    }
    return report;
}

}  // namespace balpart

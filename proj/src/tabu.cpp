#include "balpart/tabu.hpp"

#include <cmath>

#include "balpart/rng.hpp"

namespace balpart {

long long iteration_limit(int n) {
    return static_cast<long long>(std::floor(std::exp(0.26571 * n - 0.052978)));
}

std::vector<OneMove> one_move_neighbors(const Partition& p) {
    std::vector<OneMove> out;
    std::vector<int> small = p.small_classes();
    std::vector<int> large = p.large_classes();
    if (large.empty() || small.empty()) return out;
    std::vector<char> is_large(p.k(), 0);
    for (int c : large) is_large[c] = 1;
    for (int v = 0; v < p.n(); ++v) {
        int c = p.class_of(v);
        if (!is_large[c]) continue;
        for (int j : small) out.push_back({v, c, j});
    }
    return out;
}

std::vector<TwoExchange> two_exchange_neighbors(const Partition& p) {
    std::vector<TwoExchange> out;
    for (int v = 0; v < p.n(); ++v)
        for (int u = v + 1; u < p.n(); ++u)
            if (p.class_of(v) != p.class_of(u)) out.push_back({v, u});
    return out;
}

namespace {

// Incremental state: dist_to_class[v][c] is the summed effective distance
// from v to the members of class c, where forbidden pairs count kPenalty
// (the complete-graph penalty form of the generalized problem).
class IncrementalEval {
  public:
    IncrementalEval(const Instance& inst, const Partition& p) : inst_(inst) {
        n_ = inst.n;
        k_ = inst.k;
        dist_to_class_.assign(static_cast<std::size_t>(n_) * k_, 0.0);
        for (int v = 0; v < n_; ++v)
            for (int u = 0; u < n_; ++u) {
                if (u == v) continue;
                at(v, p.class_of(u)) += eff(v, u);
            }
        recompute_totals(p);
    }

    double f() const { return d_ + kPenalty * infeasible_; }

    double eff(int v, int u) const {
        return inst_.is_forbidden(v, u) ? kPenalty : inst_.d(v, u);
    }

    double& at(int v, int c) { return dist_to_class_[static_cast<std::size_t>(v) * k_ + c]; }
    double at(int v, int c) const { return dist_to_class_[static_cast<std::size_t>(v) * k_ + c]; }

    double move_delta(const Partition& p, int v, int to) const {
        int from = p.class_of(v);
        double dd = at(v, to) - at(v, from);
        return dd + kPenalty * (infeas_delta(p.weight_of(from), -inst_.weights[v]) +
                                infeas_delta(p.weight_of(to), inst_.weights[v]));
    }

    double exchange_delta(const Partition& p, int v, int u) const {
        int cv = p.class_of(v), cu = p.class_of(u);
        double dd = at(v, cu) + at(u, cv) - at(v, cv) - at(u, cu) - 2.0 * eff(v, u);
        double dw = inst_.weights[u] - inst_.weights[v];
        return dd + kPenalty * (infeas_delta(p.weight_of(cv), dw) +
                                infeas_delta(p.weight_of(cu), -dw));
    }

    void apply_move(Partition& p, int v, int to) {
        int from = p.class_of(v);
        d_ += at(v, to) - at(v, from);
        infeasible_ += infeas_delta(p.weight_of(from), -inst_.weights[v]) +
                       infeas_delta(p.weight_of(to), inst_.weights[v]);
        p.move_node(inst_, v, to);
        for (int u = 0; u < n_; ++u) {
            if (u == v) continue;
            double e = eff(u, v);
            at(u, from) -= e;
            at(u, to) += e;
        }
    }

    void apply_exchange(Partition& p, int v, int u) {
        int cv = p.class_of(v), cu = p.class_of(u);
        d_ += at(v, cu) + at(u, cv) - at(v, cv) - at(u, cu) - 2.0 * eff(v, u);
        double dw = inst_.weights[u] - inst_.weights[v];
        infeasible_ += infeas_delta(p.weight_of(cv), dw) + infeas_delta(p.weight_of(cu), -dw);
        p.swap_nodes(inst_, v, u);
        for (int t = 0; t < n_; ++t) {
            if (t == v || t == u) continue;
            double ev = eff(t, v), eu = eff(t, u);
            at(t, cv) += eu - ev;
            at(t, cu) += ev - eu;
        }
        at(v, cv) += eff(v, u);
        at(v, cu) -= eff(v, u);
        at(u, cu) += eff(v, u);
        at(u, cv) -= eff(v, u);
    }

    // Exact recomputation of the running totals, used periodically to stop
    // floating-point drift over long runs.
    void recompute_totals(const Partition& p) {
        d_ = 0.0;
        for (int v = 0; v < n_; ++v) d_ += at(v, p.class_of(v));
        d_ *= 0.5;
        infeasible_ = 0;
        for (int c = 0; c < k_; ++c)
            if (out_of_window(p.weight_of(c))) ++infeasible_;
    }

  private:
    bool out_of_window(double w) const {
        return w < inst_.wl - kWeightTol || w > inst_.wu + kWeightTol;
    }

    int infeas_delta(double w_before, double dw) const {
        return static_cast<int>(out_of_window(w_before + dw)) -
               static_cast<int>(out_of_window(w_before));
    }

    const Instance& inst_;
    int n_ = 0, k_ = 0;
    std::vector<double> dist_to_class_;
    double d_ = 0.0;
    int infeasible_ = 0;
};

}  // namespace

TabuResult tabu_search(const Instance& inst, const TabuOptions& opts) {
    long long limit = opts.it_limit >= 0 ? opts.it_limit : iteration_limit(inst.n);
    SplitMix64 rng(opts.seed);

    Partition cur = initial_partition(inst);
    IncrementalEval inc(inst, cur);

    TabuResult res;
    res.best = cur;
    res.best_eval = evaluate(inst, cur);
    res.improvements.push_back({0, res.best_eval.f});
    double best_f = res.best_eval.f;
    double cur_f = inc.f();

    // tabu_until[v*k + c] >= iter means feature (v, c) is currently tabu.
    std::vector<long long> tabu_until(static_cast<std::size_t>(inst.n) * inst.k, -1);
    auto is_tabu = [&](int v, int c, long long iter) {
        return tabu_until[static_cast<std::size_t>(v) * inst.k + c] >= iter;
    };

    SizeBounds sb = size_bounds(inst);
    std::vector<char> class_is_large(inst.k, 0);

    for (long long iter = 1; iter <= limit; ++iter) {
        if (opts.deadline && std::chrono::steady_clock::now() >= *opts.deadline) break;

        // best admissible candidate; kind 0 = 1-move, 1 = 2-exchange
        int best_kind = -1, ba = -1, bb = -1;
        double best_delta = 0.0;
        bool have = false;
        // fallback: best candidate ignoring the tabu rule, for the rare
        // iteration where everything is tabu
        int fb_kind = -1, fa = -1, fbb = -1;
        double fb_delta = 0.0;
        bool have_fb = false;

        auto consider = [&](int kind, int a, int b, double delta, bool tabu) {
            if (!have_fb || delta < fb_delta) {
                have_fb = true;
                fb_kind = kind;
                fa = a;
                fbb = b;
                fb_delta = delta;
            }
            bool admissible = !tabu || cur_f + delta < best_f - kWeightTol;
            if (!admissible) return;
            if (!have || delta < best_delta) {
                have = true;
                best_kind = kind;
                ba = a;
                bb = b;
                best_delta = delta;
            }
        };

        if (sb.big_classes > 0) {
            for (int c = 0; c < inst.k; ++c)
                class_is_large[c] = cur.size_of(c) == sb.floor_size + 1;
            for (int v = 0; v < inst.n; ++v) {
                if (!class_is_large[cur.class_of(v)]) continue;
                for (int j = 0; j < inst.k; ++j) {
                    if (class_is_large[j]) continue;
                    consider(0, v, j, inc.move_delta(cur, v, j), is_tabu(v, j, iter));
                }
            }
        }
        for (int v = 0; v < inst.n; ++v)
            for (int u = v + 1; u < inst.n; ++u) {
                if (cur.class_of(v) == cur.class_of(u)) continue;
                bool tabu = is_tabu(v, cur.class_of(u), iter) || is_tabu(u, cur.class_of(v), iter);
                consider(1, v, u, inc.exchange_delta(cur, v, u), tabu);
            }

        if (!have) {
            if (!have_fb) break;  // no neighbors at all (degenerate instance)
            best_kind = fb_kind;
            ba = fa;
            bb = fbb;
        }

        int feat_count;
        int feat_node[2], feat_class[2];
        if (best_kind == 0) {
            feat_count = 1;
            feat_node[0] = ba;
            feat_class[0] = cur.class_of(ba);
            inc.apply_move(cur, ba, bb);
        } else {
            feat_count = 2;
            feat_node[0] = ba;
            feat_class[0] = cur.class_of(ba);
            feat_node[1] = bb;
            feat_class[1] = cur.class_of(bb);
            inc.apply_exchange(cur, ba, bb);
        }
        if (iter % 1024 == 0) inc.recompute_totals(cur);
        cur_f = inc.f();

        bool stage1 = cur_f >= kPenalty;
        if (stage1) ++res.stage1_iterations;
        long long hi = stage1 ? 40 : 20;
        for (int t = 0; t < feat_count; ++t) {
            long long tenure = rng.uniform_int(5, hi);
            tabu_until[static_cast<std::size_t>(feat_node[t]) * inst.k + feat_class[t]] =
                iter + tenure;
        }

        if (cur_f < best_f - kWeightTol) {
            best_f = cur_f;
            res.best = cur;
            res.improvements.push_back({iter, cur_f});
        }
        res.iterations = iter;
    }

    res.best_eval = evaluate(inst, res.best);
    return res;
}

}  // namespace balpart

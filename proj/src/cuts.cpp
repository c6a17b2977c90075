#include "balpart/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace balpart {

const char* cut_family_name(CutFamily f) {
    switch (f) {
        case CutFamily::Triangle: return "triangle";
        case CutFamily::TwoPartition: return "2-partition";
        case CutFamily::WeightCover: return "weight-cover";
        case CutFamily::WeightLower: return "weight-lowerbound";
        default: return "weight-upperbound";
    }
}

double Cut::lhs_at(std::span<const double> x) const {
    double v = 0.0;
    for (std::size_t t = 0; t < cols.size(); ++t) v += coefs[t] * x[cols[t]];
    return v;
}

Cut make_two_partition_cut(const EdgeVarMap& vars, int v, std::span<const int> T,
                           std::span<const double> x) {
    Cut cut;
    cut.family = CutFamily::TwoPartition;
    cut.rel = Relation::LE;
    cut.rhs = 1.0;
    for (int j : T) {
        cut.cols.push_back(vars.col(v, j));
        cut.coefs.push_back(1.0);
    }
    for (std::size_t a = 0; a < T.size(); ++a)
        for (std::size_t b = a + 1; b < T.size(); ++b) {
            cut.cols.push_back(vars.col(T[a], T[b]));
            cut.coefs.push_back(-1.0);
        }
    cut.violation = cut.lhs_at(x) - cut.rhs;
    cut.support.push_back(v);
    cut.support.insert(cut.support.end(), T.begin(), T.end());
    return cut;
}

Cut make_weight_cover_cut(const Instance& inst, const EdgeVarMap& vars, std::span<const int> T,
                          std::span<const double> x) {
    double wT = 0.0;
    for (int t : T) wT += inst.weights[t];
    if (wT <= inst.wu) throw std::invalid_argument("weight-cover cut needs w(T) > wu");
    Cut cut;
    cut.family = CutFamily::WeightCover;
    cut.rel = Relation::LE;
    double sz = static_cast<double>(T.size());
    cut.rhs = (sz - 1.0) * (sz - 2.0) / 2.0;
    for (std::size_t a = 0; a < T.size(); ++a)
        for (std::size_t b = a + 1; b < T.size(); ++b) {
            cut.cols.push_back(vars.col(T[a], T[b]));
            cut.coefs.push_back(1.0);
        }
    cut.violation = cut.lhs_at(x) - cut.rhs;
    cut.support.assign(T.begin(), T.end());
    return cut;
}

Cut make_weight_lower_cut(const Instance& inst, const EdgeVarMap& vars, std::span<const int> T,
                          int anchor, std::span<const double> x) {
    double wT = 0.0;
    std::vector<char> in_T(inst.n, 0);
    for (int t : T) {
        wT += inst.weights[t];
        in_T[t] = 1;
    }
    if (wT <= inst.wl) throw std::invalid_argument("weight-lowerbound cut needs w(T) > wl");
    double r = wT - inst.wl;
    Cut cut;
    cut.family = CutFamily::WeightLower;
    cut.rel = Relation::GE;
    cut.rhs = wT - inst.weights[anchor];
    for (int j = 0; j < inst.n; ++j) {
        if (j == anchor) continue;
        double c = in_T[j] ? inst.weights[j] : inst.weights[j] + r;
        if (c == 0.0) continue;
        cut.cols.push_back(vars.col(anchor, j));
        cut.coefs.push_back(c);
    }
    cut.violation = cut.rhs - cut.lhs_at(x);
    cut.support.push_back(anchor);
    cut.support.insert(cut.support.end(), T.begin(), T.end());
    return cut;
}

Cut make_weight_upper_cut(const Instance& inst, const EdgeVarMap& vars, std::span<const int> T,
                          int anchor, std::span<const double> x) {
    double wT = 0.0;
    std::vector<char> in_T(inst.n, 0);
    for (int t : T) {
        wT += inst.weights[t];
        in_T[t] = 1;
    }
    if (wT >= inst.wu) throw std::invalid_argument("weight-upperbound cut needs w(T) < wu");
    double r = inst.wu - wT;
    Cut cut;
    cut.family = CutFamily::WeightUpper;
    cut.rel = Relation::LE;
    cut.rhs = wT - inst.weights[anchor];
    bool s_nonempty = false;
    for (int j = 0; j < inst.n; ++j) {
        if (j == anchor) continue;
        if (in_T[j]) {
            if (inst.weights[j] == 0.0) continue;
            cut.cols.push_back(vars.col(anchor, j));
            cut.coefs.push_back(inst.weights[j]);
        } else if (inst.weights[j] > r) {
            s_nonempty = true;
            cut.cols.push_back(vars.col(anchor, j));
            cut.coefs.push_back(inst.weights[j] - r);
        }
    }
    if (!s_nonempty) throw std::invalid_argument("weight-upperbound cut needs nonempty S");
    cut.violation = cut.lhs_at(x) - cut.rhs;
    cut.support.push_back(anchor);
    cut.support.insert(cut.support.end(), T.begin(), T.end());
    return cut;
}

// ---- separators -----------------------------------------------------------

std::vector<Cut> separate_two_partition(const EdgeVarMap& vars, std::span<const double> x,
                                        SplitMix64& rng, double min_violation) {
    std::vector<Cut> cuts;
    int n = vars.n;
    std::vector<int> W;
    std::vector<char> in_F(n, 0);
    std::vector<int> pool;
    for (int v = 0; v < n; ++v) {
        W.clear();
        for (int u = 0; u < n; ++u) {
            if (u == v) continue;
            double xv = x[vars.col(u, v)];
            if (std::fabs(xv - std::round(xv)) > kIntTol) W.push_back(u);
        }
        if (static_cast<int>(W.size()) <= 4) continue;
        std::fill(in_F.begin(), in_F.end(), 0);
        for (int trial = 0; trial < 5; ++trial) {
            pool.clear();
            for (int u : W)
                if (!in_F[u]) pool.push_back(u);
            if (pool.size() < 2) break;
            // Fisher-Yates, draws from the shared stream
            for (int i = static_cast<int>(pool.size()) - 1; i > 0; --i) {
                int j = static_cast<int>(rng.uniform_int(0, i));
                std::swap(pool[i], pool[j]);
            }
            std::vector<int> T = {pool[0], pool[1]};
            for (std::size_t p = 2; p < pool.size(); ++p) {
                int r = pool[p];
                double gain = x[vars.col(r, v)];
                for (int t : T) gain -= x[vars.col(r, t)];
                if (gain > 0.0) T.push_back(r);
            }
            Cut cut = make_two_partition_cut(vars, v, T, x);
            if (cut.violation >= min_violation) cuts.push_back(std::move(cut));
            for (int t : T) in_F[t] = 1;
        }
    }
    return cuts;
}

namespace {

bool cover_minimal(const Instance& inst, const std::vector<int>& T, double wT) {
    double min_w = kInf;
    for (int t : T) min_w = std::min(min_w, inst.weights[t]);
    return wT - min_w <= inst.wu;
}

}  // namespace

std::vector<Cut> separate_weight_cover(const Instance& inst, const EdgeVarMap& vars,
                                       std::span<const double> x, double min_violation,
                                       bool exhaustive) {
    std::vector<Cut> cuts;
    std::set<std::vector<int>> seen;

    auto try_T = [&](std::vector<int> T) {
        std::sort(T.begin(), T.end());
        double wT = 0.0;
        for (int t : T) wT += inst.weights[t];
        if (wT <= inst.wu) return;
        if (!cover_minimal(inst, T, wT)) return;
        if (!seen.insert(T).second) return;
        Cut cut = make_weight_cover_cut(inst, vars, T, x);
        if (cut.violation >= min_violation) cuts.push_back(std::move(cut));
    };

    if (exhaustive) {
        // depth-first over increasing node ids; a set already over the limit
        // is never extended (supersets cannot be minimal)
        std::vector<int> T;
        auto rec = [&](auto&& self, int next, double sum) -> void {
            if (sum > inst.wu) {
                if (T.size() >= 3) try_T(T);
                return;
            }
            for (int v = next; v < inst.n; ++v) {
                T.push_back(v);
                self(self, v + 1, sum + inst.weights[v]);
                T.pop_back();
            }
        };
        rec(rec, 0, 0.0);
        return cuts;
    }

    // order nodes by q(i) = w_i + sum_j w_j x_ij, highest first
    int n = inst.n;
    std::vector<double> q(n, 0.0);
    for (int i = 0; i < n; ++i) {
        q[i] = inst.weights[i];
        for (int j = 0; j < n; ++j)
            if (j != i) q[i] += inst.weights[j] * x[vars.col(i, j)];
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return q[a] > q[b]; });

    for (int t = 4; t <= 5; ++t) {
        int top = std::min(t + 2, n);
        std::vector<int> head(order.begin(), order.begin() + top);
        // (t-2)-subsets of the head
        std::vector<int> sel(t - 2);
        auto comb = [&](auto&& self, int start, int depth) -> void {
            if (depth == t - 2) {
                std::vector<char> used(n, 0);
                for (int s : sel) used[s] = 1;
                for (int a = 0; a < n; ++a) {
                    if (used[a]) continue;
                    for (int b = a + 1; b < n; ++b) {
                        if (used[b]) continue;
                        std::vector<int> T(sel.begin(), sel.end());
                        T.push_back(a);
                        T.push_back(b);
                        try_T(std::move(T));
                    }
                }
                return;
            }
            for (int p = start; p < top; ++p) {
                sel[depth] = head[p];
                self(self, p + 1, depth + 1);
            }
        };
        comb(comb, 0, 0);
    }
    return cuts;
}

WeightBoundResult separate_weight_bounds_exhaustive(const Instance& inst, const EdgeVarMap& vars,
                                                    std::span<const double> x,
                                                    WeightBoundFamily family,
                                                    const WeightBoundLimits& limits) {
    if (inst.n > limits.max_n)
        throw std::invalid_argument("weight-bound separation: instance above size limit");
    WeightBoundResult res;
    SizeBounds sb = size_bounds(inst);
    int lo = std::max(1, sb.floor_size - 1);
    int hi = family == WeightBoundFamily::Lower ? sb.floor_size : sb.ceil_size;
    long long examined = 0;

    std::vector<int> T;
    auto emit_for_T = [&](double wT) {
        if (family == WeightBoundFamily::Lower) {
            if (wT <= inst.wl) return;
            for (int anchor : T) {
                Cut cut = make_weight_lower_cut(inst, vars, T, anchor, x);
                if (cut.violation >= 0.01 * wT && static_cast<int>(res.cuts.size()) < limits.max_cuts)
                    res.cuts.push_back(std::move(cut));
            }
        } else {
            if (wT >= inst.wu) return;
            double r = inst.wu - wT;
            bool has_S = false;
            std::vector<char> in_T(inst.n, 0);
            for (int t : T) in_T[t] = 1;
            for (int j = 0; j < inst.n && !has_S; ++j)
                if (!in_T[j] && inst.weights[j] > r) has_S = true;
            if (!has_S) return;
            for (int anchor : T) {
                Cut cut = make_weight_upper_cut(inst, vars, T, anchor, x);
                if (cut.violation >= 0.01 * wT && static_cast<int>(res.cuts.size()) < limits.max_cuts)
                    res.cuts.push_back(std::move(cut));
            }
        }
    };

    auto rec = [&](auto&& self, int next, double sum) -> void {
        if (res.budget_exhausted) return;
        if (++examined > limits.max_subsets) {
            res.budget_exhausted = true;
            return;
        }
        int sz = static_cast<int>(T.size());
        if (sz >= lo && sz <= hi) emit_for_T(sum);
        if (sz == hi) return;
        for (int v = next; v < inst.n; ++v) {
            T.push_back(v);
            self(self, v + 1, sum + inst.weights[v]);
            T.pop_back();
            if (res.budget_exhausted) return;
        }
    };
    rec(rec, 0, 0.0);
    return res;
}

}  // namespace balpart

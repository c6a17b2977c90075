#include "balpart/solution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace balpart {

Partition Partition::from_assign(const Instance& inst, std::vector<int> assign) {
    if (static_cast<int>(assign.size()) != inst.n)
        throw std::invalid_argument("partition: assign size mismatch");
    SizeBounds sb = size_bounds(inst);
    Partition p;
    p.assign_ = std::move(assign);
    p.class_nodes_.assign(inst.k, {});
    p.class_weight_.assign(inst.k, 0.0);
    p.floor_size_ = sb.floor_size;
    for (int v = 0; v < inst.n; ++v) {
        int c = p.assign_[v];
        if (c < 0 || c >= inst.k) throw std::invalid_argument("partition: class out of range");
        p.class_nodes_[c].push_back(v);
        p.class_weight_[c] += inst.weights[v];
    }
    int big = 0;
    for (int c = 0; c < inst.k; ++c) {
        int s = p.size_of(c);
        if (s != sb.floor_size && s != sb.ceil_size)
            throw std::invalid_argument("partition: unbalanced class sizes");
        if (s == sb.floor_size + 1) ++big;
    }
    if (big != sb.big_classes)
        throw std::invalid_argument("partition: wrong number of large classes");
    return p;
}

std::vector<int> Partition::large_classes() const {
    std::vector<int> out;
    for (int c = 0; c < k(); ++c)
        if (size_of(c) == floor_size_ + 1) out.push_back(c);
    return out;
}

std::vector<int> Partition::small_classes() const {
    std::vector<int> out;
    for (int c = 0; c < k(); ++c)
        if (size_of(c) == floor_size_) out.push_back(c);
    return out;
}

void Partition::move_node(const Instance& inst, int v, int to) {
    int from = assign_[v];
    auto& src = class_nodes_[from];
    src.erase(std::find(src.begin(), src.end(), v));
    class_nodes_[to].push_back(v);
    class_weight_[from] -= inst.weights[v];
    class_weight_[to] += inst.weights[v];
    assign_[v] = to;
}

void Partition::swap_nodes(const Instance& inst, int v, int u) {
    int cv = assign_[v], cu = assign_[u];
    *std::find(class_nodes_[cv].begin(), class_nodes_[cv].end(), v) = u;
    *std::find(class_nodes_[cu].begin(), class_nodes_[cu].end(), u) = v;
    class_weight_[cv] += inst.weights[u] - inst.weights[v];
    class_weight_[cu] += inst.weights[v] - inst.weights[u];
    assign_[v] = cu;
    assign_[u] = cv;
}

Evaluation evaluate(const Instance& inst, const Partition& p) {
    if (p.n() != inst.n || p.k() != inst.k)
        throw std::invalid_argument("evaluate: partition does not match instance");
    Evaluation ev;
    for (int i = 0; i < inst.n; ++i)
        for (int j = i + 1; j < inst.n; ++j)
            if (p.class_of(i) == p.class_of(j)) {
                if (inst.is_forbidden(i, j))
                    ++ev.forbidden_hits;
                else
                    ev.d += inst.d(i, j);
            }
    for (int c = 0; c < inst.k; ++c) {
        double w = p.weight_of(c);
        if (w < inst.wl - kWeightTol || w > inst.wu + kWeightTol)
            ev.infeasible_classes.push_back(c);
    }
    ev.f = ev.d + kPenalty * (static_cast<double>(ev.infeasible_classes.size()) + ev.forbidden_hits);
    return ev;
}

Partition initial_partition(const Instance& inst) {
    std::vector<int> assign(inst.n);
    for (int v = 0; v < inst.n; ++v) assign[v] = v % inst.k;
    return Partition::from_assign(inst, std::move(assign));
}

std::vector<double> to_incidence(const Partition& p) {
    int n = p.n();
    std::vector<double> x(edge_count(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (p.class_of(i) == p.class_of(j)) x[edge_index(i, j, n)] = 1.0;
    return x;
}

}  // namespace balpart

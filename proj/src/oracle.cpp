#include "balpart/oracle.hpp"

#include <stdexcept>

namespace balpart {

namespace {

struct Enumerator {
    const Instance& inst;
    SizeBounds sb;
    const PartitionVisitor& visitor;
    EnumerationResult result;

    // open classes: capacity and members; node v is placed into an existing
    // class with room or opens a new class (one branch per distinct remaining
    // capacity), which dedups class relabelings.
    std::vector<int> caps;
    std::vector<std::vector<int>> members;
    std::vector<int> assign;

    Enumerator(const Instance& i, const PartitionVisitor& vis)
        : inst(i), sb(size_bounds(i)), visitor(vis) {
        assign.assign(inst.n, -1);
    }

    void emit() {
        ++result.enumerated_count;
        Partition p = Partition::from_assign(inst, assign);
        Evaluation ev = evaluate(inst, p);
        if (!ev.feasible()) return;
        ++result.feasible_count;
        if (visitor) visitor(p, ev);
        if (ev.d < result.optimum - kWeightTol) {
            result.optimum = ev.d;
            result.optimal_assigns.clear();
        }
        if (ev.d <= result.optimum + kWeightTol) result.optimal_assigns.push_back(assign);
    }

    void rec(int v) {
        if (v == inst.n) {
            if (static_cast<int>(caps.size()) == inst.k) emit();
            return;
        }
        for (std::size_t c = 0; c < caps.size(); ++c) {
            if (static_cast<int>(members[c].size()) < caps[c]) {
                members[c].push_back(v);
                assign[v] = static_cast<int>(c);
                rec(v + 1);
                members[c].pop_back();
            }
        }
        if (static_cast<int>(caps.size()) < inst.k) {
            int big_open = 0;
            for (int c : caps)
                if (c == sb.ceil_size) ++big_open;
            int small_open = static_cast<int>(caps.size()) - big_open;
            if (sb.big_classes > 0 && sb.ceil_size != sb.floor_size) {
                if (big_open < sb.big_classes) open_class(v, sb.ceil_size);
                if (small_open < inst.k - sb.big_classes) open_class(v, sb.floor_size);
            } else {
                open_class(v, sb.floor_size);
            }
        }
        assign[v] = -1;
    }

    void open_class(int v, int cap) {
        caps.push_back(cap);
        members.push_back({v});
        assign[v] = static_cast<int>(caps.size()) - 1;
        rec(v + 1);
        caps.pop_back();
        members.pop_back();
    }
};

}  // namespace

EnumerationResult enumerate_partitions(const Instance& inst, const PartitionVisitor& visitor,
                                       int cap) {
    if (inst.n > cap) throw std::invalid_argument("enumerate_partitions: n exceeds cap");
    Enumerator e(inst, visitor);
    e.rec(0);
    return std::move(e.result);
}

std::optional<std::pair<double, Partition>> oracle_optimum(const Instance& inst, int cap) {
    EnumerationResult res = enumerate_partitions(inst, nullptr, cap);
    if (!res.feasible()) return std::nullopt;
    Partition p = Partition::from_assign(inst, res.optimal_assigns.front());
    return std::make_pair(res.optimum, std::move(p));
}

}  // namespace balpart

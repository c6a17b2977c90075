#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "balpart/solution.hpp"

namespace balpart {

// Exhaustive enumeration of balanced k-partitions for small n; ground truth
// for optimality and cut validity.
struct EnumerationResult {
    double optimum = kInf;
    // Every optimal assignment, canonically labeled (classes ordered by their
    // smallest member; large classes and small classes distinguishable only
    // through their sizes).
    std::vector<std::vector<int>> optimal_assigns;
    long long feasible_count = 0;
    long long enumerated_count = 0;

    bool feasible() const { return feasible_count > 0; }
};

using PartitionVisitor = std::function<void(const Partition&, const Evaluation&)>;

// Visits every balanced partition once (canonical labeling), applies the
// weight-window and forbidden-pair filters, and calls the visitor on each
// feasible one.  Throws when n exceeds `cap`.
EnumerationResult enumerate_partitions(const Instance& inst,
                                       const PartitionVisitor& visitor = nullptr,
                                       int cap = 13);

// Minimum of evaluate(.).d over feasible partitions, with one witness;
// nullopt when no feasible partition exists.
std::optional<std::pair<double, Partition>> oracle_optimum(const Instance& inst, int cap = 13);

}  // namespace balpart

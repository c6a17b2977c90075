#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "balpart/solution.hpp"

namespace balpart {

// Iteration budget fitted to instance size: floor(exp(0.26571*n - 0.052978)),
// evaluated in IEEE double precision.
long long iteration_limit(int n);

// Move descriptors for the two neighborhood schemes.
struct OneMove {
    int v;     // moved node
    int from;  // its class (in R+)
    int to;    // destination class (in R-)
};
struct TwoExchange {
    int v;  // node of the lower-indexed pair position (v < u)
    int u;
};

// All 1-moves of a partition: every (v in a large class, destination small
// class).  Empty when k divides n.  Order: v ascending, then destination
// class ascending.
std::vector<OneMove> one_move_neighbors(const Partition& p);

// All 2-exchanges: node pairs in different classes, (v,u) with v < u,
// ascending lexicographic.
std::vector<TwoExchange> two_exchange_neighbors(const Partition& p);

struct TabuImprovement {
    long long iter;
    double f;
};

struct TabuOptions {
    long long it_limit = -1;  // -1: use iteration_limit(n)
    std::uint64_t seed = 1;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct TabuResult {
    Partition best;
    Evaluation best_eval;
    std::vector<TabuImprovement> improvements;  // iteration of each best update
    long long iterations = 0;                   // iterations actually run
    long long stage1_iterations = 0;            // iterations whose tenure came from [5,40]
};

// Two-stage tabu search.  Stage is decided each iteration from the f-value of
// the solution just reached: f >= kPenalty draws tenures from [5,40], else
// from [5,20].  The move feature (node, origin class) is stored on the tabu
// list; a candidate is tabu when any (node, destination class) feature it
// creates is active, and tabu candidates are admissible only when they beat
// the best solution found so far.  Per iteration the full neighborhood
// (1-moves, then 2-exchanges) is scanned and the admissible candidate with
// the lowest f wins, first seen on ties.  RNG draw order: one tenure per
// stored feature, after the move is applied ((v, origin_v) first, then
// (u, origin_u) for exchanges), from a single SplitMix64 stream.
TabuResult tabu_search(const Instance& inst, const TabuOptions& opts);

}  // namespace balpart

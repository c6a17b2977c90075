#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "balpart/common.hpp"

namespace balpart {

// A problem instance: complete weighted graph, number of classes k, per-class
// weight window [wl, wu], and pairs forbidden from sharing a class.  Dummy
// nodes (weight 0, distance 0 to everything) may be appended by add_dummies
// to make k divide n.
struct Instance {
    int n = 0;
    int k = 0;
    std::vector<double> weights;               // size n
    std::vector<double> dist;                  // n*n row-major, symmetric, zero diagonal
    std::vector<std::pair<int, int>> forbidden;  // unordered pairs, stored i<j, sorted
    double wl = 0.0;
    double wu = 0.0;
    int dummy_count = 0;

    double d(int i, int j) const { return dist[static_cast<std::size_t>(i) * n + j]; }
    void set_d(int i, int j, double v) {
        dist[static_cast<std::size_t>(i) * n + j] = v;
        dist[static_cast<std::size_t>(j) * n + i] = v;
    }
    bool is_forbidden(int i, int j) const;
    double total_weight() const;
    bool is_dummy(int v) const { return v >= n - dummy_count; }

    // Throws std::invalid_argument when an invariant fails.
    void validate() const;
};

// Class-size data implied by (n, k).
struct SizeBounds {
    int floor_size = 0;   // F_L = floor(n/k)
    int ceil_size = 0;    // F_U = ceil(n/k)
    int big_classes = 0;  // r = n mod k, number of classes of size F_U
    long long intra_edges = 0;  // exact intra-class edge count of any balanced partition
};

SizeBounds size_bounds(int n, int k);
inline SizeBounds size_bounds(const Instance& inst) { return size_bounds(inst.n, inst.k); }

// Random instance: coordinates uniform in [-100,100]^2, Euclidean distances,
// weights uniform in [0.1, 0.9], weight window mu*(n/k) -/+ sigma where mu and
// sigma are the mean and population standard deviation of the drawn weights.
// Draw order: x0,y0,x1,y1,...,x_{n-1},y_{n-1}, then w0..w_{n-1}, all from one
// SplitMix64 stream seeded with `seed`.
Instance generate_random(int n, int k, std::uint64_t seed);

// Necessary (not sufficient) feasibility condition:
//   max{2, ceil(sum w / wu)} <= k <= min{floor(n/2), floor(sum w / wl)}
// with wl = 0 making the right-hand weight term +infinity.
bool check_necessary_feasibility(const Instance& inst);

// Appends k - (n mod k) zero-weight, zero-distance nodes and forbids all
// dummy-dummy pairs.  Requires n mod k != 0.
Instance add_dummies(const Instance& inst);

}  // namespace balpart

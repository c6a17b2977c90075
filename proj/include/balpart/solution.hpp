#pragma once

#include <vector>

#include "balpart/instance.hpp"

namespace balpart {

// A balanced k-partition with cached class weights.  Class sizes always lie
// in {floor(n/k), ceil(n/k)} with exactly n mod k classes of the larger size.
class Partition {
  public:
    Partition() = default;

    // Validates balance; throws std::invalid_argument otherwise.
    static Partition from_assign(const Instance& inst, std::vector<int> assign);

    int n() const { return static_cast<int>(assign_.size()); }
    int k() const { return static_cast<int>(class_nodes_.size()); }
    int class_of(int v) const { return assign_[v]; }
    const std::vector<int>& assign() const { return assign_; }
    const std::vector<int>& nodes_of(int c) const { return class_nodes_[c]; }
    double weight_of(int c) const { return class_weight_[c]; }
    int size_of(int c) const { return static_cast<int>(class_nodes_[c].size()); }

    // Classes of size floor(n/k)+1 (R+) and floor(n/k) (R-), ascending ids.
    // When k divides n every class lands in R-.
    std::vector<int> large_classes() const;
    std::vector<int> small_classes() const;

    // Moves node v to class `to`, maintaining the caches.  The caller is
    // responsible for keeping the result balanced (1-move semantics).
    void move_node(const Instance& inst, int v, int to);
    // Swaps the classes of v and u (2-exchange semantics).
    void swap_nodes(const Instance& inst, int v, int u);

  private:
    std::vector<int> assign_;
    std::vector<std::vector<int>> class_nodes_;
    std::vector<double> class_weight_;
    int floor_size_ = 0;
};

// Objective breakdown of a partition.
//   d:              total intra-class distance over non-forbidden pairs
//   forbidden_hits: intra-class forbidden pairs, each penalized by kPenalty
//   infeasible_classes: classes whose weight leaves [wl, wu] (1e-9 tolerance)
//   f = d + kPenalty * (|infeasible_classes| + forbidden_hits)
struct Evaluation {
    double d = 0.0;
    std::vector<int> infeasible_classes;
    int forbidden_hits = 0;
    double f = 0.0;

    bool feasible() const { return infeasible_classes.empty() && forbidden_hits == 0; }
};

Evaluation evaluate(const Instance& inst, const Partition& p);

// Round-robin start: node v (0-based) goes to class v mod k.
Partition initial_partition(const Instance& inst);

// 0/1 vector over the edge-variable index space (see edge_index); the number
// of ones equals size_bounds().intra_edges.
std::vector<double> to_incidence(const Partition& p);

}  // namespace balpart

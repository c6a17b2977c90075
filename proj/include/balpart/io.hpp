#pragma once

#include <string>

#include "balpart/instance.hpp"
#include "balpart/solution.hpp"

namespace balpart {

// Instance files are JSON documents with exactly these fields:
//   n (int), k (int), wl (real), wu (real), weights (array of n reals),
//   one of:
//     coords : array of n [x,y] pairs (distances become Euclidean), or
//     dist   : row-major lower triangle [d(1,0), d(2,0), d(2,1), d(3,0), ...]
//   forbidden   : optional array of [i,j] pairs (default [])
//   dummy_count : optional int (default 0)
// Unknown fields are rejected.
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);
Instance instance_from_json_text(const std::string& text);
std::string instance_to_json_text(const Instance& inst);

// Partition files list class membership plus the evaluation summary:
//   classes (array of k arrays of node ids),
//   class_weights, d, f, infeasible_classes, forbidden_hits.
// Only "classes" is read back; the summary fields are recomputed.
void save_partition(const Instance& inst, const Partition& p, const Evaluation& ev,
                    const std::string& path);
Partition load_partition(const Instance& inst, const std::string& path);

}  // namespace balpart

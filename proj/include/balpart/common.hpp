#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace balpart {

// Penalty weight M used by the heuristic objective and the forbidden-edge
// reduction of the generalized problem.
inline constexpr double kPenalty = 10000.0;

// LP feasibility / reduced-cost tolerance.
inline constexpr double kFeasTol = 1e-7;
// A variable counts as integral when within this distance of an integer.
inline constexpr double kIntTol = 1e-6;
// Tolerance for weight / objective comparisons on instance data.
inline constexpr double kWeightTol = 1e-9;
// Minimum violation for a fractional cut to be worth adding.
inline constexpr double kMinCutViolation = 0.1;

inline constexpr double kInf = 1e30;

// Number of unordered node pairs.
inline constexpr std::size_t edge_count(int n) {
    return static_cast<std::size_t>(n) * (n - 1) / 2;
}

// Lexicographic index of the pair {i,j}, i < j, over n nodes:
// (0,1) -> 0, (0,2) -> 1, ..., (n-2,n-1) -> n(n-1)/2 - 1.
inline int edge_index(int i, int j, int n) {
    if (i > j) std::swap(i, j);
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

// Inverse of edge_index.
inline std::pair<int, int> edge_nodes(int idx, int n) {
    int i = 0;
    int row = n - 1;
    while (idx >= row) {
        idx -= row;
        --row;
        ++i;
    }
    return {i, i + 1 + idx};
}

}  // namespace balpart

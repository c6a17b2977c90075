#pragma once

#include <span>
#include <vector>

#include "balpart/model.hpp"
#include "balpart/rng.hpp"

namespace balpart {

enum class CutFamily : std::uint8_t {
    Triangle,
    TwoPartition,
    WeightCover,
    WeightLower,
    WeightUpper,
};

const char* cut_family_name(CutFamily f);

struct Cut {
    CutFamily family;
    std::vector<int> cols;
    std::vector<double> coefs;
    Relation rel = Relation::LE;
    double rhs = 0.0;
    double violation = 0.0;  // at the point that produced the cut
    // TwoPartition: [v, T...]; WeightLower/Upper: [anchor, T...]; WeightCover: T.
    std::vector<int> support;

    LpRow row() const { return LpRow{cols, coefs, rel, rhs}; }
    double lhs_at(std::span<const double> x) const;
};

// ---- inequality templates (evaluated at x, no filters applied) -----------

// sum_{j in T} x_vj - sum_{pairs in T} x <= 1  (the |S|=1 case).
Cut make_two_partition_cut(const EdgeVarMap& vars, int v, std::span<const int> T,
                           std::span<const double> x);

// sum_{pairs in T} x <= (|T|-1)(|T|-2)/2, requires w(T) > wu.
Cut make_weight_cover_cut(const Instance& inst, const EdgeVarMap& vars, std::span<const int> T,
                          std::span<const double> x);

// w_i + sum_{j in T\{i}} w_j x_ij + sum_{j not in T} (w_j + r) x_ij >= w(T),
// r = w(T) - wl; requires w(T) > wl.  The constant w_i is folded into rhs.
Cut make_weight_lower_cut(const Instance& inst, const EdgeVarMap& vars, std::span<const int> T,
                          int anchor, std::span<const double> x);

// w_i + sum_{j in T\{i}} w_j x_ij + sum_{j in S} (w_j - r) x_ij <= w(T),
// r = wu - w(T), S = {j not in T : w_j > r}; requires w(T) < wu and S != {}.
Cut make_weight_upper_cut(const Instance& inst, const EdgeVarMap& vars, std::span<const int> T,
                          int anchor, std::span<const double> x);

// ---- separation procedures -------------------------------------------------

// Heuristic 2-partition separation.  For each node v: collect the fractional
// neighborhood W = {u : x_uv not within 1e-6 of an integer}; skip v when
// |W| <= 4; otherwise run 5 seeded trials, each picking two random nodes of
// W minus the forbidden set F as T, greedily adding r with
// x_rv - sum_{t in T} x_rt > 0 (single pass in shuffled order), emitting the
// cut when violated by at least min_violation, and always merging T into F.
std::vector<Cut> separate_two_partition(const EdgeVarMap& vars, std::span<const double> x,
                                        SplitMix64& rng, double min_violation = kMinCutViolation);

// Structured weight-cover separation: nodes ordered by
// q(i) = w_i + sum_j w_j x_ij descending; for t in {4,5} every T of t-2 nodes
// from the top t+2 plus 2 further nodes is screened for w(T) > wu and
// minimality (w(T\{l}) <= wu for every l) before the violation test.
// The exhaustive variant enumerates every minimal cover with |T| >= 3
// instead, which drops the {4,5} size restriction.
std::vector<Cut> separate_weight_cover(const Instance& inst, const EdgeVarMap& vars,
                                       std::span<const double> x,
                                       double min_violation = kMinCutViolation,
                                       bool exhaustive = false);

enum class WeightBoundFamily : std::uint8_t { Lower, Upper };

struct WeightBoundLimits {
    int max_n = 24;                      // refuse larger instances outright
    long long max_subsets = 5'000'000;   // enumeration budget
    int max_cuts = 1 << 20;
};

struct WeightBoundResult {
    std::vector<Cut> cuts;
    bool budget_exhausted = false;
};

// Exhaustive weight-bound separation.  Lower enumerates T with w(T) > wl and
// F_L - 1 <= |T| <= F_L; Upper enumerates T with w(T) < wu, nonempty
// S = {j not in T : w_j > wu - w(T)} and F_L - 1 <= |T| <= F_U.  A cut is
// kept when violated by at least 1% of its right-hand side w(T).
WeightBoundResult separate_weight_bounds_exhaustive(const Instance& inst, const EdgeVarMap& vars,
                                                    std::span<const double> x,
                                                    WeightBoundFamily family,
                                                    const WeightBoundLimits& limits = {});

}  // namespace balpart

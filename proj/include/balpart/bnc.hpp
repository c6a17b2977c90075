#pragma once

#include <functional>
#include <optional>
#include <string>

#include "balpart/cuts.hpp"
#include "balpart/model.hpp"
#include "balpart/oracle.hpp"
#include "balpart/tabu.hpp"

namespace balpart {

// A solver configuration.  The named ladder:
//   s1: F1 (dummy completion), every triangle row materialized, no custom
//       separation, no warm start
//   s2: F2, same row policy
//   s3: s2 plus the tabu warm start
//   s4: s3 with only deciles 1-2 materialized and the rest handled as
//       cuts / lazy constraints on demand
//   s5: s4 plus the 2-partition and weight-cover separation routines
// Suffixes "+2part", "+wcover", "+wlower", "+wupper" toggle single families,
// e.g. "s4+wcover".
struct Strategy {
    std::string name = "s5";
    Formulation formulation = Formulation::F2;
    std::set<int> initial_deciles = {1, 2};
    bool warm_start = true;
    bool sep_two_partition = true;
    bool sep_weight_cover = true;
    bool sep_weight_lower = false;
    bool sep_weight_upper = false;
    int cut_rounds_root = 100;
    int cut_rounds_tree = 20;
};

Strategy make_strategy(const std::string& spec);

enum class SolveStatus : std::uint8_t { Optimal, TimeLimit, Infeasible };

const char* solve_status_name(SolveStatus s);

struct CutCounts {
    long long triangle = 0;       // fractional triangle cuts
    long long lazy_triangle = 0;  // triangle rows added at integer points
    long long two_partition = 0;
    long long weight_cover = 0;
    long long weight_lower = 0;
    long long weight_upper = 0;

    long long total() const {
        return triangle + lazy_triangle + two_partition + weight_cover + weight_lower +
               weight_upper;
    }
};

struct SolveReport {
    SolveStatus status = SolveStatus::Infeasible;
    std::optional<Partition> incumbent;  // original node space
    double objective = kInf;             // incumbent distance total
    double best_bound = -kInf;
    long long nodes = 0;
    CutCounts cuts;
    double wall_seconds = 0.0;
    long long lp_iterations = 0;
    long long tabu_iterations = 0;
    std::string infeasible_reason;

    double gap() const;  // (objective - best_bound) / objective
};

struct SolveOptions {
    std::uint64_t seed = 1;
    double time_limit = kInf;  // seconds
    int threads = 1;
    double log_interval = 5.0;            // seconds between progress lines
    std::ostream* log = nullptr;          // progress sink (nullptr: silent)
    std::ostream* cut_log = nullptr;      // per-cut text log
    // observer for every accepted cut (family, violation, support size, node)
    std::function<void(const Cut&, long long)> cut_observer;
    bool check_invariants = false;  // extra per-node assertions (tests)
};

// Exact branch-and-cut.  Runs the necessary-feasibility check first, applies
// the dummy-node transform for F1 when k does not divide n, optionally warm
// starts from tabu search, and enforces the whole triangle pool lazily at
// integer points.
SolveReport solve(const Instance& inst, const Strategy& strategy, const SolveOptions& opts = {});

// Branching variable: fractional column with value closest to 1/2, ties to
// the lexicographically smallest edge.  Returns -1 when x is integral.
int select_branch_var(std::span<const double> x, double int_tol = kIntTol);

// Decodes an integral, transitivity-feasible point into a partition of the
// original instance (dummy nodes stripped).  Throws std::logic_error with
// diagnostics when the point does not split into k balanced cliques.
Partition decode_incumbent(std::span<const double> x, const Instance& model_inst,
                           const Instance& original);

}  // namespace balpart

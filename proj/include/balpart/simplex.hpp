#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "balpart/common.hpp"

namespace balpart {

enum class Relation : std::uint8_t { LE, EQ, GE };

struct LpRow {
    std::vector<int> cols;
    std::vector<double> coefs;
    Relation rel = Relation::LE;
    double rhs = 0.0;
};

// Dense-bounded LP in minimization form.  Every structural column must carry
// finite bounds.
struct LinearProgram {
    int ncols = 0;
    std::vector<double> obj;
    std::vector<double> lb, ub;
    std::vector<LpRow> rows;

    int add_col(double cost, double lo, double hi) {
        obj.push_back(cost);
        lb.push_back(lo);
        ub.push_back(hi);
        return ncols++;
    }
    void append_row(LpRow r) { rows.push_back(std::move(r)); }
    void set_bounds(int j, double lo, double hi) {
        if (j < 0 || j >= ncols) throw std::out_of_range("set_bounds: bad column");
        lb[j] = lo;
        ub[j] = hi;
    }
    int nrows() const { return static_cast<int>(rows.size()); }
};

// Value-style helpers mirroring the mutating API.
LinearProgram add_rows(const LinearProgram& lp, std::span<const LpRow> rows);
LinearProgram fix_var(const LinearProgram& lp, int j, double value);

enum class LpStatus : std::uint8_t { Optimal, Infeasible };

// Basis descriptor: the variable basic at each row position (structural j in
// [0, ncols), slack of row i as ncols + i) plus the at-upper flags of the
// nonbasic variables.  A basis saved from one LP warm-starts another when the
// row count matches; extend_basis grows it after rows are appended.
struct LpBasis {
    std::vector<std::int32_t> basic_of_row;
    std::vector<std::uint8_t> at_upper;  // indexed by variable id

    bool empty() const { return basic_of_row.empty(); }
};

LpBasis extend_basis(const LpBasis& parent, int ncols, int new_nrows);

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;   // structural values
    std::vector<double> y;   // row duals: objective == y.rhs + sum of bound terms
    std::vector<double> dj;  // structural reduced costs
    LpBasis basis;
    long long iterations = 0;
};

struct SimplexOptions {
    double feas_tol = kFeasTol;
    double opt_tol = kFeasTol;
    int refactor_interval = 100;  // pivots between dense refactorizations
    int bland_after = 100;        // degenerate-pivot streak triggering Bland's rule
    long long max_iterations = 2'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Numerical failure that survived refactorization retries.
class SimplexError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Deadline expiry inside the solve loop.
class SimplexInterrupted : public std::runtime_error {
  public:
    SimplexInterrupted() : std::runtime_error("lp solve interrupted") {}
};

// Bounded-variable primal simplex (phase 1 minimizes the sum of bound
// violations).  Deterministic: Dantzig pricing with smallest-index ties,
// Bland's rule after a configurable degenerate streak.
LpResult solve_lp(const LinearProgram& lp, const LpBasis* warm = nullptr,
                  const SimplexOptions& opts = {});

}  // namespace balpart

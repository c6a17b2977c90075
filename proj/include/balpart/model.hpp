#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "balpart/instance.hpp"
#include "balpart/simplex.hpp"

namespace balpart {

enum class Formulation : std::uint8_t { F1, F2 };

enum class FixReason : std::uint8_t { None, DummyPair, ForbiddenEdge, WeightOverflow };

// Bijection between unordered node pairs and LP columns, with the
// fixed-to-zero bookkeeping (dummy pairs, forbidden edges, and pairs whose
// combined weight exceeds the upper window).
struct EdgeVarMap {
    int n = 0;
    std::vector<FixReason> fix_reason;  // per column

    int cols() const { return static_cast<int>(fix_reason.size()); }
    int col(int i, int j) const { return edge_index(i, j, n); }
    std::pair<int, int> nodes(int col) const { return edge_nodes(col, n); }
    bool fixed(int col) const { return fix_reason[col] != FixReason::None; }
    int active_count() const;
};

// One triangle inequality over the triple i<j<l.
//   type 0:  x_ij + x_jl - x_il <= 1
//   type 1:  x_ij - x_jl + x_il <= 1
//   type 2: -x_ij + x_jl + x_il <= 1
// key is the summed distance of the two positive-coefficient edges; a row is
// redundant when either positive-coefficient variable is fixed to zero.
struct TriRow {
    int i, j, l;
    std::uint8_t type;
    double key;
    int decile;  // 1..10
    bool redundant;
};

struct TriPool {
    std::vector<TriRow> rows;  // ascending (key, i, j, l, type)
};

struct ModelConfig {
    Formulation formulation = Formulation::F2;
    std::set<int> initial_deciles = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double cut_violation_threshold = kMinCutViolation;
    int fractional_decile_limit_root = 10;
    int fractional_decile_limit_tree = 7;
};

struct ModelStats {
    int columns = 0;
    int active_columns = 0;
    int fixed_dummy = 0, fixed_forbidden = 0, fixed_overflow = 0;
    int cardinality_rows = 0, weight_rows = 0, beta_rows = 0;
    int triangle_rows_materialized = 0;
    int triangle_pool_size = 0, triangle_redundant = 0;

    std::string to_text() const;
};

struct Model {
    Instance inst;  // the instance the model is built over (dummy-completed for F1)
    ModelConfig cfg;
    LinearProgram lp;
    EdgeVarMap vars;
    TriPool pool;
    std::vector<char> pool_in_lp;  // materialized at build time
    ModelStats stats;

    LpRow pool_row(int pool_idx) const;
};

// Builds the edge-variable LP relaxation: objective sum d_ij x_ij,
// cardinality rows (equality n/k - 1 when k | n, else the two-sided size
// window), per-node weight rows, the intra-edge-count equality for F2, and
// the triangle rows of the configured deciles (redundant ones skipped).
// F1 requires k | n, i.e. a dummy-completed instance when k does not
// divide n.
Model build_model(const Instance& inst, const ModelConfig& cfg);

enum class SepContext : std::uint8_t { RootFractional, TreeFractional, Integer };

// Pool indices of triangle rows violated at x under the context rule:
// integer points scan deciles 3..10 against the feasibility tolerance;
// fractional points scan deciles 3..m (m = 10 at the root, 7 elsewhere) and
// require a violation of at least cfg.cut_violation_threshold (inclusive).
// Rows already materialized (in_lp) and redundant rows are skipped.
std::vector<int> separate_triangles(const Model& model, const std::vector<char>& in_lp,
                                    std::span<const double> x, SepContext context);

// Writes the complete model (every non-redundant pool row) in LP text
// format, deterministically ordered, with binary variable declarations so
// external MIP solvers can cross-check optima.
void export_lp_file(const Instance& inst, Formulation formulation, const std::string& path);

// Minimal reader for the format export_lp_file writes.
struct ParsedLp {
    std::map<std::string, double> objective;
    struct Row {
        std::string name;
        std::map<std::string, double> terms;
        Relation rel;
        double rhs;
    };
    std::vector<Row> rows;
    std::map<std::string, std::pair<double, double>> bounds;
    std::set<std::string> binaries;
};
ParsedLp read_lp_file(const std::string& path);

}  // namespace balpart

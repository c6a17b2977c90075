#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "balpart/bnc.hpp"

namespace balpart {

// One benchmark cell: an (instance, strategy) run.
struct BenchCell {
    bool ran = false;
    SolveStatus status = SolveStatus::Infeasible;
    double objective = kInf;
    double gap = kInf;  // fraction, not percent
    double seconds = 0.0;
    long long nodes = 0;
    std::string error;

    bool solved() const { return ran && error.empty() && status == SolveStatus::Optimal; }
};

struct BenchInstanceSpec {
    std::string label;
    std::string path;  // instance file; empty: generate
    int n = 0, k = 0;
    std::uint64_t seed = 0;  // generation seed (assigned from master when 0)
};

// Benchmark description file (JSON):
//   instances  : array of {path} or {n, k[, seed]}
//   strategies : array of strategy names ("s1".."s5", suffixes allowed)
//   master_seed: optional (default 1); expands to per-cell seeds
//   time_limit : optional seconds (default 3600)
//   jobs       : optional parallel cells (default 1)
//   out_prefix : optional output path prefix (default "bench")
struct BenchSpec {
    std::vector<BenchInstanceSpec> instances;
    std::vector<std::string> strategies;
    std::uint64_t master_seed = 1;
    double time_limit = 3600.0;
    int jobs = 1;
    std::string out_prefix = "bench";
};

BenchSpec load_bench_spec(const std::string& path);

struct BenchResult {
    BenchSpec spec;
    std::vector<std::vector<BenchCell>> cells;  // [instance][strategy]

    // Aligned text table in the report layout: one row per instance with the
    // optimal value, then nodes/time per strategy (gap% in place of time on
    // timeout).  The closing average row is computed over the instances
    // solved by every strategy whenever some cell failed or timed out, and is
    // then marked with a dagger; the best column average is starred.
    std::string text_table() const;
    // Same numbers, comma-separated.
    std::string csv_table() const;
};

BenchResult run_bench(const BenchSpec& spec, std::ostream* progress = nullptr);

// One machine-readable JSON line describing a finished run; appended by the
// solve subcommand and usable to rebuild bench tables.
std::string run_summary_json(const std::string& instance_label, const std::string& strategy,
                             std::uint64_t seed, const SolveReport& report);

}  // namespace balpart

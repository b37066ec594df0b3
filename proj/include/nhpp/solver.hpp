#pragma once

#include <cstdint>
#include <vector>

#include "nhpp/partition.hpp"

namespace nhpp {

struct SolverConfig {
    int max_evals = 5000;
    double penalty_eps = 1.0;       // initial exterior-penalty parameter
    double penalty_shrink = 0.1;    // applied to eps when stalled infeasible
    int nonmonotone_memory = 4;     // reference window of accepted values
    int initial_step = 2;           // integer line-search step
    std::uint64_t seed = 0;         // direction shuffling
};

struct HistoryEntry {
    int eval_index = 0;
    double objective = 0.0;
    double violation = 0.0;
};

struct SolverRun {
    Partition best;
    EvalResult best_eval;
    std::vector<HistoryEntry> history;
    int evals_used = 0;
    bool converged = false;   // no accepted unit move in a full cycle

    bool feasible() const { return best_eval.feasible; }
};

/// Exterior penalty: f + (1/eps) * total constraint violation.
double penalized_value(const EvalResult& e, double eps);

/// Derivative-free integer search: from the uniform partition, cycles over
/// interior boundaries in shuffled order probing +/- step moves, accepts
/// against the max of the last `nonmonotone_memory` accepted penalized
/// values, doubles the step along an accepted direction while it keeps
/// improving, and shrinks the penalty parameter when stalled at step 1 with
/// an infeasible incumbent. Canonical points are memoized so no partition is
/// evaluated twice; the budget counts distinct evaluations only.
SolverRun solve(const ArrivalDataset& ds, const EmpiricalRate& er, double weight,
                const TestConfig& cfg, const PartitionGrid& grid, const SolverConfig& scfg);

/// Best-of-R restarts with seeds scfg.seed .. scfg.seed + restarts - 1.
SolverRun solve_best_of(const ArrivalDataset& ds, const EmpiricalRate& er, double weight,
                        const TestConfig& cfg, const PartitionGrid& grid,
                        const SolverConfig& scfg, int restarts);

struct BruteForceResult {
    Partition best;
    EvalResult best_eval;
    bool found_feasible = false;
    long evaluated = 0;
};

/// Enumerates every distinct boundary subset on the grid (fewest intervals
/// first, then lexicographic) and returns the minimum-f feasible partition;
/// falls back to the minimum-violation one when none is feasible. Throws if
/// the subset count exceeds `cap`.
BruteForceResult brute_force(const ArrivalDataset& ds, const EmpiricalRate& er, double weight,
                             const TestConfig& cfg, const PartitionGrid& grid,
                             long cap = 2'000'000);

}  // namespace nhpp

#pragma once

#include <Eigen/Core>
#include <vector>

#include "nhpp/arrivals.hpp"
#include "nhpp/empirical.hpp"
#include "nhpp/stat_tests.hpp"

namespace nhpp {

/// Integer grid the partition boundaries live on: `units` grid units per
/// day, at most `max_intervals` intervals, minimum non-collapsed interval
/// length `min_len_units` (>= 1/4 hour).
struct PartitionGrid {
    int units = 24;
    int max_intervals = 24;
    int min_len_units = 1;

    double unit_hours() const { return 24.0 / units; }
    double min_len_hours() const { return min_len_units * unit_hours(); }
    void validate() const;
};

/// Boundary vector of max_intervals + 1 non-decreasing integers in
/// [0, units], first 0 and last `units`. Equal consecutive entries collapse
/// and contribute no interval.
struct Partition {
    Eigen::VectorXi x;

    int boundary_count() const { return static_cast<int>(x.size()); }
    int interval_count() const;
};

/// Clamps entries into [0, units], pins the endpoints, and sorts the
/// interior so any raw integer vector maps to a valid partition.
Partition canonicalize(Eigen::VectorXi raw, const PartitionGrid& grid);

/// The hourly partition x_i = (i-1) * units/24. Requires max_intervals == 24
/// and units divisible by 24.
Partition starting_point(const PartitionGrid& grid);

/// Uniform partition into max_intervals pieces; coincides with
/// starting_point on grids where that one is defined.
Partition uniform_start(const PartitionGrid& grid);

/// Everything measured on one non-collapsed interval.
struct IntervalEval {
    int lo_units = 0, hi_units = 0;
    double start_hours = 0.0, end_hours = 0.0;
    std::vector<long> week_counts;
    long pooled = 0;
    double mean_count = 0.0;          // mu_j
    double rate = 0.0;                // lambda_j, arrivals/hour
    KsResult ks;
    DispersionResult dispersion;
    double g = 0.0;                   // D_j - T(k_j, alpha), 0 when untestable
    double h = 0.0;                   // Ds_j - chi2_{m-1,alpha}, 0 when untestable
    double length_shortfall_hours = 0.0;
    bool untestable = false;
};

struct EvalResult {
    std::vector<IntervalEval> intervals;  // non-collapsed, in order
    double fit_error = 0.0;               // E
    double smoothness = 0.0;              // S
    double weight = 0.0;                  // w
    double objective = 0.0;               // f = E + w * S
    double max_violation = 0.0;           // max_j max(g_j, h_j, 0)
    double total_violation = 0.0;         // sum of positive g, h, length shortfalls, 1 per untestable interval
    bool feasible = false;
};

/// Evaluates counts, rates, both statistical tests, the constraint values
/// and the objective terms of a partition. Requires the empirical grid to
/// refine the partition grid (er.cells % grid.units == 0).
EvalResult evaluate(const Partition& p, const ArrivalDataset& ds, const EmpiricalRate& er,
                    double weight, const TestConfig& cfg, const PartitionGrid& grid);

}  // namespace nhpp

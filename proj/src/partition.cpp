#include "nhpp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nhpp {

void PartitionGrid::validate() const {
    if (max_intervals < 2) throw std::invalid_argument("partition grid: max_intervals must be >= 2");
    if (units < max_intervals)
        throw std::invalid_argument("partition grid: units must be >= max_intervals");
    const int floor_units = std::max(1, (units + 95) / 96);  // keeps min length >= 1/4 hour
    if (min_len_units < floor_units)
        throw std::invalid_argument("partition grid: min_len_units must be >= " +
                                    std::to_string(floor_units) + " on this grid");
}

int Partition::interval_count() const {
    int n = 0;
    for (int i = 0; i + 1 < x.size(); ++i)
        if (x[i + 1] > x[i]) ++n;
    return n;
}

Partition canonicalize(Eigen::VectorXi raw, const PartitionGrid& grid) {
    grid.validate();
    if (raw.size() != grid.max_intervals + 1)
        throw std::invalid_argument("canonicalize: boundary vector must have max_intervals + 1 entries");
    for (int i = 0; i < raw.size(); ++i) raw[i] = std::clamp(raw[i], 0, grid.units);
    raw[0] = 0;
    raw[raw.size() - 1] = grid.units;
    std::sort(raw.begin() + 1, raw.end() - 1);
    return Partition{std::move(raw)};
}

Partition starting_point(const PartitionGrid& grid) {
    grid.validate();
    if (grid.max_intervals != 24 || grid.units % 24 != 0)
        throw std::invalid_argument(
            "starting_point: defined for 24 intervals on a grid divisible by 24");
    return uniform_start(grid);
}

Partition uniform_start(const PartitionGrid& grid) {
    grid.validate();
    Eigen::VectorXi x(grid.max_intervals + 1);
    for (int i = 0; i <= grid.max_intervals; ++i)
        x[i] = int((long(i) * grid.units) / grid.max_intervals);
    return Partition{std::move(x)};
}

EvalResult evaluate(const Partition& p, const ArrivalDataset& ds, const EmpiricalRate& er,
                    double weight, const TestConfig& cfg, const PartitionGrid& grid) {
    grid.validate();
    if (weight < 0.0) throw std::invalid_argument("evaluate: weight must be >= 0");
    if (er.cells % grid.units != 0)
        throw std::invalid_argument("evaluate: empirical cell grid must refine the partition grid");
    if (p.x.size() != grid.max_intervals + 1)
        throw std::invalid_argument("evaluate: partition does not match the grid");
    if (p.x[0] != 0 || p.x[p.x.size() - 1] != grid.units)
        throw std::invalid_argument("evaluate: partition endpoints must be 0 and units");
    for (int i = 0; i + 1 < p.x.size(); ++i)
        if (p.x[i + 1] < p.x[i])
            throw std::invalid_argument("evaluate: boundaries must be non-decreasing");

    const int cells_per_unit = er.cells / grid.units;
    // Interval bounds are derived from the cell grid so counting conventions
    // agree bit-for-bit between fine cells and partition intervals.
    const auto hours_at = [&](int units) { return (units * cells_per_unit) * er.cell_width; };

    EvalResult res;
    res.weight = weight;

    bool any_untestable = false;
    bool lengths_ok = true;
    for (int i = 0; i + 1 < p.x.size(); ++i) {
        const int lo = p.x[i], hi = p.x[i + 1];
        if (hi == lo) continue;  // collapsed pair, contributes nothing

        IntervalEval iv;
        iv.lo_units = lo;
        iv.hi_units = hi;
        iv.start_hours = hours_at(lo);
        iv.end_hours = hours_at(hi);

        WeeklyCounts counts = count_in_interval(ds, iv.start_hours, iv.end_hours);
        iv.week_counts = std::move(counts.per_week);
        iv.pooled = counts.pooled;
        const int m = ds.weeks;
        iv.mean_count = (m > 0) ? double(iv.pooled) / m : 0.0;
        iv.rate = iv.mean_count / (iv.end_hours - iv.start_hours);

        iv.ks = cu_ks_test(ds, iv.start_hours, iv.end_hours, cfg);
        if (m >= 2)
            iv.dispersion = dispersion_test(iv.week_counts, cfg);
        // else: left untestable, one week cannot witness overdispersion

        iv.untestable = iv.ks.untestable() || iv.dispersion.untestable();
        iv.g = iv.ks.untestable() ? 0.0 : iv.ks.d_stat - iv.ks.critical;
        iv.h = iv.dispersion.untestable() ? 0.0 : iv.dispersion.ds_stat - iv.dispersion.critical;

        const int len = hi - lo;
        if (len < grid.min_len_units) {
            iv.length_shortfall_hours = (grid.min_len_units - len) * grid.unit_hours();
            lengths_ok = false;
        }
        any_untestable = any_untestable || iv.untestable;

        res.max_violation = std::max({res.max_violation, iv.g, iv.h});
        res.total_violation += std::max(0.0, iv.g) + std::max(0.0, iv.h) +
                               iv.length_shortfall_hours + (iv.untestable ? 1.0 : 0.0);
        res.intervals.push_back(std::move(iv));
    }

    // Fit error accumulates cell by cell in day order; intervals tile the
    // day, so this is one left-to-right pass over the fine grid.
    double fit = 0.0;
    for (const IntervalEval& iv : res.intervals) {
        const int c0 = iv.lo_units * cells_per_unit;
        const int c1 = iv.hi_units * cells_per_unit;
        for (int c = c0; c < c1; ++c) {
            const double gap = iv.rate - er.rates[c];
            fit += gap * gap;
        }
    }
    res.fit_error = fit;

    double smooth = 0.0;
    for (size_t j = 1; j < res.intervals.size(); ++j) {
        const double jump = res.intervals[j].rate - res.intervals[j - 1].rate;
        smooth += jump * jump;
    }
    res.smoothness = smooth;
    res.objective = res.fit_error + weight * res.smoothness;
    res.feasible = (res.max_violation == 0.0) && lengths_ok && !any_untestable;
    return res;
}

}  // namespace nhpp

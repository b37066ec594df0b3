#pragma once

#include <Eigen/Core>

#include "nhpp/arrivals.hpp"

namespace nhpp {

/// Fine-grid piecewise constant rate model: `cells` uniform cells over
/// [0, 24), rates in arrivals/hour.
struct EmpiricalRate {
    int cells = 96;
    double cell_width = 0.25;
    Eigen::ArrayXd rates;
};

/// Per-cell rate = (mean weekly count in the cell) / cell_width.
EmpiricalRate build_empirical(const ArrivalDataset& ds, int cells = 96);

/// Expected count over a cell-aligned interval [a, b): sum of rate * width
/// over the covered cells. Throws if the bounds are not cell-aligned.
double rate_mass(const EmpiricalRate& er, double a, double b);

}  // namespace nhpp

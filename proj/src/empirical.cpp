#include "nhpp/empirical.hpp"

#include <cmath>
#include <stdexcept>

namespace nhpp {

EmpiricalRate build_empirical(const ArrivalDataset& ds, int cells) {
    if (cells < 1) throw std::invalid_argument("build_empirical: cells must be >= 1");
    EmpiricalRate er;
    er.cells = cells;
    er.cell_width = 24.0 / cells;
    er.rates = Eigen::ArrayXd::Zero(cells);
    if (ds.weeks == 0) return er;
    for (int c = 0; c < cells; ++c) {
        const double a = c * er.cell_width;
        const double b = (c + 1) * er.cell_width;
        const WeeklyCounts counts = count_in_interval(ds, a, b);
        const double mean = double(counts.pooled) / ds.weeks;
        er.rates[c] = mean / er.cell_width;
    }
    return er;
}

namespace {

int cell_index_of(const EmpiricalRate& er, double hours, const char* what) {
    const double idx = hours / er.cell_width;
    const double rounded = std::round(idx);
    if (std::abs(idx - rounded) > 1e-9 || rounded < 0 || rounded > er.cells)
        throw std::invalid_argument(std::string("rate_mass: ") + what +
                                    " is not aligned to the cell grid");
    return int(rounded);
}

}  // namespace

double rate_mass(const EmpiricalRate& er, double a, double b) {
    if (!(0.0 <= a && a < b && b <= 24.0))
        throw std::invalid_argument("rate_mass: need 0 <= a < b <= 24");
    const int ia = cell_index_of(er, a, "lower bound");
    const int ib = cell_index_of(er, b, "upper bound");
    double mass = 0.0;
    for (int c = ia; c < ib; ++c) mass += er.rates[c] * er.cell_width;
    return mass;
}

}  // namespace nhpp

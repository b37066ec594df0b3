#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "nhpp/arrivals.hpp"

namespace nhpp {

struct RateSegment {
    double start_hours = 0.0;
    double end_hours = 0.0;
    double rate_per_hour = 0.0;
};

/// Piecewise constant true rate covering [0, 24) without gaps or overlaps.
struct TrueRate {
    std::vector<RateSegment> segments;

    double max_rate() const;
    double at(double t) const;
    void validate() const;
};

/// Parses "0-12:2,12-24:6" into contiguous segments.
TrueRate parse_segments(std::string_view text);

/// Per-week multiplicative rate factors; identity means no overdispersion.
struct OverdispersionSpec {
    std::vector<double> week_scale;

    static OverdispersionSpec identity(int weeks);
    /// Factors cycle when fewer than `weeks` are given.
    double factor(int week_index) const;
    void validate() const;
};

/// Independent NHPP realization per week by thinning against the maximum
/// segment rate. Deterministic given seed; week lists come out sorted and
/// strictly increasing.
ArrivalDataset generate(const TrueRate& rate, int weeks, const OverdispersionSpec& od,
                        std::uint64_t seed, Weekday weekday = Weekday::tue);

/// Integral of the rate over [a, b), exact for the piecewise constant form.
double expected_count(const TrueRate& rate, double a, double b);

/// Writes the ingest CSV format, assigning week r to the r-th occurrence of
/// the dataset's weekday starting from the first one in 2024. Times are
/// rounded to whole seconds; collisions produced by the rounding are bumped
/// forward one second to keep arrivals one at a time.
void write_arrivals_csv(std::ostream& out, const ArrivalDataset& ds);

}  // namespace nhpp

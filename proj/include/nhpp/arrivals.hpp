#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nhpp {

enum class Weekday { mon = 0, tue, wed, thu, fri, sat, sun };

Weekday parse_weekday(std::string_view name);
std::string to_string(Weekday day);

/// Arrival times for one weekday observed over consecutive weeks.
/// Each week's list holds times-of-day in fractional hours, sorted and
/// strictly increasing within the week, all in [0, 24).
struct ArrivalDataset {
    Weekday weekday = Weekday::tue;
    int weeks = 0;
    std::vector<std::vector<double>> arrivals_by_week;

    long total_count() const;
};

/// Per-week and pooled arrival counts for one interval.
struct WeeklyCounts {
    std::vector<long> per_week;
    long pooled = 0;
};

/// Loads the CSV (header `timestamp`, ISO-8601 `YYYY-MM-DDThh:mm:ss` rows)
/// and keeps the first `weeks` calendar occurrences of `weekday` spanned by
/// the file. Throws on malformed rows, fewer than `weeks` occurrences, or
/// duplicate timestamps within one day (batch arrivals are not admitted).
ArrivalDataset load_arrivals(const std::filesystem::path& path, Weekday weekday, int weeks);

/// Counts arrivals with a <= t < b, per week and pooled. Requires 0 <= a < b <= 24.
WeeklyCounts count_in_interval(const ArrivalDataset& ds, double a, double b);

/// Sorted union over weeks of the arrival times falling in [a, b).
std::vector<double> pooled_times_in_interval(const ArrivalDataset& ds, double a, double b);

}  // namespace nhpp

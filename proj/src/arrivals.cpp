#include "nhpp/arrivals.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace nhpp {

namespace {

constexpr std::array<const char*, 7> weekday_names = {"mon", "tue", "wed", "thu",
                                                      "fri", "sat", "sun"};

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

struct ParsedRow {
    std::chrono::sys_days date;
    int second_of_day = 0;  // 86400 encodes a literal 24:00:00
    double hours = 0.0;
};

// Strict `YYYY-MM-DDThh:mm:ss`; a trailing 24:00:00 is admitted and mapped
// just below 24 hours so it stays inside the same day's [23, 24).
ParsedRow parse_timestamp(std::string_view s, int line_no) {
    auto fail = [&](const std::string& why) -> ParsedRow {
        std::ostringstream msg;
        msg << "malformed timestamp on line " << line_no << ": \"" << std::string(s) << "\" ("
            << why << ")";
        throw std::runtime_error(msg.str());
    };
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
        s[16] != ':')
        return fail("expected YYYY-MM-DDThh:mm:ss");
    const std::string_view y = s.substr(0, 4), mo = s.substr(5, 2), da = s.substr(8, 2),
                           hh = s.substr(11, 2), mi = s.substr(14, 2), ss = s.substr(17, 2);
    for (auto part : {y, mo, da, hh, mi, ss})
        if (!all_digits(part)) return fail("non-digit field");

    const std::chrono::year_month_day ymd{std::chrono::year(to_int(y)),
                                          std::chrono::month(unsigned(to_int(mo))),
                                          std::chrono::day(unsigned(to_int(da)))};
    if (!ymd.ok()) return fail("invalid calendar date");

    const int h = to_int(hh), m = to_int(mi), sec = to_int(ss);
    if (m > 59 || sec > 59) return fail("minute/second out of range");
    ParsedRow row;
    row.date = std::chrono::sys_days(ymd);
    if (h == 24) {
        if (m != 0 || sec != 0) return fail("hour 24 only valid as 24:00:00");
        row.second_of_day = 86400;
        row.hours = std::nextafter(24.0, 0.0);
    } else if (h > 24) {
        return fail("hour out of range");
    } else {
        row.second_of_day = h * 3600 + m * 60 + sec;
        row.hours = h + m / 60.0 + sec / 3600.0;
    }
    return row;
}

std::string format_instant(std::chrono::sys_days date, int second_of_day) {
    const std::chrono::year_month_day ymd{date};
    const int h = second_of_day / 3600, m = (second_of_day / 60) % 60, s = second_of_day % 60;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), h, m, s);
    return buf;
}

int iso_weekday(std::chrono::sys_days d) {
    return int(std::chrono::weekday{d}.iso_encoding());  // Mon=1 .. Sun=7
}

}  // namespace

Weekday parse_weekday(std::string_view name) {
    const std::string n = lower(name);
    for (int i = 0; i < 7; ++i) {
        if (n == weekday_names[size_t(i)]) return Weekday(i);
    }
    static constexpr std::array<const char*, 7> full = {
        "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
    for (int i = 0; i < 7; ++i) {
        if (n == full[size_t(i)]) return Weekday(i);
    }
    throw std::invalid_argument("unknown weekday \"" + std::string(name) +
                                "\" (use mon..sun or full names)");
}

std::string to_string(Weekday day) { return weekday_names[size_t(day)]; }

long ArrivalDataset::total_count() const {
    long n = 0;
    for (const auto& w : arrivals_by_week) n += long(w.size());
    return n;
}

ArrivalDataset load_arrivals(const std::filesystem::path& path, Weekday weekday, int weeks) {
    if (weeks < 1) throw std::invalid_argument("weeks must be >= 1");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (lower(line) != "timestamp")
        throw std::runtime_error(path.string() + ": expected header \"timestamp\", got \"" +
                                 line + "\"");

    std::vector<ParsedRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(parse_timestamp(line, line_no));
    }
    if (rows.empty())
        throw std::runtime_error(path.string() + ": no arrival rows, need " +
                                 std::to_string(weeks) + " weeks of data");

    auto [min_it, max_it] = std::minmax_element(
        rows.begin(), rows.end(), [](const ParsedRow& a, const ParsedRow& b) { return a.date < b.date; });
    const int target_iso = int(weekday) + 1;
    std::chrono::sys_days first = min_it->date;
    first += std::chrono::days((target_iso - iso_weekday(min_it->date) + 7) % 7);

    // Week r is the r-th calendar occurrence of the weekday spanned by the file.
    std::unordered_map<long, int> week_of_day;
    std::chrono::sys_days d = first;
    for (int r = 0; r < weeks; ++r, d += std::chrono::days(7)) {
        if (d > max_it->date) {
            throw std::runtime_error(path.string() + ": spans only " + std::to_string(r) +
                                     " occurrence(s) of " + to_string(weekday) + ", need " +
                                     std::to_string(weeks));
        }
        week_of_day[d.time_since_epoch().count()] = r;
    }

    auto per_week = std::vector<std::vector<std::pair<int, double>>>(size_t(weeks));
    for (const ParsedRow& row : rows) {
        auto it = week_of_day.find(row.date.time_since_epoch().count());
        if (it == week_of_day.end()) continue;
        per_week[size_t(it->second)].emplace_back(row.second_of_day, row.hours);
    }

    ArrivalDataset ds;
    ds.weekday = weekday;
    ds.weeks = weeks;
    ds.arrivals_by_week.resize(size_t(weeks));
    std::vector<std::string> duplicates;
    d = first;
    for (int r = 0; r < weeks; ++r, d += std::chrono::days(7)) {
        auto& wk = per_week[size_t(r)];
        std::sort(wk.begin(), wk.end());
        for (size_t i = 1; i < wk.size(); ++i) {
            if (wk[i].first == wk[i - 1].first)
                duplicates.push_back(format_instant(d, wk[i].first));
        }
        auto& out = ds.arrivals_by_week[size_t(r)];
        out.reserve(wk.size());
        for (const auto& [sec, hours] : wk) out.push_back(hours);
    }
    if (!duplicates.empty()) {
        std::ostringstream msg;
        msg << path.string() << ": duplicate timestamps (simultaneous arrivals are not a "
            << "valid realization of the arrival process):";
        const size_t shown = std::min<size_t>(duplicates.size(), 10);
        for (size_t i = 0; i < shown; ++i) msg << ' ' << duplicates[i];
        if (duplicates.size() > shown)
            msg << " ... (" << duplicates.size() - shown << " more)";
        throw std::runtime_error(msg.str());
    }
    return ds;
}

WeeklyCounts count_in_interval(const ArrivalDataset& ds, double a, double b) {
    if (!(0.0 <= a && a < b && b <= 24.0))
        throw std::invalid_argument("count_in_interval: need 0 <= a < b <= 24");
    WeeklyCounts c;
    c.per_week.reserve(ds.arrivals_by_week.size());
    for (const auto& week : ds.arrivals_by_week) {
        const auto lo = std::lower_bound(week.begin(), week.end(), a);
        const auto hi = std::lower_bound(week.begin(), week.end(), b);
        const long k = hi - lo;
        c.per_week.push_back(k);
        c.pooled += k;
    }
    return c;
}

std::vector<double> pooled_times_in_interval(const ArrivalDataset& ds, double a, double b) {
    if (!(0.0 <= a && a < b && b <= 24.0))
        throw std::invalid_argument("pooled_times_in_interval: need 0 <= a < b <= 24");
    std::vector<double> out;
    for (const auto& week : ds.arrivals_by_week) {
        const auto lo = std::lower_bound(week.begin(), week.end(), a);
        const auto hi = std::lower_bound(week.begin(), week.end(), b);
        out.insert(out.end(), lo, hi);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace nhpp

#include "nhpp/synth.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace nhpp {

namespace {

// Uniform in [0, 1) from the top 53 bits; keeps draws identical across
// standard libraries.
double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

double parse_double(std::string_view s, const char* what) {
    double v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument(std::string("segments: bad ") + what + " \"" +
                                    std::string(s) + "\"");
    return v;
}

}  // namespace

double TrueRate::max_rate() const {
    double m = 0.0;
    for (const RateSegment& s : segments) m = std::max(m, s.rate_per_hour);
    return m;
}

double TrueRate::at(double t) const {
    for (const RateSegment& s : segments)
        if (t >= s.start_hours && t < s.end_hours) return s.rate_per_hour;
    return 0.0;
}

void TrueRate::validate() const {
    if (segments.empty()) throw std::invalid_argument("rate: no segments");
    if (segments.front().start_hours != 0.0)
        throw std::invalid_argument("rate: segments must start at hour 0");
    for (size_t i = 0; i < segments.size(); ++i) {
        const RateSegment& s = segments[i];
        if (!(s.start_hours < s.end_hours))
            throw std::invalid_argument("rate: segment must have positive length");
        if (s.rate_per_hour < 0.0) throw std::invalid_argument("rate: negative rate");
        if (i > 0 && segments[i - 1].end_hours != s.start_hours)
            throw std::invalid_argument("rate: segments must be contiguous");
    }
    if (segments.back().end_hours != 24.0)
        throw std::invalid_argument("rate: segments must end at hour 24");
}

TrueRate parse_segments(std::string_view text) {
    TrueRate rate;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        const std::string_view piece = text.substr(pos, comma - pos);
        const size_t dash = piece.find('-');
        const size_t colon = piece.find(':');
        if (dash == std::string_view::npos || colon == std::string_view::npos || colon < dash)
            throw std::invalid_argument("segments: expected start-end:rate, got \"" +
                                        std::string(piece) + "\"");
        RateSegment seg;
        seg.start_hours = parse_double(piece.substr(0, dash), "start");
        seg.end_hours = parse_double(piece.substr(dash + 1, colon - dash - 1), "end");
        seg.rate_per_hour = parse_double(piece.substr(colon + 1), "rate");
        rate.segments.push_back(seg);
        pos = comma + 1;
    }
    rate.validate();
    return rate;
}

OverdispersionSpec OverdispersionSpec::identity(int weeks) {
    return OverdispersionSpec{std::vector<double>(size_t(std::max(weeks, 1)), 1.0)};
}

double OverdispersionSpec::factor(int week_index) const {
    if (week_scale.empty()) return 1.0;
    return week_scale[size_t(week_index) % week_scale.size()];
}

void OverdispersionSpec::validate() const {
    for (double f : week_scale)
        if (!(f > 0.0)) throw std::invalid_argument("week scale factors must be > 0");
}

ArrivalDataset generate(const TrueRate& rate, int weeks, const OverdispersionSpec& od,
                        std::uint64_t seed, Weekday weekday) {
    if (weeks < 1) throw std::invalid_argument("generate: weeks must be >= 1");
    rate.validate();
    od.validate();

    ArrivalDataset ds;
    ds.weekday = weekday;
    ds.weeks = weeks;
    ds.arrivals_by_week.resize(size_t(weeks));
    const double base_max = rate.max_rate();

    for (int r = 0; r < weeks; ++r) {
        std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(r)};
        std::mt19937_64 rng(seq);
        const double scale = od.factor(r);
        const double lam_max = base_max * scale;
        auto& week = ds.arrivals_by_week[size_t(r)];
        if (lam_max > 0.0) {
            double t = 0.0;
            while (true) {
                const double u = uniform01(rng);
                t += -std::log1p(-u) / lam_max;
                if (t >= 24.0) break;
                if (uniform01(rng) * base_max < rate.at(t)) week.push_back(t);
            }
        }
        // Candidate clocks are non-decreasing; break the (rare) exact ties.
        for (size_t i = 1; i < week.size(); ++i)
            if (week[i] <= week[i - 1]) week[i] = std::nextafter(week[i - 1], 25.0);
        while (!week.empty() && week.back() >= 24.0) week.pop_back();
    }
    return ds;
}

double expected_count(const TrueRate& rate, double a, double b) {
    if (!(0.0 <= a && a < b && b <= 24.0))
        throw std::invalid_argument("expected_count: need 0 <= a < b <= 24");
    rate.validate();
    double mass = 0.0;
    for (const RateSegment& s : rate.segments) {
        const double lo = std::max(a, s.start_hours);
        const double hi = std::min(b, s.end_hours);
        if (hi > lo) mass += (hi - lo) * s.rate_per_hour;
    }
    return mass;
}

void write_arrivals_csv(std::ostream& out, const ArrivalDataset& ds) {
    using namespace std::chrono;
    const sys_days jan1 = sys_days(year_month_day(2024y, January, 1d));  // a Monday
    const int target_iso = int(ds.weekday) + 1;
    const sys_days first = jan1 + days(target_iso - 1);

    out << "timestamp\n";
    for (int r = 0; r < ds.weeks; ++r) {
        const sys_days date = first + days(7 * r);
        const year_month_day ymd{date};
        long prev_sec = -1;
        for (double t : ds.arrivals_by_week[size_t(r)]) {
            long sec = std::lround(t * 3600.0);
            if (sec > 86399) sec = 86399;
            if (sec <= prev_sec) sec = prev_sec + 1;  // rounding collision
            if (sec > 86399) continue;                // fell off the day
            prev_sec = sec;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld\n",
                          int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                          sec / 3600, (sec / 60) % 60, sec % 60);
            out << buf;
        }
    }
}

}  // namespace nhpp

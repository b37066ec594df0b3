#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "nhpp/arrivals.hpp"

namespace testutil {

inline std::filesystem::path temp_dir() {
    static std::atomic<int> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("nhpp_test_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& dir,
                                        const std::string& name, const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline nhpp::ArrivalDataset dataset_from(std::vector<std::vector<double>> weeks,
                                         nhpp::Weekday day = nhpp::Weekday::tue) {
    nhpp::ArrivalDataset ds;
    ds.weekday = day;
    ds.weeks = int(weeks.size());
    ds.arrivals_by_week = std::move(weeks);
    return ds;
}

/// n mid-grid points of [a, b): a + (2j-1)(b-a)/(2n) — uniform layout whose
/// KS distance from the uniform cdf is exactly 1/(2n).
inline std::vector<double> mid_grid(double a, double b, int n) {
    std::vector<double> t;
    t.reserve(size_t(n));
    for (int j = 1; j <= n; ++j) t.push_back(a + (2.0 * j - 1) * (b - a) / (2.0 * n));
    return t;
}

inline double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

/// Monte-Carlo estimate of the upper-alpha quantile of the one-sample KS
/// statistic D_k: empirical (1-alpha) order statistic over `draws` simulated
/// uniform samples. Self-contained so it stays independent of the library's
/// distribution code.
inline double mc_ks_critical(int k, double alpha, int draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> ds;
    ds.reserve(size_t(draws));
    auto sample = std::vector<double>(size_t(k));
    for (int r = 0; r < draws; ++r) {
        for (double& s : sample) s = uniform01(rng);
        std::sort(sample.begin(), sample.end());
        double d = 0.0;
        for (int j = 0; j < k; ++j) {
            d = std::max(d, (j + 1.0) / k - sample[size_t(j)]);
            d = std::max(d, sample[size_t(j)] - double(j) / k);
        }
        ds.push_back(d);
    }
    const size_t idx = size_t(std::ceil((1.0 - alpha) * draws)) - 1;
    std::nth_element(ds.begin(), ds.begin() + long(idx), ds.end());
    return ds[idx];
}

/// Poisson draw by Knuth's product method, chunked so exp(-mean) stays
/// representable for large means.
inline long poisson_draw(std::mt19937_64& g, double mean) {
    long total = 0;
    while (mean > 60.0) {
        double l = std::exp(-60.0);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01(g);
        } while (p > l);
        total += k - 1;
        mean -= 60.0;
    }
    const double l = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01(g);
    } while (p > l);
    return total + k - 1;
}

}  // namespace testutil

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nhpp::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_infeasible = 2;

/// All tunables, resolved from CLI flags > config file > defaults.
struct RunConfig {
    std::string input;
    std::string weekday = "tue";
    int weeks = 13;
    double alpha = 0.05;
    double ell_hours = 1.0;
    double weight = 1.0;
    int grid_units = 24;
    int max_intervals = 24;
    int cells = 96;
    int budget = 5000;
    std::uint64_t seed = 0;
    int restarts = 1;
    std::string out_dir;
    std::string format = "text";
};

/// Entry point behind the executable; testable with crafted argv.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nhpp::cli

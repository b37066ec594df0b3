#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhpp/empirical.hpp"
#include "nhpp/partition.hpp"
#include "nhpp/solver.hpp"

namespace nhpp {

/// One row of the per-interval test table.
struct TestTableRow {
    std::string interval;                // "HH:MM – HH:MM"
    long k = 0;
    std::optional<double> ks_p;          // empty when untestable
    std::string ks_h0;
    std::optional<double> dispersion_p;
    std::string dispersion_h0;

    bool operator==(const TestTableRow&) const = default;
};

struct StepRow {
    double start_hours = 0.0;
    double end_hours = 0.0;
    double rate_per_hour = 0.0;

    bool operator==(const StepRow&) const = default;
};

struct ReportMeta {
    double weight = 1.0;
    int weeks = 0;
    double alpha = 0.05;
    double min_len_hours = 1.0;
    int budget = 0;
    std::uint64_t seed = 0;
    bool feasible = false;
    double fit_error = 0.0;
    double smoothness = 0.0;
    double objective = 0.0;

    bool operator==(const ReportMeta&) const = default;
};

struct ReportBundle {
    std::vector<TestTableRow> test_table;
    std::vector<StepRow> step_function;   // lambda_D, tiles [0, 24)
    std::vector<StepRow> fine_rate;       // lambda_F cells
    ReportMeta meta;

    bool operator==(const ReportBundle&) const = default;
};

ReportBundle render(const EvalResult& e, const EmpiricalRate& er, const ReportMeta& meta);

nlohmann::json to_json(const ReportBundle& b);
ReportBundle bundle_from_json(const nlohmann::json& j);

/// Human-readable table, p-values printed to 3 decimals.
std::string to_text(const ReportBundle& b);

void write_table_csv(std::ostream& out, const ReportBundle& b);
void write_steps_csv(std::ostream& out, const ReportBundle& b);
void write_fine_csv(std::ostream& out, const ReportBundle& b);

/// {"boundaries_hours": [...], "rates_per_hour": [...], "feasible": ...,
///  "E": ..., "S": ..., "f": ...}
nlohmann::json partition_json(const EvalResult& e);

nlohmann::json solver_run_json(const SolverRun& run);

/// "HH:MM" label for a boundary in hours (24.0 -> "24:00").
std::string format_hhmm(double hours);

/// Writes via a temp file in the same directory plus rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace nhpp

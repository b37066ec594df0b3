#include "nhpp/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "nhpp/arrivals.hpp"
#include "nhpp/empirical.hpp"
#include "nhpp/partition.hpp"
#include "nhpp/report.hpp"
#include "nhpp/solver.hpp"
#include "nhpp/synth.hpp"

namespace nhpp::cli {

namespace {

constexpr const char* version_string = "nhppfit 0.1.0";

PartitionGrid make_grid(const RunConfig& rc) {
    PartitionGrid grid;
    grid.units = rc.grid_units;
    grid.max_intervals = rc.max_intervals;
    const double unit = grid.unit_hours();
    const double units_f = rc.ell_hours / unit;
    const long units_i = std::lround(units_f);
    if (std::abs(units_f - units_i) > 1e-9 || units_i < 1)
        throw std::invalid_argument("--ell-hours must be a positive multiple of the grid unit (" +
                                    std::to_string(unit) + " h)");
    grid.min_len_units = int(units_i);
    grid.validate();
    return grid;
}

void validate_config(const RunConfig& rc) {
    std::vector<std::string> problems;
    if (rc.weeks < 1) problems.push_back("--weeks must be >= 1");
    if (!(rc.alpha > 0.0 && rc.alpha < 1.0)) problems.push_back("--alpha must lie in (0, 1)");
    if (rc.weight < 0.0) problems.push_back("--weight must be >= 0");
    if (rc.max_intervals < 2) problems.push_back("--max-intervals must be >= 2");
    if (rc.grid_units < rc.max_intervals)
        problems.push_back("--grid-units must be >= --max-intervals");
    if (rc.cells < 1 || rc.cells % rc.grid_units != 0)
        problems.push_back("--cells must be a positive multiple of --grid-units");
    if (rc.budget < 1) problems.push_back("--budget must be >= 1");
    if (rc.restarts < 1) problems.push_back("--restarts must be >= 1");
    if (rc.format != "text" && rc.format != "csv" && rc.format != "json")
        problems.push_back("--format must be text, csv or json");
    parse_weekday(rc.weekday);  // throws with its own message
    if (!problems.empty()) {
        std::string all;
        for (const auto& p : problems) {
            if (!all.empty()) all += "; ";
            all += p;
        }
        throw std::invalid_argument(all);
    }
    make_grid(rc);  // ell/grid coherence
}

nlohmann::json config_json(const RunConfig& rc) {
    return {{"input", rc.input},
            {"weekday", rc.weekday},
            {"weeks", rc.weeks},
            {"alpha", rc.alpha},
            {"ell_hours", rc.ell_hours},
            {"weight", rc.weight},
            {"grid_units", rc.grid_units},
            {"max_intervals", rc.max_intervals},
            {"cells", rc.cells},
            {"budget", rc.budget},
            {"seed", rc.seed},
            {"restarts", rc.restarts},
            {"out_dir", rc.out_dir},
            {"format", rc.format}};
}

std::filesystem::path output_stem(const RunConfig& rc, const std::string& suffix) {
    const std::filesystem::path input(rc.input);
    const std::filesystem::path dir =
        rc.out_dir.empty() ? input.parent_path() : std::filesystem::path(rc.out_dir);
    return dir / (input.stem().string() + suffix);
}

void emit_bundle(const ReportBundle& bundle, const RunConfig& rc, std::ostream& out) {
    if (rc.format == "json") {
        out << to_json(bundle).dump(2) << '\n';
    } else if (rc.format == "csv") {
        write_table_csv(out, bundle);
    } else {
        out << to_text(bundle);
    }
}

void write_bundle_files(const ReportBundle& bundle, const std::filesystem::path& stem) {
    write_file_atomic(stem.string() + ".report.json", to_json(bundle).dump(2) + "\n");
    std::ostringstream steps;
    write_steps_csv(steps, bundle);
    write_file_atomic(stem.string() + ".steps.csv", steps.str());
    std::ostringstream fine;
    write_fine_csv(fine, bundle);
    write_file_atomic(stem.string() + ".fine.csv", fine.str());
}

ReportMeta meta_for(const RunConfig& rc, const PartitionGrid& grid, double weight, int weeks) {
    ReportMeta meta;
    meta.weight = weight;
    meta.weeks = weeks;
    meta.alpha = rc.alpha;
    meta.min_len_hours = grid.min_len_hours();
    meta.budget = rc.budget;
    meta.seed = rc.seed;
    return meta;
}

struct FitOutcome {
    bool feasible = false;
    ReportBundle bundle;
    int interval_count = 0;
};

FitOutcome run_fit(const RunConfig& rc, double weight, int weeks, const std::string& suffix,
                   std::ostream& err) {
    const ArrivalDataset ds = load_arrivals(rc.input, parse_weekday(rc.weekday), weeks);
    const EmpiricalRate er = build_empirical(ds, rc.cells);
    const PartitionGrid grid = make_grid(rc);
    const TestConfig tc{rc.alpha};
    SolverConfig sc;
    sc.max_evals = rc.budget;
    sc.seed = rc.seed;
    const SolverRun run = solve_best_of(ds, er, weight, tc, grid, sc, rc.restarts);

    const ReportBundle bundle = render(run.best_eval, er, meta_for(rc, grid, weight, weeks));
    const std::filesystem::path stem = output_stem(rc, suffix);
    write_bundle_files(bundle, stem);
    write_file_atomic(stem.string() + ".solver.json", solver_run_json(run).dump(2) + "\n");

    if (!run.best_eval.feasible)
        err << "no feasible partition found within budget; reporting the minimum-violation "
               "incumbent (" << stem.string() << ".*)\n";
    return {run.best_eval.feasible, bundle, run.best.interval_count()};
}

int cmd_simulate(const RunConfig& rc, const std::string& segments,
                 const std::vector<double>& week_scales, const std::string& out_path,
                 std::ostream& out) {
    const TrueRate rate = parse_segments(segments);
    OverdispersionSpec od{week_scales};
    if (week_scales.empty()) od = OverdispersionSpec::identity(rc.weeks);
    const ArrivalDataset ds =
        generate(rate, rc.weeks, od, rc.seed, parse_weekday(rc.weekday));
    std::ostringstream csv;
    write_arrivals_csv(csv, ds);
    write_file_atomic(out_path, csv.str());
    out << "wrote " << ds.total_count() << " arrivals over " << ds.weeks << " weeks to "
        << out_path << '\n';
    return exit_ok;
}

int cmd_bin(const RunConfig& rc, const std::string& out_path, std::ostream& out) {
    const ArrivalDataset ds = load_arrivals(rc.input, parse_weekday(rc.weekday), rc.weeks);
    const EmpiricalRate er = build_empirical(ds, rc.cells);
    ReportBundle bundle;
    for (int c = 0; c < er.cells; ++c)
        bundle.fine_rate.push_back({c * er.cell_width, (c + 1) * er.cell_width, er.rates[c]});
    std::ostringstream csv;
    write_fine_csv(csv, bundle);
    if (out_path.empty())
        out << csv.str();
    else
        write_file_atomic(out_path, csv.str());
    return exit_ok;
}

int cmd_check(const RunConfig& rc, const std::vector<double>& boundary_hours, std::ostream& out) {
    const ArrivalDataset ds = load_arrivals(rc.input, parse_weekday(rc.weekday), rc.weeks);
    const EmpiricalRate er = build_empirical(ds, rc.cells);
    const PartitionGrid grid = make_grid(rc);

    if (boundary_hours.size() < 2 || boundary_hours.front() != 0.0 ||
        boundary_hours.back() != 24.0)
        throw std::invalid_argument("--boundaries must start at 0 and end at 24");
    if (int(boundary_hours.size()) > grid.max_intervals + 1)
        throw std::invalid_argument("--boundaries lists more than max-intervals + 1 points");
    Eigen::VectorXi raw(grid.max_intervals + 1);
    int pos = 0;
    double prev = -1.0;
    for (double bound : boundary_hours) {
        if (pos > 0 && bound <= prev)
            throw std::invalid_argument("--boundaries must be strictly increasing");
        prev = bound;
        const double units_f = bound / grid.unit_hours();
        const long units_i = std::lround(units_f);
        if (std::abs(units_f - units_i) > 1e-9)
            throw std::invalid_argument("boundary " + std::to_string(bound) +
                                        " h is not aligned to the grid unit");
        raw[pos++] = int(units_i);
    }
    while (pos <= grid.max_intervals) raw[pos++] = grid.units;
    const Partition p = canonicalize(raw, grid);

    const EvalResult e = evaluate(p, ds, er, rc.weight, TestConfig{rc.alpha}, grid);
    const ReportBundle bundle = render(e, er, meta_for(rc, grid, rc.weight, rc.weeks));
    emit_bundle(bundle, rc, out);
    return exit_ok;
}

int cmd_fit(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const FitOutcome fit = run_fit(rc, rc.weight, rc.weeks, "", err);
    emit_bundle(fit.bundle, rc, out);
    return fit.feasible ? exit_ok : exit_infeasible;
}

int cmd_sweep(const RunConfig& rc, const std::vector<double>& weights,
              const std::vector<int>& weeks_list, std::ostream& out, std::ostream& err) {
    if (weights.empty() && weeks_list.empty())
        throw std::invalid_argument("sweep needs --weights or --weeks");
    int fixed_weeks = rc.weeks;
    if (!weights.empty() && !weeks_list.empty()) {
        // a single --weeks value pins m for a weights sweep
        if (weeks_list.size() > 1)
            throw std::invalid_argument(
                "sweep takes one axis: --weights with at most one --weeks value, or --weeks "
                "alone");
        fixed_weeks = weeks_list.front();
    }
    bool all_feasible = true;
    char line[256];
    if (!weights.empty()) {
        if (fixed_weeks < 1) throw std::invalid_argument("--weeks must be >= 1");
        for (double w : weights) {
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, ".w%g", w);
            const FitOutcome fit = run_fit(rc, w, fixed_weeks, suffix, err);
            all_feasible = all_feasible && fit.feasible;
            std::snprintf(line, sizeof line,
                          "w=%-8g intervals=%-3d E=%-12.6g S=%-12.6g f=%-12.6g feasible=%s\n", w,
                          fit.interval_count, fit.bundle.meta.fit_error,
                          fit.bundle.meta.smoothness, fit.bundle.meta.objective,
                          fit.feasible ? "yes" : "no");
            out << line;
        }
    } else {
        for (int m : weeks_list) {
            if (m < 1) throw std::invalid_argument("sweep --weeks entries must be >= 1");
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, ".m%d", m);
            const FitOutcome fit = run_fit(rc, rc.weight, m, suffix, err);
            all_feasible = all_feasible && fit.feasible;
            std::snprintf(line, sizeof line,
                          "m=%-8d intervals=%-3d E=%-12.6g S=%-12.6g f=%-12.6g feasible=%s\n", m,
                          fit.interval_count, fit.bundle.meta.fit_error,
                          fit.bundle.meta.smoothness, fit.bundle.meta.objective,
                          fit.feasible ? "yes" : "no");
            out << line;
        }
    }
    return all_feasible ? exit_ok : exit_infeasible;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal piecewise-constant arrival-rate models for nonhomogeneous "
                 "Poisson arrival data"};
    app.set_version_flag("--version", version_string);
    app.set_config("--config", "", "Flat key=value file supplying defaults for any option");

    RunConfig rc;
    app.add_option("--input", rc.input, "Arrivals CSV (header `timestamp`, ISO-8601 rows)");
    app.add_option("--weekday", rc.weekday, "Day of week to model (mon..sun)")
        ->capture_default_str();
    app.add_option("--weeks", rc.weeks, "Number of weekly occurrences to use")
        ->capture_default_str();
    app.add_option("--alpha", rc.alpha, "Significance level for both tests")
        ->capture_default_str();
    app.add_option("--ell-hours", rc.ell_hours, "Minimum interval length in hours")
        ->capture_default_str();
    app.add_option("--weight", rc.weight, "Smoothness weight w in f = E + w*S")
        ->capture_default_str();
    app.add_option("--grid-units", rc.grid_units, "Boundary grid units per day")
        ->capture_default_str();
    app.add_option("--max-intervals", rc.max_intervals, "Maximum number of intervals")
        ->capture_default_str();
    app.add_option("--cells", rc.cells, "Fine grid cells for the empirical rate")
        ->capture_default_str();
    app.add_option("--budget", rc.budget, "Solver evaluation budget")->capture_default_str();
    app.add_option("--seed", rc.seed, "RNG seed")->capture_default_str();
    app.add_option("--restarts", rc.restarts, "Solver restarts, best result kept")
        ->capture_default_str();
    app.add_option("--out-dir", rc.out_dir, "Directory for report files (default: beside input)");
    app.add_option("--format", rc.format, "Stdout format: text|csv|json")->capture_default_str();
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config, "Print the resolved configuration and exit");

    std::string sim_segments, sim_out;
    std::vector<double> sim_scales;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Generate synthetic arrivals with a known piecewise-constant rate");
    simulate->fallthrough();
    simulate->add_option("--segments", sim_segments, "Rate segments, e.g. 0-12:2,12-24:6")
        ->required();
    simulate->add_option("--week-scales", sim_scales,
                         "Per-week rate factors, cycled (overdispersion when not all 1)")
        ->delimiter(',');
    simulate->add_option("--out", sim_out, "Output CSV path")->required();

    std::string bin_out;
    CLI::App* bin = app.add_subcommand("bin", "Emit the fine-grid empirical rate as CSV");
    bin->fallthrough();
    bin->add_option("--out", bin_out, "Output CSV path (default: stdout)");

    std::vector<double> check_bounds;
    CLI::App* check = app.add_subcommand(
        "check", "Run both statistical tests on an explicit partition and print the table");
    check->fallthrough();
    check->add_option("--boundaries", check_bounds, "Boundary hours, e.g. 0,2,5,24")
        ->delimiter(',')
        ->required();

    CLI::App* fit = app.add_subcommand(
        "fit", "Optimize the partition: exit 0 when feasible, 2 when no feasible "
               "partition was found within budget");
    fit->fallthrough();

    std::vector<double> sweep_weights;
    std::vector<int> sweep_weeks;
    CLI::App* sweep =
        app.add_subcommand("sweep", "Fit once per setting of --weights or --weeks");
    sweep->fallthrough();
    sweep->add_option("--weights", sweep_weights, "Smoothness weights, e.g. 0,0.1,1,10,1000")
        ->delimiter(',');
    sweep->add_option("--weeks", sweep_weeks,
                      "Week counts, e.g. 5,9,13,17,22,26 (a single value pins m for a "
                      "--weights sweep)")
        ->delimiter(',');

    std::vector<const char*> argv;
    argv.push_back("nhppfit");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);  // --help / --version
        }
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        validate_config(rc);
        if (dump_config) {
            out << config_json(rc).dump(2) << '\n';
            return exit_ok;
        }
        const bool needs_input = bin->parsed() || check->parsed() || fit->parsed() ||
                                 sweep->parsed();
        if (needs_input && rc.input.empty())
            throw std::invalid_argument("--input is required for this subcommand");

        if (simulate->parsed()) return cmd_simulate(rc, sim_segments, sim_scales, sim_out, out);
        if (bin->parsed()) return cmd_bin(rc, bin_out, out);
        if (check->parsed()) return cmd_check(rc, check_bounds, out);
        if (fit->parsed()) return cmd_fit(rc, out, err);
        if (sweep->parsed()) return cmd_sweep(rc, sweep_weights, sweep_weeks, out, err);

        err << "error: specify a subcommand (simulate, bin, check, fit, sweep) or "
               "--dump-config; see --help\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace nhpp::cli

#include "nhpp/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nhpp {

namespace {

constexpr const char* dash = " – ";  // en dash, as in the printed tables

std::string fmt3(std::optional<double> p) {
    if (!p) return "-";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.3f", *p);
    return buf;
}

nlohmann::json opt_json(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

std::optional<double> opt_from(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::string format_hhmm(double hours) {
    int h = int(std::floor(hours + 1e-9));
    int m = int(std::lround((hours - h) * 60.0));
    if (m == 60) {
        ++h;
        m = 0;
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", h, m);
    return buf;
}

ReportBundle render(const EvalResult& e, const EmpiricalRate& er, const ReportMeta& meta) {
    ReportBundle b;
    b.meta = meta;
    b.meta.feasible = e.feasible;
    b.meta.fit_error = e.fit_error;
    b.meta.smoothness = e.smoothness;
    b.meta.objective = e.objective;

    for (const IntervalEval& iv : e.intervals) {
        TestTableRow row;
        row.interval = format_hhmm(iv.start_hours) + dash + format_hhmm(iv.end_hours);
        row.k = iv.pooled;
        if (!iv.ks.untestable()) row.ks_p = iv.ks.p_value;
        row.ks_h0 = to_string(iv.ks.status);
        if (!iv.dispersion.untestable()) row.dispersion_p = iv.dispersion.p_value;
        row.dispersion_h0 = to_string(iv.dispersion.status);
        b.test_table.push_back(std::move(row));

        b.step_function.push_back({iv.start_hours, iv.end_hours, iv.rate});
    }
    for (int c = 0; c < er.cells; ++c)
        b.fine_rate.push_back({c * er.cell_width, (c + 1) * er.cell_width, er.rates[c]});
    return b;
}

nlohmann::json to_json(const ReportBundle& b) {
    nlohmann::json j;
    j["meta"] = {{"weight", b.meta.weight},
                 {"weeks", b.meta.weeks},
                 {"alpha", b.meta.alpha},
                 {"min_len_hours", b.meta.min_len_hours},
                 {"budget", b.meta.budget},
                 {"seed", b.meta.seed},
                 {"feasible", b.meta.feasible},
                 {"fit_error", b.meta.fit_error},
                 {"smoothness", b.meta.smoothness},
                 {"objective", b.meta.objective}};
    j["test_table"] = nlohmann::json::array();
    for (const TestTableRow& r : b.test_table) {
        j["test_table"].push_back({{"interval", r.interval},
                                   {"k", r.k},
                                   {"ks_p_value", opt_json(r.ks_p)},
                                   {"ks_h0", r.ks_h0},
                                   {"dispersion_p_value", opt_json(r.dispersion_p)},
                                   {"dispersion_h0", r.dispersion_h0}});
    }
    j["step_function"] = nlohmann::json::array();
    for (const StepRow& r : b.step_function)
        j["step_function"].push_back({{"start", r.start_hours}, {"end", r.end_hours},
                                      {"rate", r.rate_per_hour}});
    j["fine_rate"] = nlohmann::json::array();
    for (const StepRow& r : b.fine_rate)
        j["fine_rate"].push_back({{"start", r.start_hours}, {"end", r.end_hours},
                                  {"rate", r.rate_per_hour}});
    return j;
}

ReportBundle bundle_from_json(const nlohmann::json& j) {
    ReportBundle b;
    const auto& m = j.at("meta");
    b.meta.weight = m.at("weight").get<double>();
    b.meta.weeks = m.at("weeks").get<int>();
    b.meta.alpha = m.at("alpha").get<double>();
    b.meta.min_len_hours = m.at("min_len_hours").get<double>();
    b.meta.budget = m.at("budget").get<int>();
    b.meta.seed = m.at("seed").get<std::uint64_t>();
    b.meta.feasible = m.at("feasible").get<bool>();
    b.meta.fit_error = m.at("fit_error").get<double>();
    b.meta.smoothness = m.at("smoothness").get<double>();
    b.meta.objective = m.at("objective").get<double>();
    for (const auto& r : j.at("test_table")) {
        TestTableRow row;
        row.interval = r.at("interval").get<std::string>();
        row.k = r.at("k").get<long>();
        row.ks_p = opt_from(r.at("ks_p_value"));
        row.ks_h0 = r.at("ks_h0").get<std::string>();
        row.dispersion_p = opt_from(r.at("dispersion_p_value"));
        row.dispersion_h0 = r.at("dispersion_h0").get<std::string>();
        b.test_table.push_back(std::move(row));
    }
    for (const auto& r : j.at("step_function"))
        b.step_function.push_back({r.at("start").get<double>(), r.at("end").get<double>(),
                                   r.at("rate").get<double>()});
    for (const auto& r : j.at("fine_rate"))
        b.fine_rate.push_back({r.at("start").get<double>(), r.at("end").get<double>(),
                               r.at("rate").get<double>()});
    return b;
}

std::string to_text(const ReportBundle& b) {
    std::ostringstream out;
    out << "Interval        k      KS p    KS H0       Disp p  Disp H0\n";
    out << "-----------------------------------------------------------\n";
    char line[160];
    for (size_t i = 0; i < b.test_table.size(); ++i) {
        const TestTableRow& r = b.test_table[i];
        std::snprintf(line, sizeof line, "%-15s %-6ld %-7s %-11s %-7s %s\n", r.interval.c_str(),
                      r.k, fmt3(r.ks_p).c_str(), r.ks_h0.c_str(), fmt3(r.dispersion_p).c_str(),
                      r.dispersion_h0.c_str());
        out << line;
    }
    out << "\n";
    std::snprintf(line, sizeof line,
                  "intervals=%zu  E=%.6g  S=%.6g  f=%.6g  w=%g  m=%d  alpha=%g  ell=%gh  "
                  "feasible=%s\n",
                  b.step_function.size(), b.meta.fit_error, b.meta.smoothness, b.meta.objective,
                  b.meta.weight, b.meta.weeks, b.meta.alpha, b.meta.min_len_hours,
                  b.meta.feasible ? "yes" : "no");
    out << line;
    return out.str();
}

void write_table_csv(std::ostream& out, const ReportBundle& b) {
    out << "interval,k,ks_p_value,ks_h0,dispersion_p_value,dispersion_h0\n";
    for (const TestTableRow& r : b.test_table) {
        out << '"' << r.interval << "\"," << r.k << ',' << (r.ks_p ? fmt3(r.ks_p) : "") << ','
            << r.ks_h0 << ',' << (r.dispersion_p ? fmt3(r.dispersion_p) : "") << ','
            << r.dispersion_h0 << '\n';
    }
}

void write_steps_csv(std::ostream& out, const ReportBundle& b) {
    out << "start_hour,end_hour,rate_per_hour\n";
    char line[96];
    for (const StepRow& r : b.step_function) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", r.start_hours, r.end_hours,
                      r.rate_per_hour);
        out << line;
    }
}

void write_fine_csv(std::ostream& out, const ReportBundle& b) {
    out << "cell_start_hour,rate_per_hour\n";
    char line[64];
    for (const StepRow& r : b.fine_rate) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", r.start_hours, r.rate_per_hour);
        out << line;
    }
}

nlohmann::json partition_json(const EvalResult& e) {
    nlohmann::json j;
    std::vector<double> bounds;
    std::vector<double> rates;
    for (size_t i = 0; i < e.intervals.size(); ++i) {
        if (i == 0) bounds.push_back(e.intervals[i].start_hours);
        bounds.push_back(e.intervals[i].end_hours);
        rates.push_back(e.intervals[i].rate);
    }
    j["boundaries_hours"] = bounds;
    j["rates_per_hour"] = rates;
    j["feasible"] = e.feasible;
    j["E"] = e.fit_error;
    j["S"] = e.smoothness;
    j["f"] = e.objective;
    return j;
}

nlohmann::json solver_run_json(const SolverRun& run) {
    nlohmann::json j;
    j["best"] = partition_json(run.best_eval);
    std::vector<int> boundaries(run.best.x.begin(), run.best.x.end());
    j["best_boundaries_units"] = boundaries;
    j["evals_used"] = run.evals_used;
    j["converged"] = run.converged;
    j["feasible"] = run.best_eval.feasible;
    j["history"] = nlohmann::json::array();
    for (const HistoryEntry& h : run.history)
        j["history"].push_back({{"eval", h.eval_index}, {"f", h.objective},
                                {"violation", h.violation}});
    return j;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace nhpp

#include "nhpp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace nhpp {

double penalized_value(const EvalResult& e, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("penalized_value: eps must be > 0");
    return e.objective + e.total_violation / eps;
}

namespace {

struct VecHash {
    size_t operator()(const std::vector<int>& v) const {
        size_t h = 1469598103934665603ull;
        for (int x : v) {
            h ^= size_t(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

std::vector<int> key_of(const Partition& p) {
    return std::vector<int>(p.x.begin(), p.x.end());
}

bool lex_less(const Partition& a, const Partition& b) {
    return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
}

// Feasible beats infeasible; then objective (or violation), interval count,
// lexicographic boundaries. Total order, so runs are reproducible.
bool improves(const EvalResult& ea, const Partition& pa, const EvalResult& eb,
              const Partition& pb) {
    if (ea.feasible != eb.feasible) return ea.feasible;
    if (ea.feasible) {
        if (ea.objective != eb.objective) return ea.objective < eb.objective;
    } else {
        if (ea.total_violation != eb.total_violation)
            return ea.total_violation < eb.total_violation;
        if (ea.objective != eb.objective) return ea.objective < eb.objective;
    }
    const int na = pa.interval_count(), nb = pb.interval_count();
    if (na != nb) return na < nb;
    return lex_less(pa, pb);
}

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined.
template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = size_t(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace

SolverRun solve(const ArrivalDataset& ds, const EmpiricalRate& er, double weight,
                const TestConfig& cfg, const PartitionGrid& grid, const SolverConfig& scfg) {
    grid.validate();
    if (scfg.max_evals < 1) throw std::invalid_argument("solve: max_evals must be >= 1");
    if (!(scfg.penalty_eps > 0.0)) throw std::invalid_argument("solve: penalty_eps must be > 0");
    if (!(scfg.penalty_shrink > 0.0 && scfg.penalty_shrink < 1.0))
        throw std::invalid_argument("solve: penalty_shrink must lie in (0, 1)");
    if (scfg.nonmonotone_memory < 1)
        throw std::invalid_argument("solve: nonmonotone_memory must be >= 1");
    if (scfg.initial_step < 1) throw std::invalid_argument("solve: initial_step must be >= 1");

    SolverRun run;
    std::unordered_map<std::vector<int>, EvalResult, VecHash> memo;
    bool have_best = false;
    bool budget_out = false;

    // Returns the memoized evaluation, or nullptr once the budget is spent.
    auto eval_point = [&](const Partition& p) -> const EvalResult* {
        auto key = key_of(p);
        if (auto it = memo.find(key); it != memo.end()) return &it->second;
        if (run.evals_used >= scfg.max_evals) {
            budget_out = true;
            return nullptr;
        }
        EvalResult e = evaluate(p, ds, er, weight, cfg, grid);
        ++run.evals_used;
        run.history.push_back({run.evals_used, e.objective, e.total_violation});
        if (!have_best || improves(e, p, run.best_eval, run.best)) {
            run.best = p;
            run.best_eval = e;
            have_best = true;
        }
        return &memo.emplace(std::move(key), std::move(e)).first->second;
    };

    std::mt19937_64 rng(scfg.seed);
    Partition cur = uniform_start(grid);
    const EvalResult* cur_eval = eval_point(cur);
    if (cur_eval == nullptr) return run;

    double eps = scfg.penalty_eps;
    constexpr double eps_floor = 1e-12;
    std::deque<const EvalResult*> accepted;  // last M accepted points
    accepted.push_back(cur_eval);
    const auto reference = [&] {
        double r = -std::numeric_limits<double>::infinity();
        for (const EvalResult* e : accepted) r = std::max(r, penalized_value(*e, eps));
        return r;
    };

    std::vector<int> coords(size_t(grid.max_intervals - 1));
    std::iota(coords.begin(), coords.end(), 1);  // interior boundaries

    int step = scfg.initial_step;
    while (!budget_out) {
        bool any_accept = false;
        shuffle_vec(coords, rng);
        for (int ci : coords) {
            if (budget_out) break;
            for (int dir : {+1, -1}) {
                Eigen::VectorXi raw = cur.x;
                raw[ci] += dir * step;
                Partition cand = canonicalize(std::move(raw), grid);
                if (cand.x == cur.x) continue;
                const EvalResult* ce = eval_point(cand);
                if (ce == nullptr) break;
                if (penalized_value(*ce, eps) >= reference()) continue;

                // Expand along the accepted direction while it keeps improving.
                int delta = dir * step;
                while (!budget_out) {
                    delta *= 2;
                    Eigen::VectorXi raw2 = cur.x;
                    raw2[ci] += delta;
                    Partition next = canonicalize(std::move(raw2), grid);
                    if (next.x == cand.x) break;
                    const EvalResult* ne = eval_point(next);
                    if (ne == nullptr) break;
                    if (penalized_value(*ne, eps) < penalized_value(*ce, eps)) {
                        cand = std::move(next);
                        ce = ne;
                    } else {
                        break;
                    }
                }
                cur = std::move(cand);
                cur_eval = ce;
                accepted.push_back(ce);
                while (int(accepted.size()) > scfg.nonmonotone_memory) accepted.pop_front();
                any_accept = true;
                break;  // next coordinate
            }
        }
        if (budget_out) break;
        if (any_accept) continue;
        if (step > 1) {
            step /= 2;
            continue;
        }
        // Stalled at unit step.
        if (have_best && run.best_eval.feasible) {
            run.converged = true;
            break;
        }
        if (eps <= eps_floor) {
            run.converged = true;
            break;
        }
        eps *= scfg.penalty_shrink;
        step = scfg.initial_step;
    }
    return run;
}

SolverRun solve_best_of(const ArrivalDataset& ds, const EmpiricalRate& er, double weight,
                        const TestConfig& cfg, const PartitionGrid& grid,
                        const SolverConfig& scfg, int restarts) {
    if (restarts < 1) throw std::invalid_argument("solve_best_of: restarts must be >= 1");
    SolverRun best;
    for (int r = 0; r < restarts; ++r) {
        SolverConfig sc = scfg;
        sc.seed = scfg.seed + std::uint64_t(r);
        SolverRun run = solve(ds, er, weight, cfg, grid, sc);
        if (r == 0 || improves(run.best_eval, run.best, best.best_eval, best.best))
            best = std::move(run);
    }
    return best;
}

BruteForceResult brute_force(const ArrivalDataset& ds, const EmpiricalRate& er, double weight,
                             const TestConfig& cfg, const PartitionGrid& grid, long cap) {
    grid.validate();
    const int g = grid.units, b = grid.max_intervals;

    double subsets = 0.0;
    {
        double binom = 1.0;  // C(g-1, 0)
        for (int j = 0; j <= b - 1; ++j) {
            subsets += binom;
            binom = binom * (g - 1 - j) / (j + 1);
            if (subsets > double(cap)) break;
        }
    }
    if (subsets > double(cap))
        throw std::runtime_error("brute_force: search space exceeds the cap of " +
                                 std::to_string(cap) + " partitions");

    BruteForceResult res;
    bool have_any = false;

    const auto consider = [&](const std::vector<int>& interior) {
        Eigen::VectorXi x(b + 1);
        x[0] = 0;
        int pos = 1;
        for (int v : interior) x[pos++] = v;
        while (pos <= b) x[pos++] = g;
        Partition p{std::move(x)};
        EvalResult e = evaluate(p, ds, er, weight, cfg, grid);
        ++res.evaluated;
        if (e.feasible) {
            if (!res.found_feasible || e.objective < res.best_eval.objective) {
                res.best = std::move(p);
                res.best_eval = std::move(e);
            }
            res.found_feasible = true;
        } else if (!res.found_feasible) {
            if (!have_any || improves(e, p, res.best_eval, res.best)) {
                res.best = std::move(p);
                res.best_eval = std::move(e);
            }
        }
        have_any = true;
    };

    // Sizes ascending, lexicographic within a size; with strict improvement
    // this realizes the fewest-intervals-then-lexicographic tie break.
    for (int n = 0; n <= b - 1 && n <= g - 1; ++n) {
        auto comb = std::vector<int>(size_t(n));
        std::iota(comb.begin(), comb.end(), 1);
        if (n == 0) {
            consider(comb);
            continue;
        }
        while (true) {
            consider(comb);
            int i = n - 1;
            while (i >= 0 && comb[size_t(i)] == g - 1 - (n - 1 - i)) --i;
            if (i < 0) break;
            ++comb[size_t(i)];
            for (int j = i + 1; j < n; ++j) comb[size_t(j)] = comb[size_t(j - 1)] + 1;
        }
    }
    return res;
}

}  // namespace nhpp

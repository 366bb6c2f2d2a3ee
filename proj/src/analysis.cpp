#include "bikeshare/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>
#include <tuple>

#include "bikeshare/errors.hpp"
#include "bikeshare/fixed_point.hpp"

namespace bikeshare {

namespace {

// Runs fn(i) for i in [0, n) on a few worker threads. Each index writes only
// its own output slot, so results do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

SweepRecord evaluate(const SystemParams& params, const ProfitPrices& prices) {
    SweepRecord rec;
    rec.params = params;
    try {
        params.validate();
        const FixedPointResult fp = solve_fixed_point(params);
        rec.metrics = compute_metrics(fp.p, params, prices);
    } catch (const BikeshareError& e) {
        rec.error = e.name() + ": " + e.what();
    }
    return rec;
}

template <class Objective>
OptimizationResult optimize(const DesignGrid& search, const SystemParams& base, const ProfitPrices& prices,
                            Objective&& objective) {
    std::vector<Candidate> table;
    for (int c : search.capacity_c)
        for (int k : search.capacity_k)
            for (double mu : search.mu) {
                Candidate cand;
                cand.record.params = base;
                cand.record.params.capacity_c = c;
                cand.record.params.capacity_k = k;
                cand.record.params.mu = mu;
                table.push_back(cand);
            }
    std::sort(table.begin(), table.end(), [](const Candidate& x, const Candidate& y) {
        const auto& a = x.record.params;
        const auto& b = y.record.params;
        return std::tie(a.capacity_c, a.capacity_k, a.mu) < std::tie(b.capacity_c, b.capacity_k, b.mu);
    });

    parallel_for(table.size(), [&](std::size_t i) {
        Candidate& cand = table[i];
        const SystemParams& p = cand.record.params;
        if (!(p.gamma > 0.0 && p.gamma < p.mu) || !(p.capacity_c >= 1 && p.capacity_c <= p.capacity_k)) {
            cand.record.error = "infeasible: outside 0 < gamma < mu, 1 <= C <= K";
            return;
        }
        cand.record = evaluate(p, prices);
        cand.feasible = cand.record.ok();
        if (cand.feasible) cand.objective = objective(cand.record.metrics);
    });

    const Candidate* best = nullptr;
    for (const auto& cand : table)
        if (cand.feasible && (best == nullptr || cand.objective < best->objective)) best = &cand;
    if (best == nullptr) throw EmptyFeasibleSetError("no grid candidate is feasible");

    OptimizationResult out;
    out.winner = best->record;
    out.objective = best->objective;
    out.table = std::move(table);
    return out;
}

}  // namespace

void ProfitPrices::validate() const {
    if (!(std::isfinite(cost_c) && cost_c >= 0.0)) throw ConfigError("cost_c must be finite and >= 0");
    if (!(std::isfinite(benefit_psi) && benefit_psi >= 0.0)) throw ConfigError("benefit_psi must be finite and >= 0");
}

const char* to_string(MetricsSource source) {
    switch (source) {
        case MetricsSource::fixed_point: return "fixed_point";
        case MetricsSource::ode_terminal: return "ode_terminal";
        case MetricsSource::simulation: return "simulation";
    }
    return "unknown";
}

Metrics compute_metrics(const FractionVector& p, const SystemParams& params, const ProfitPrices& prices) {
    Metrics m;
    m.p0 = p.front();
    m.pK = p.back();
    m.p_problematic = m.p0 + m.pK;
    m.mean_bikes = p.mean_level();
    m.profit = -prices.cost_c * m.mean_bikes + prices.benefit_psi * (params.capacity_c - m.mean_bikes);
    return m;
}

SystemParams with_parameter(SystemParams base, const std::string& name, double value) {
    auto as_int = [&](const char* what) {
        if (value != std::floor(value)) throw ConfigError(std::string(what) + " must be an integer");
        return static_cast<int>(value);
    };
    if (name == "lambda") base.lambda = value;
    else if (name == "mu") base.mu = value;
    else if (name == "gamma") base.gamma = value;
    else if (name == "delta") base.delta = value;
    else if (name == "omega") base.omega = as_int("omega");
    else if (name == "capacity_c") base.capacity_c = as_int("capacity_c");
    else if (name == "capacity_k") base.capacity_k = as_int("capacity_k");
    else throw ConfigError("unknown sweep parameter '" + name + "'");
    return base;
}

std::vector<double> linear_grid(double from, double to, int points) {
    if (points < 1) throw ConfigError("grid needs at least one point");
    if (points == 1) return {from};
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = from + (to - from) * i / (points - 1);
    grid.back() = to;
    return grid;
}

std::vector<SweepRecord> sweep(const SystemParams& base, const std::string& vary, const std::vector<double>& grid,
                               const ProfitPrices& prices) {
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    prices.validate();
    std::vector<SystemParams> points;
    points.reserve(grid.size());
    for (double v : grid) points.push_back(with_parameter(base, vary, v));

    std::vector<SweepRecord> records(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { records[i] = evaluate(points[i], prices); });
    return records;
}

void write_sweep_csv(std::ostream& os, const std::string& vary, const std::vector<double>& grid,
                     const std::vector<SweepRecord>& records) {
    const auto old = os.precision(17);
    os << "vary_name,value,p0,pK,p0_plus_pK,eq,profit\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        os << vary << ',' << grid[i];
        if (r.ok()) {
            const auto& m = r.metrics;
            os << ',' << m.p0 << ',' << m.pK << ',' << m.p_problematic << ',' << m.mean_bikes << ',' << m.profit;
        } else {
            os << ",nan,nan,nan,nan,nan";
        }
        os << '\n';
    }
    os.precision(old);
}

OptimizationResult optimize_weighted(const DesignGrid& search, const SystemParams& base,
                                     const std::array<double, 3>& beta) {
    double total = 0.0;
    for (double b : beta) {
        if (!(b >= 0.0)) throw ConfigError("weights must be nonnegative");
        total += b;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("weights must sum to 1");
    return optimize(search, base, ProfitPrices{}, [&](const Metrics& m) {
        return beta[0] * m.p0 + beta[1] * m.pK + beta[2] * m.p_problematic;
    });
}

OptimizationResult optimize_profit(const DesignGrid& search, const SystemParams& base, const ProfitPrices& prices) {
    prices.validate();
    return optimize(search, base, prices, [](const Metrics& m) { return -m.profit; });
}

void write_candidates_csv(std::ostream& os, const std::vector<Candidate>& table) {
    const auto old = os.precision(17);
    os << "capacity_c,capacity_k,mu,feasible,p0,pK,p0_plus_pK,eq,profit,objective,error\n";
    for (const auto& c : table) {
        const auto& p = c.record.params;
        const auto& m = c.record.metrics;
        os << p.capacity_c << ',' << p.capacity_k << ',' << p.mu << ',' << (c.feasible ? 1 : 0) << ',';
        if (c.feasible)
            os << m.p0 << ',' << m.pK << ',' << m.p_problematic << ',' << m.mean_bikes << ',' << m.profit << ','
               << c.objective << ',';
        else
            os << "nan,nan,nan,nan,nan,nan,";
        std::string err = c.record.error.value_or("");
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << '"' << err << '"' << '\n';
    }
    os.precision(old);
}

}  // namespace bikeshare

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bikeshare/params.hpp"

namespace bikeshare {

struct Metrics {
    double p0 = 0.0;
    double pK = 0.0;
    double p_problematic = 0.0;
    double mean_bikes = 0.0;
    double profit = 0.0;
};

struct ProfitPrices {
    double cost_c = 0.0;
    double benefit_psi = 0.0;

    void validate() const;
};

enum class MetricsSource { fixed_point, ode_terminal, simulation };

const char* to_string(MetricsSource source);

struct SweepRecord {
    SystemParams params;
    Metrics metrics;
    MetricsSource source = MetricsSource::fixed_point;
    /// Name and message of the solver error for this point, if any.
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
};

/// p0, pK, their sum, E[Q] = sum_k k p_k and R = -c E[Q] + psi (C - E[Q]).
Metrics compute_metrics(const FractionVector& p, const SystemParams& params, const ProfitPrices& prices);

/// Sweepable parameters: lambda, mu, gamma, omega, capacity_c, capacity_k, delta.
SystemParams with_parameter(SystemParams base, const std::string& name, double value);

/// `points` evenly spaced values from `from` to `to` inclusive.
std::vector<double> linear_grid(double from, double to, int points);

/// One fixed-point solve per grid value; solver failures are attached to the
/// record. Points are evaluated in parallel and returned in grid order.
std::vector<SweepRecord> sweep(const SystemParams& base, const std::string& vary, const std::vector<double>& grid,
                               const ProfitPrices& prices);

/// Header "vary_name,value,p0,pK,p0_plus_pK,eq,profit".
void write_sweep_csv(std::ostream& os, const std::string& vary, const std::vector<double>& grid,
                     const std::vector<SweepRecord>& records);

struct DesignGrid {
    std::vector<int> capacity_c;
    std::vector<int> capacity_k;
    std::vector<double> mu;
};

struct Candidate {
    SweepRecord record;
    bool feasible = false;
    double objective = 0.0;
};

struct OptimizationResult {
    SweepRecord winner;
    double objective = 0.0;
    /// Every (C, K, mu) combination in lexicographic order.
    std::vector<Candidate> table;
};

/// Minimizes b1 p0 + b2 pK + b3 (p0 + pK) over feasible grid points
/// (0 < gamma < mu, 1 <= C <= K and a solvable fixed point). Ties go to the
/// lexicographically smallest (C, K, mu).
OptimizationResult optimize_weighted(const DesignGrid& search, const SystemParams& base,
                                     const std::array<double, 3>& beta);

/// Maximizes the station profit R over the same grid.
OptimizationResult optimize_profit(const DesignGrid& search, const SystemParams& base, const ProfitPrices& prices);

/// Grid table: "capacity_c,capacity_k,mu,feasible,p0,pK,p0_plus_pK,eq,profit,objective,error".
void write_candidates_csv(std::ostream& os, const std::vector<Candidate>& table);

}  // namespace bikeshare

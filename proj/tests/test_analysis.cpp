#include <doctest.h>

#include <sstream>
#include <string>

#include "bikeshare/analysis.hpp"
#include "bikeshare/errors.hpp"
#include "bikeshare/fixed_point.hpp"
#include "bikeshare/rng.hpp"
#include "test_support.hpp"

using namespace bikeshare;

namespace {

SystemParams fig_base(double mu = 8.0) { return testing::station50(15.0, mu); }

std::vector<double> column(const std::vector<SweepRecord>& rows, double Metrics::*field) {
    std::vector<double> out;
    for (const auto& r : rows) {
        REQUIRE(r.ok());
        out.push_back(r.metrics.*field);
    }
    return out;
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

}  // namespace

TEST_CASE("metrics") {
    SystemParams p = testing::analytic_uniform();  // C = 3, K = 4
    const ProfitPrices prices{2.0, 5.0};

    const auto m = compute_metrics(FractionVector::uniform(4), p, prices);
    CHECK(m.mean_bikes == doctest::Approx(2.0));
    CHECK(m.p0 == doctest::Approx(0.2));
    CHECK(m.pK == doctest::Approx(0.2));
    CHECK(m.p_problematic == m.p0 + m.pK);
    CHECK(m.p_problematic == doctest::Approx(0.4));
    CHECK(m.profit == doctest::Approx(-2.0 * 2.0 + 5.0 * (3.0 - 2.0)));

    const auto at_c = compute_metrics(FractionVector::point_mass(4, 3), p, prices);
    CHECK(at_c.profit == doctest::Approx(-2.0 * 3.0));
    const auto empty = compute_metrics(FractionVector::point_mass(4, 0), p, prices);
    CHECK(empty.profit == doctest::Approx(5.0 * 3.0));

    CHECK_THROWS_AS((ProfitPrices{-1.0, 0.0}).validate(), ConfigError);
}

TEST_CASE("parameter helpers") {
    const auto g = linear_grid(10.0, 30.0, 41);
    REQUIRE(g.size() == 41);
    CHECK(g.front() == 10.0);
    CHECK(g.back() == 30.0);
    CHECK(g[20] == doctest::Approx(20.0));
    CHECK(linear_grid(3.0, 9.0, 1) == std::vector<double>{3.0});

    const auto p = with_parameter(fig_base(), "capacity_c", 20);
    CHECK(p.capacity_c == 20);
    CHECK_THROWS_AS(with_parameter(fig_base(), "capacity_c", 20.5), ConfigError);
    CHECK_THROWS_AS(with_parameter(fig_base(), "nonsense", 1.0), ConfigError);
}

TEST_CASE("lambda sweeps") {
    const auto lambdas = linear_grid(10.0, 30.0, 41);
    const ProfitPrices prices{};

    SUBCASE("empty-station probability rises with arrivals") {
        CHECK(strictly_increasing(column(sweep(fig_base(8.0), "lambda", lambdas, prices), &Metrics::p0)));
    }
    SUBCASE("full-station probability falls with arrivals") {
        for (double mu : {4.0, 8.0, 12.0})
            CHECK(strictly_decreasing(column(sweep(fig_base(mu), "lambda", lambdas, prices), &Metrics::pK)));
    }
    SUBCASE("mean docked bikes fall with arrivals") {
        for (double mu : {2.0, 5.0, 8.0}) {
            const auto rows = sweep(fig_base(mu), "lambda", lambdas, prices);
            for (const auto& r : rows) REQUIRE(r.ok());
            CHECK(strictly_decreasing(column(rows, &Metrics::mean_bikes)));
        }
    }
    SUBCASE("records come back in grid order") {
        const auto rows = sweep(fig_base(), "lambda", lambdas, prices);
        for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].params.lambda == lambdas[i]);
    }
    SUBCASE("solver errors are attached per point") {
        SystemParams base = fig_base();
        const auto rows = sweep(base, "capacity_c", {10.0, 60.0}, prices);
        CHECK(rows[0].ok());
        CHECK_FALSE(rows[1].ok());
    }
}

TEST_CASE("sweep csv") {
    const auto grid = linear_grid(10.0, 12.0, 3);
    const auto rows = sweep(fig_base(), "lambda", grid, ProfitPrices{1.0, 2.0});
    std::ostringstream os;
    write_sweep_csv(os, "lambda", grid, rows);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "vary_name,value,p0,pK,p0_plus_pK,eq,profit");
    std::getline(is, line);
    CHECK(line.rfind("lambda,10,", 0) == 0);
}

TEST_CASE("weighted optimizer") {
    const SystemParams base = fig_base();
    DesignGrid grid{{20, 30}, {40, 50}, {6.0, 8.0}};

    SUBCASE("pure weights select the plain argmin") {
        for (int which = 0; which < 3; ++which) {
            std::array<double, 3> beta{0.0, 0.0, 0.0};
            beta[which] = 1.0;
            const auto result = optimize_weighted(grid, base, beta);
            double best = INFINITY;
            for (const auto& c : result.table) {
                if (!c.feasible) continue;
                const auto& m = c.record.metrics;
                const double v = which == 0 ? m.p0 : which == 1 ? m.pK : m.p_problematic;
                best = std::min(best, v);
            }
            CHECK(result.objective == best);
        }
    }
    SUBCASE("single candidate") {
        const auto result = optimize_weighted(DesignGrid{{25}, {45}, {7.0}}, base, {0.2, 0.3, 0.5});
        CHECK(result.winner.params.capacity_c == 25);
        CHECK(result.winner.params.capacity_k == 45);
        CHECK(result.winner.params.mu == 7.0);
    }
    SUBCASE("a dominated candidate never wins") {
        // larger stations dominate smaller ones at some service rates
        const DesignGrid wide{{20, 30}, {45, 60}, {2.0, 8.0}};
        const auto table = optimize_weighted(wide, base, {1, 0, 0}).table;
        std::vector<std::size_t> dominated;
        for (std::size_t i = 0; i < table.size(); ++i)
            for (std::size_t j = 0; j < table.size(); ++j) {
                const auto& mi = table[i].record.metrics;
                const auto& mj = table[j].record.metrics;
                if (table[i].feasible && table[j].feasible && mi.p0 < mj.p0 && mi.pK < mj.pK)
                    dominated.push_back(j);
            }
        REQUIRE_FALSE(dominated.empty());
        Rng rng(13, 0);
        for (std::size_t worse : dominated) {
            const auto& w = table[worse].record.params;
            for (int i = 0; i < 20; ++i) {
                const double x = rng.exponential(1.0), y = rng.exponential(1.0), z = rng.exponential(1.0);
                const double s = x + y + z;
                const auto result = optimize_weighted(wide, base, {x / s, y / s, 1.0 - x / s - y / s});
                const auto& win = result.winner.params;
                CHECK_FALSE((win.capacity_c == w.capacity_c && win.capacity_k == w.capacity_k && win.mu == w.mu));
            }
        }
    }
    SUBCASE("infeasible grid") {
        CHECK_THROWS_AS(optimize_weighted(DesignGrid{{50}, {50}, {8.0}}, base, {1, 0, 0}), EmptyFeasibleSetError);
        CHECK_THROWS_AS(optimize_weighted(DesignGrid{{30}, {50}, {0.2}}, base, {1, 0, 0}), EmptyFeasibleSetError);
    }
    SUBCASE("bad weights") {
        CHECK_THROWS_AS(optimize_weighted(grid, base, {0.5, 0.6, -0.1}), ConfigError);
        CHECK_THROWS_AS(optimize_weighted(grid, base, {0.5, 0.6, 0.1}), ConfigError);
    }
}

TEST_CASE("profit optimizer") {
    const SystemParams base = fig_base();
    const DesignGrid grid{{20, 30}, {40, 50}, {6.0, 8.0}};

    SUBCASE("free parking and no benefit ties everything") {
        const auto r = optimize_profit(grid, base, ProfitPrices{0.0, 0.0});
        CHECK(r.winner.params.capacity_c == 20);
        CHECK(r.winner.params.capacity_k == 40);
        CHECK(r.winner.params.mu == 6.0);
    }
    SUBCASE("pure cost minimizes docked bikes") {
        const auto r = optimize_profit(grid, base, ProfitPrices{1.0, 0.0});
        double best = INFINITY;
        for (const auto& c : r.table)
            if (c.feasible) best = std::min(best, c.record.metrics.mean_bikes);
        CHECK(r.winner.metrics.mean_bikes == best);
    }
    SUBCASE("pure benefit maximizes bikes in circulation") {
        const auto r = optimize_profit(grid, base, ProfitPrices{0.0, 1.0});
        double best = -INFINITY;
        for (const auto& c : r.table)
            if (c.feasible) best = std::max(best, c.record.params.capacity_c - c.record.metrics.mean_bikes);
        CHECK(r.winner.params.capacity_c - r.winner.metrics.mean_bikes == best);
    }
    SUBCASE("table csv") {
        const auto r = optimize_profit(grid, base, ProfitPrices{1.0, 2.0});
        CHECK(r.table.size() == 8);
        std::ostringstream os;
        write_candidates_csv(os, r.table);
        CHECK(os.str().rfind("capacity_c,capacity_k,mu,feasible,", 0) == 0);
    }
}

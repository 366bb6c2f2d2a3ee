#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bikeshare/dynamics.hpp"
#include "bikeshare/errors.hpp"
#include "bikeshare/fixed_point.hpp"
#include "bikeshare/rng.hpp"
#include "bikeshare/simulator.hpp"
#include "test_support.hpp"

using namespace bikeshare;

namespace {

SimConfig small_config(long n, std::uint64_t seed) {
    SimConfig cfg;
    cfg.params = testing::station50();
    cfg.params.n_stations = n;
    cfg.seed = seed;
    cfg.t_warmup = 5.0;
    cfg.t_measure = 20.0;
    cfg.sample_interval = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("random streams") {
    Rng a(1, 0);
    Rng b(1, 0);
    Rng c(1, 1);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x > 0.0);
        CHECK(x < 1.0);
        differs = differs || x != c.uniform();
    }
    CHECK(differs);

    Rng d(9, 2);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto j = d.index_except(8, 3);
        REQUIRE(j < 8);
        REQUIRE(j != 3);
        ++hits[j < 3 ? j : j - 1];
    }
    for (int h : hits) CHECK(std::abs(h - 10000) < 500);

    double mean = 0.0;
    for (int i = 0; i < 100000; ++i) mean += d.exponential(4.0);
    CHECK(mean / 100000 == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("simulation invariants") {
    const auto cfg = small_config(200, 42);
    const auto report = simulate(cfg);
    CHECK(report.invariants_checked);
    CHECK(report.window_length == doctest::Approx(cfg.t_measure));

    const auto v = report.time_avg_measure.values();
    CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 1.0) < 1e-9);

    const auto& ev = report.event_counts;
    CHECK(ev.walk_starts + report.walkers_at_window_start ==
          ev.walk_abandonments + ev.rentals_after_walk + report.walkers_at_end);
    CHECK(ev.immediate_abandonments == 0);  // omega = 1

    SUBCASE("arrival count is Poisson with mean N lambda T") {
        const double expected = cfg.params.n_stations * cfg.params.lambda * cfg.t_measure;
        CHECK(std::abs(static_cast<double>(ev.arrivals) - expected) < 4.0 * std::sqrt(expected));
    }
    SUBCASE("every arrival is a rental, a walk or an abandonment") {
        // rentals counts both direct rentals and rentals after a walk
        CHECK(ev.arrivals == ev.rentals - ev.rentals_after_walk + ev.walk_starts + ev.immediate_abandonments);
    }
    SUBCASE("joint occupancy marginals match the single-station averages") {
        const int K = cfg.params.capacity_k;
        double total = std::accumulate(report.joint_counts.begin(), report.joint_counts.end(), 0.0);
        CHECK(total == doctest::Approx(cfg.t_measure));
        double row_mass = 0.0;
        for (int j = 0; j <= K; ++j) row_mass += report.joint(0, j);
        CHECK(row_mass / total >= 0.0);
        CHECK(row_mass / total <= 1.0);
    }
}

TEST_CASE("walk budget with no walks allowed") {
    SimConfig cfg;
    cfg.params = testing::analytic_half();
    cfg.params.omega = 0;
    cfg.params.lambda = 5.0;
    cfg.params.mu = 0.5;
    cfg.params.gamma = 0.5;
    cfg.params.n_stations = 50;
    cfg.seed = 3;
    cfg.t_measure = 50.0;
    const auto report = simulate(cfg);
    CHECK(report.event_counts.walk_starts == 0);
    CHECK(report.event_counts.rentals_after_walk == 0);
    CHECK(report.event_counts.immediate_abandonments > 0);
    CHECK(report.event_counts.abandonments() == report.event_counts.immediate_abandonments);
}

TEST_CASE("longer walk budgets") {
    SimConfig cfg;
    cfg.params = testing::station50(40.0, 2.0);
    cfg.params.omega = 3;
    cfg.params.gamma = 1.5;
    cfg.params.n_stations = 100;
    cfg.seed = 8;
    cfg.t_warmup = 2.0;
    cfg.t_measure = 10.0;
    const auto report = simulate(cfg);
    const auto& ev = report.event_counts;
    CHECK(ev.walk_starts > 0);
    CHECK(ev.walk_abandonments > 0);
    CHECK(ev.walk_starts + report.walkers_at_window_start ==
          ev.walk_abandonments + ev.rentals_after_walk + report.walkers_at_end);
}

TEST_CASE("determinism") {
    auto cfg = small_config(100, 7);
    cfg.record_trajectory = true;
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    CHECK(a == b);
    REQUIRE(a.trajectory.has_value());
    CHECK(a.trajectory->times.size() == 26);

    cfg.seed = 8;
    CHECK_FALSE(simulate(cfg) == a);

    cfg.first_ride_includes_origin = false;
    CHECK_NOTHROW(simulate(cfg));
}

TEST_CASE("config validation") {
    auto cfg = small_config(10, 1);
    cfg.t_measure = 0.0;
    CHECK_THROWS_AS(simulate(cfg), ConfigError);
    cfg = small_config(10, 1);
    cfg.sample_interval = 0.0;
    CHECK_THROWS_AS(simulate(cfg), ConfigError);
    cfg = small_config(10, 1);
    cfg.params.capacity_c = 60;
    CHECK_THROWS_AS(simulate(cfg), ConfigError);
}

TEST_CASE("independence statistic") {
    SUBCASE("empty measurement") {
        SimReport empty;
        empty.capacity_k = 2;
        empty.joint_counts.assign(9, 0.0);
        CHECK_THROWS_AS(independence_statistic(empty), EmptyMeasurementError);
    }
    SUBCASE("product table gives zero") {
        SimReport r;
        r.capacity_k = 1;
        // marginals (0.25, 0.75) and (0.5, 0.5)
        r.joint_counts = {0.125, 0.125, 0.375, 0.375};
        CHECK(independence_statistic(r) == doctest::Approx(0.0).scale(1.0));
    }
    SUBCASE("perfect correlation") {
        SimReport r;
        r.capacity_k = 1;
        r.joint_counts = {0.5, 0.0, 0.0, 0.5};
        CHECK(independence_statistic(r) == doctest::Approx(0.25));
    }
    SUBCASE("two stations are more dependent than many") {
        SimConfig two;
        two.params = testing::analytic_half();
        two.params.n_stations = 2;
        two.seed = 5;
        two.t_warmup = 10.0;
        two.t_measure = 2000.0;
        auto many = two;
        many.params.n_stations = 500;
        CHECK(independence_statistic(simulate(two)) > independence_statistic(simulate(many)));
    }
}

TEST_CASE("empirical measure against the ODE") {
    auto cfg = small_config(300, 11);
    cfg.t_warmup = 0.0;
    cfg.t_measure = 2.0;
    cfg.sample_interval = 0.1;
    const double gap = empirical_vs_ode(cfg);
    CHECK(gap >= 0.0);
    CHECK(gap < 0.2);
    CHECK(empirical_vs_ode(cfg) == gap);
}

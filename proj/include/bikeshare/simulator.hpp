#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bikeshare/dynamics.hpp"
#include "bikeshare/params.hpp"

namespace bikeshare {

struct SimConfig {
    SystemParams params;
    std::uint64_t seed = 1;
    double t_warmup = 0.0;
    double t_measure = 100.0;
    double sample_interval = 1.0;
    /// Record Y^(N)(t) every sample_interval from t = 0.
    bool record_trajectory = false;
    /// Whether a ride's first destination may be its origin station.
    bool first_ride_includes_origin = true;

    void validate() const;
};

struct EventCounts {
    std::uint64_t arrivals = 0;
    std::uint64_t rentals = 0;
    std::uint64_t rentals_after_walk = 0;
    std::uint64_t walk_starts = 0;
    /// Walkers who used up their walk budget.
    std::uint64_t walk_abandonments = 0;
    /// Arrivals at an empty station when omega == 0.
    std::uint64_t immediate_abandonments = 0;
    std::uint64_t re_rides = 0;
    std::uint64_t returns = 0;

    std::uint64_t abandonments() const noexcept { return walk_abandonments + immediate_abandonments; }
    bool operator==(const EventCounts&) const = default;
};

/// Per-station bike counts plus the customers currently away from a dock.
struct SimState {
    struct Walker {
        int walks_remaining;
        int station;  // where the current walk started
    };
    struct Rider {
        int exclude;  // station a re-ride must avoid, or -1
    };

    std::vector<int> station_bikes;
    std::vector<Walker> walkers;
    std::vector<Rider> riders;
    double clock = 0.0;

    long riding() const noexcept { return static_cast<long>(riders.size()); }
};

struct SimReport {
    /// Time-averaged empirical measure over the measurement window.
    FractionVector time_avg_measure;
    std::optional<Trajectory> trajectory;
    /// Time spent with (X_1, X_2) = (i, j), row-major, (K+1) x (K+1).
    std::vector<double> joint_counts;
    int capacity_k = 0;
    /// Counts over the measurement window only.
    EventCounts event_counts;
    double window_length = 0.0;
    std::uint64_t walkers_at_window_start = 0;
    std::uint64_t walkers_at_end = 0;
    std::uint64_t total_events = 0;
    /// Conservation and capacity were checked at every event.
    bool invariants_checked = false;

    double joint(int i, int j) const { return joint_counts[static_cast<std::size_t>(i) * (capacity_k + 1) + j]; }
    bool operator==(const SimReport& other) const;
};

/// Event-driven simulation of the N-station system. Event classes compete
/// exponentially with aggregate rates N lambda, gamma * walkers and
/// mu * riders; the individual within a class is picked uniformly.
SimReport simulate(const SimConfig& config);

/// max_{i,j} |J(i,j) - m1(i) m2(j)| for the normalized joint occupancy of
/// stations 1 and 2.
double independence_statistic(const SimReport& report);

/// Sup over sample times of the sup-norm gap between the simulated empirical
/// measure and the limiting ODE started from every station at C.
double empirical_vs_ode(const SimConfig& config);

}  // namespace bikeshare

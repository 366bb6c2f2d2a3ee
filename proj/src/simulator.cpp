#include "bikeshare/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bikeshare/errors.hpp"
#include "bikeshare/rng.hpp"

namespace bikeshare {

namespace {

enum Stream : std::uint64_t { kClock = 0, kArrival = 1, kWalk = 2, kRide = 3 };

// Lazily integrated time spent by the system at each station level and by
// the pair (station 0, station 1), clipped to the measurement window.
class Occupancy {
public:
    Occupancy(int K, double window_start, double window_end)
        : K_(K), w0_(window_start), w1_(window_end), acc_(K + 1, 0.0), last_(K + 1, 0.0),
          joint_((K + 1) * (K + 1), 0.0) {}

    double overlap(double from, double to) const {
        return std::max(0.0, std::min(to, w1_) - std::max(from, w0_));
    }

    void level_changing(int level, long count, double t) {
        acc_[level] += static_cast<double>(count) * overlap(last_[level], t);
        last_[level] = t;
    }

    void pair_changing(int x1, int x2, double t) {
        joint_[static_cast<std::size_t>(x1) * (K_ + 1) + x2] += overlap(last_pair_, t);
        last_pair_ = t;
    }

    std::vector<double>& levels() { return acc_; }
    std::vector<double>& joint() { return joint_; }

private:
    int K_;
    double w0_, w1_;
    std::vector<double> acc_;
    std::vector<double> last_;
    std::vector<double> joint_;
    double last_pair_ = 0.0;
};

class Engine {
public:
    explicit Engine(const SimConfig& cfg)
        : cfg_(cfg), p_(cfg.params), N_(cfg.params.n_stations), K_(cfg.params.capacity_k),
          t_end_(cfg.t_warmup + cfg.t_measure), occ_(K_, cfg.t_warmup, t_end_),
          clock_(cfg.seed, kClock), arrival_(cfg.seed, kArrival), walk_(cfg.seed, kWalk), ride_(cfg.seed, kRide) {
        state_.station_bikes.assign(N_, p_.capacity_c);
        level_count_.assign(K_ + 1, 0);
        level_count_[p_.capacity_c] = N_;
        parked_ = N_ * static_cast<long>(p_.capacity_c);
        fleet_ = parked_;
        if (cfg_.record_trajectory) trajectory_.emplace();
    }

    SimReport run() {
        bool window_open = false;
        while (true) {
            const double rate = static_cast<double>(N_) * p_.lambda +
                                p_.gamma * static_cast<double>(state_.walkers.size()) +
                                p_.mu * static_cast<double>(state_.riders.size());
            const double t_next = state_.clock + clock_.exponential(rate);
            if (t_next > t_end_) break;
            record_samples_before(t_next);
            if (!window_open && t_next >= cfg_.t_warmup) {
                window_open = true;
                report_.walkers_at_window_start = state_.walkers.size();
            }
            state_.clock = t_next;
            counting_ = window_open;

            const double pick = clock_.uniform() * rate;
            const double arrival_rate = static_cast<double>(N_) * p_.lambda;
            const double walk_rate = p_.gamma * static_cast<double>(state_.walkers.size());
            if (pick < arrival_rate) {
                on_arrival();
            } else if (pick < arrival_rate + walk_rate && !state_.walkers.empty()) {
                on_walk_completion();
            } else if (!state_.riders.empty()) {
                on_ride_completion();
            } else {
                on_arrival();
            }
            ++report_.total_events;
            check_conservation();
        }
        if (!window_open) report_.walkers_at_window_start = state_.walkers.size();
        finish();
        return std::move(report_);
    }

private:
    void record_samples_before(double t) {
        if (!trajectory_) return;
        while (true) {
            const double s = static_cast<double>(next_sample_) * cfg_.sample_interval;
            if (s >= t || s > t_end_) break;
            std::vector<double> y(K_ + 1);
            for (int k = 0; k <= K_; ++k) y[k] = static_cast<double>(level_count_[k]) / static_cast<double>(N_);
            trajectory_->times.push_back(s);
            trajectory_->states.emplace_back(std::move(y));
            ++next_sample_;
        }
    }

    void move_bikes(int station, int delta) {
        const int before = state_.station_bikes[station];
        const int after = before + delta;
        if (after < 0 || after > K_) {
            std::ostringstream os;
            os << "station " << station << " would hold " << after << " bikes";
            throw InvariantViolation(os.str());
        }
        const double t = state_.clock;
        if (station < 2) occ_.pair_changing(state_.station_bikes[0], state_.station_bikes[1], t);
        occ_.level_changing(before, level_count_[before], t);
        occ_.level_changing(after, level_count_[after], t);
        --level_count_[before];
        ++level_count_[after];
        state_.station_bikes[station] = after;
        parked_ += delta;
    }

    void start_ride(int origin) {
        state_.riders.push_back({cfg_.first_ride_includes_origin ? -1 : origin});
    }

    void on_arrival() {
        const auto station = static_cast<int>(arrival_.index(static_cast<std::uint64_t>(N_)));
        if (counting_) ++report_.event_counts.arrivals;
        if (state_.station_bikes[station] > 0) {
            move_bikes(station, -1);
            start_ride(station);
            if (counting_) ++report_.event_counts.rentals;
        } else if (p_.omega >= 1) {
            state_.walkers.push_back({p_.omega, station});
            if (counting_) ++report_.event_counts.walk_starts;
        } else if (counting_) {
            ++report_.event_counts.immediate_abandonments;
        }
    }

    void on_walk_completion() {
        const auto w = static_cast<std::size_t>(walk_.index(state_.walkers.size()));
        auto& walker = state_.walkers[w];
        const auto dest = static_cast<int>(
            walk_.index_except(static_cast<std::uint64_t>(N_), static_cast<std::uint64_t>(walker.station)));
        bool leaves = false;
        if (state_.station_bikes[dest] > 0) {
            move_bikes(dest, -1);
            start_ride(dest);
            leaves = true;
            if (counting_) {
                ++report_.event_counts.rentals;
                ++report_.event_counts.rentals_after_walk;
            }
        } else if (--walker.walks_remaining > 0) {
            walker.station = dest;
        } else {
            leaves = true;
            if (counting_) ++report_.event_counts.walk_abandonments;
        }
        if (leaves) {
            state_.walkers[w] = state_.walkers.back();
            state_.walkers.pop_back();
        }
    }

    void on_ride_completion() {
        const auto r = static_cast<std::size_t>(ride_.index(state_.riders.size()));
        auto& rider = state_.riders[r];
        const auto n = static_cast<std::uint64_t>(N_);
        const auto dest = static_cast<int>(rider.exclude < 0 ? ride_.index(n)
                                                             : ride_.index_except(n, static_cast<std::uint64_t>(rider.exclude)));
        if (state_.station_bikes[dest] < K_) {
            move_bikes(dest, +1);
            state_.riders[r] = state_.riders.back();
            state_.riders.pop_back();
            if (counting_) ++report_.event_counts.returns;
        } else {
            rider.exclude = dest;
            if (counting_) ++report_.event_counts.re_rides;
        }
    }

    void check_conservation() const {
        if (parked_ + state_.riding() != fleet_) {
            std::ostringstream os;
            os << "bike conservation broken at t = " << state_.clock << ": parked " << parked_ << " + riding "
               << state_.riding() << " != " << fleet_;
            throw InvariantViolation(os.str());
        }
    }

    void finish() {
        record_samples_before(std::nextafter(t_end_, 2.0 * t_end_ + 1.0));
        occ_.pair_changing(state_.station_bikes[0], state_.station_bikes[1], t_end_);
        for (int k = 0; k <= K_; ++k) occ_.level_changing(k, level_count_[k], t_end_);

        long recount = 0;
        for (int b : state_.station_bikes) recount += b;
        if (recount != parked_) throw InvariantViolation("parked bike recount disagrees with running total");

        std::vector<double> measure = std::move(occ_.levels());
        double total = 0.0;
        for (double v : measure) total += v;
        if (total > 0.0) {
            for (double& v : measure) v /= total;
        } else {
            std::fill(measure.begin(), measure.end(), 0.0);
            measure[p_.capacity_c] = 1.0;
        }
        report_.time_avg_measure = FractionVector(std::move(measure));
        report_.joint_counts = std::move(occ_.joint());
        report_.capacity_k = K_;
        report_.window_length = cfg_.t_measure;
        report_.walkers_at_end = state_.walkers.size();
        report_.invariants_checked = true;
        report_.trajectory = std::move(trajectory_);
    }

    const SimConfig& cfg_;
    const SystemParams& p_;
    const long N_;
    const int K_;
    const double t_end_;
    Occupancy occ_;
    Rng clock_, arrival_, walk_, ride_;
    SimState state_;
    std::vector<long> level_count_;
    long parked_ = 0;
    long fleet_ = 0;
    bool counting_ = false;
    long next_sample_ = 0;
    std::optional<Trajectory> trajectory_;
    SimReport report_;
};

}  // namespace

void SimConfig::validate() const {
    params.validate();
    if (!(t_warmup >= 0.0) || !std::isfinite(t_warmup)) throw ConfigError("simulate: t_warmup must be >= 0");
    if (!(t_measure > 0.0) || !std::isfinite(t_measure)) throw ConfigError("simulate: t_measure must be > 0");
    if (!(sample_interval > 0.0)) throw ConfigError("simulate: sample_interval must be > 0");
}

bool SimReport::operator==(const SimReport& o) const {
    auto same_traj = [](const std::optional<Trajectory>& a, const std::optional<Trajectory>& b) {
        if (a.has_value() != b.has_value()) return false;
        if (!a) return true;
        if (a->times != b->times || a->states.size() != b->states.size()) return false;
        for (std::size_t i = 0; i < a->states.size(); ++i)
            if (a->states[i].vector() != b->states[i].vector()) return false;
        return true;
    };
    return time_avg_measure.vector() == o.time_avg_measure.vector() && same_traj(trajectory, o.trajectory) &&
           joint_counts == o.joint_counts && capacity_k == o.capacity_k && event_counts == o.event_counts &&
           window_length == o.window_length && walkers_at_window_start == o.walkers_at_window_start &&
           walkers_at_end == o.walkers_at_end && total_events == o.total_events;
}

SimReport simulate(const SimConfig& config) {
    config.validate();
    Engine engine(config);
    return engine.run();
}

double independence_statistic(const SimReport& report) {
    const int n = report.capacity_k + 1;
    if (report.joint_counts.size() != static_cast<std::size_t>(n) * n)
        throw EmptyMeasurementError("report carries no joint occupancy");
    double total = 0.0;
    for (double v : report.joint_counts) total += v;
    if (!(total > 0.0)) throw EmptyMeasurementError("measurement window produced no occupancy time");

    std::vector<double> m1(n, 0.0), m2(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v = report.joint(i, j) / total;
            m1[i] += v;
            m2[j] += v;
        }
    double stat = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) stat = std::max(stat, std::abs(report.joint(i, j) / total - m1[i] * m2[j]));
    return stat;
}

double empirical_vs_ode(const SimConfig& config) {
    SimConfig cfg = config;
    cfg.record_trajectory = true;
    const SimReport report = simulate(cfg);

    OdeConfig ode;
    ode.initial = default_initial(cfg.params);
    ode.t_end = cfg.t_warmup + cfg.t_measure;
    ode.step = std::min(default_step(cfg.params), cfg.sample_interval);
    ode.sample_interval = cfg.sample_interval;
    const Trajectory reference = integrate(ode, cfg.params, false);

    const Trajectory& sim = *report.trajectory;
    const std::size_t n = std::min(sim.times.size(), reference.times.size());
    if (n == 0) throw EmptyMeasurementError("no trajectory samples to compare");
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(sim.times[i] - reference.times[i]) > 1e-9 * std::max(1.0, sim.times[i])) break;
        gap = std::max(gap, sup_distance(sim.states[i].values(), reference.states[i].values()));
    }
    return gap;
}

}  // namespace bikeshare

#pragma once

#include "rfs/label.hpp"
#include "rfs/models.hpp"
#include "rfs/rng.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace rfs {

/// Birth/death schedule entry for one simulated target.
struct TruthScheduleEntry {
    int birth_step = 1;  // first step alive (1-based)
    int death_step = 1;  // last step alive, inclusive
    Eigen::Vector4d initial_state = Eigen::Vector4d::Zero();
};

/// One simulated trajectory, labeled (birth_step, index).
struct TruthTrajectory {
    Label label;
    int birth_step = 1;
    std::vector<Eigen::Vector4d> states;  // one per alive step

    bool alive(int step) const {
        int idx = step - birth_step;
        return idx >= 0 && idx < static_cast<int>(states.size());
    }
    const Eigen::Vector4d& state(int step) const { return states[step - birth_step]; }
    int death_step() const { return birth_step + static_cast<int>(states.size()) - 1; }
};

struct ScenarioConfig {
    int horizon = 0;
    MotionModel motion;
    bool truth_process_noise = true;
    std::vector<SensorModel> sensors;
    std::vector<TruthScheduleEntry> truth;

    void validate() const;  // throws std::invalid_argument on bad schedules
};

struct SimulationResult {
    std::vector<TruthTrajectory> truth;
    std::vector<MeasurementFrame> frames;  // one per step, 1..horizon

    int truth_cardinality(int step) const {
        int n = 0;
        for (const auto& t : truth)
            if (t.alive(step)) ++n;
        return n;
    }
};

/// Generate ground truth and per-sensor measurements. Deterministic in
/// (config, seed): truth first (process noise per target per step when
/// enabled), then per step and sensor a detection trial per alive target,
/// Poisson clutter uniform over the region, and a shuffle of the frame's
/// list so ordering carries no information.
SimulationResult simulate(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace rfs

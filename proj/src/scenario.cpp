#include "rfs/scenario.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

namespace rfs {

void ScenarioConfig::validate() const {
    if (sensors.empty()) throw std::invalid_argument("sensors: required");
    if (horizon < 0) throw std::invalid_argument("horizon: must be nonnegative");
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& t = truth[i];
        if (t.birth_step < 1 || t.death_step < t.birth_step)
            throw std::invalid_argument("truth[" + std::to_string(i) +
                                        "]: birth must precede death and start at step 1 or later");
    }
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const auto& s = sensors[i];
        if (s.id != static_cast<int>(i))
            throw std::invalid_argument("sensors: ids must run 0..V-1 in order");
        if (s.region.area() <= 0.0) throw std::invalid_argument("sensors: region must have positive area");
        if (s.clutter_rate < 0.0) throw std::invalid_argument("sensors: clutter_rate must be nonnegative");
    }
}

SimulationResult simulate(const ScenarioConfig& config, std::uint64_t seed) {
    config.validate();
    SimulationResult result;
    Pcg32 rng(seed, 0);

    // Truth pass: advance each scheduled target through the motion model.
    Eigen::Matrix4d noise_chol = Eigen::Matrix4d::Zero();
    if (config.truth_process_noise) {
        Eigen::LLT<Eigen::Matrix4d> llt(config.motion.process_noise +
                                        1e-12 * Eigen::Matrix4d::Identity());
        noise_chol = llt.matrixL();
    }
    for (std::size_t i = 0; i < config.truth.size(); ++i) {
        const auto& entry = config.truth[i];
        TruthTrajectory traj;
        traj.label = Label(entry.birth_step, static_cast<int>(i));
        traj.birth_step = entry.birth_step;
        Eigen::Vector4d x = entry.initial_state;
        int last = std::min(entry.death_step, config.horizon);
        for (int k = entry.birth_step; k <= last; ++k) {
            traj.states.push_back(x);
            x = config.motion.transition * x;
            if (config.truth_process_noise) {
                Eigen::Vector4d w;
                for (int d = 0; d < 4; ++d) w(d) = rng.normal();
                x += noise_chol * w;
            }
        }
        if (!traj.states.empty()) result.truth.push_back(std::move(traj));
    }

    // Measurement pass: detections, clutter, then shuffle per frame.
    for (int k = 1; k <= config.horizon; ++k) {
        MeasurementFrame frame;
        frame.time = k;
        frame.per_sensor.resize(config.sensors.size());
        for (std::size_t s = 0; s < config.sensors.size(); ++s) {
            const auto& sensor = config.sensors[s];
            Eigen::Matrix2d meas_chol = Eigen::LLT<Eigen::Matrix2d>(sensor.noise).matrixL();
            auto& list = frame.per_sensor[s];
            for (const auto& traj : result.truth) {
                if (!traj.alive(k)) continue;
                if (!rng.bernoulli(sensor.detection_probability)) continue;
                Eigen::Vector2d w(rng.normal(), rng.normal());
                Eigen::Vector2d z = sensor.observation * traj.state(k) + meas_chol * w;
                // the sensor only reports what falls inside its region
                if (sensor.region.contains(z[0], z[1])) list.push_back(z);
            }
            int clutter_count = rng.poisson(sensor.clutter_rate);
            for (int c = 0; c < clutter_count; ++c) {
                Eigen::Vector2d z(rng.uniform(sensor.region.x_min, sensor.region.x_max),
                                  rng.uniform(sensor.region.y_min, sensor.region.y_max));
                list.push_back(z);
            }
            rng.shuffle(list);
        }
        result.frames.push_back(std::move(frame));
    }
    return result;
}

}  // namespace rfs

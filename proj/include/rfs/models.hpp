#pragma once

#include "rfs/gaussian.hpp"

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace rfs {

/// Axis-aligned surveillance rectangle in meters.
struct Rect {
    double x_min = -1000.0, x_max = 1000.0;
    double y_min = -1000.0, y_max = 1000.0;

    double area() const { return (x_max - x_min) * (y_max - y_min); }
    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
};

/// Constant-velocity motion model on [p_x, v_x, p_y, v_y].
struct MotionModel {
    double delta_t = 1.0;
    Eigen::Matrix4d transition;     // block-diagonal [1 dt; 0 1] per axis
    Eigen::Matrix4d process_noise;  // G diag(accel_var) G^T per axis
    double survival_probability = 0.99;

    /// accel_var holds the acceleration-noise variances per axis, (m/s^2)^2.
    static MotionModel constant_velocity(double dt, const Eigen::Vector2d& accel_var,
                                         double survival);
};

/// Linear position sensor: z = H x + noise, Poisson clutter uniform over
/// the surveillance region.
struct SensorModel {
    int id = 0;
    Eigen::Matrix<double, 2, 4> observation;  // position selector
    Eigen::Matrix2d noise;
    double detection_probability = 0.95;
    double clutter_rate = 0.0;  // expected clutter count per scan
    Rect region;

    static SensorModel position_sensor(int id, const Eigen::Vector2d& noise_var,
                                       double detection_prob, double clutter_rate,
                                       const Rect& region);
};

/// Gaussian prior on a newborn object's state.
struct BirthPrior {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();
};

/// One time step of multi-sensor measurements. Measurements are 2-vectors
/// [p_x, p_y]; indexing into a sensor's list is 1-based in measurement
/// tuples, with 0 reserved for miss-detection.
struct MeasurementFrame {
    int time = 0;
    std::vector<std::vector<Eigen::Vector2d>> per_sensor;

    int sensors() const { return static_cast<int>(per_sensor.size()); }
    int count(int sensor_index) const {
        return static_cast<int>(per_sensor[sensor_index].size());
    }
    /// j is 1-based.
    const Eigen::Vector2d& measurement(int sensor_index, int j) const {
        return per_sensor[sensor_index][j - 1];
    }
};

/// Chapman-Kolmogorov step: mean and covariance through the transition,
/// process noise added, weight unchanged.
GaussianComponent predict_component(const GaussianComponent& component,
                                    const MotionModel& model);

/// Gaussian measurement marginal N(z; H m, H P H^T + R) and the
/// Kalman-conditioned component (Joseph-form covariance update).
/// Throws if the innovation covariance is not positive definite.
std::pair<double, GaussianComponent> measurement_marginal(const GaussianComponent& component,
                                                          const Eigen::Vector2d& z,
                                                          const SensorModel& sensor);

/// Same conditioning as measurement_marginal but returns log N, for use
/// inside log-domain products.
std::pair<double, GaussianComponent> log_measurement_marginal(const GaussianComponent& component,
                                                              const Eigen::Vector2d& z,
                                                              const SensorModel& sensor);

/// Clutter spatial intensity at z: rate over region area inside the
/// region, zero outside.
double clutter_intensity(const Eigen::Vector2d& z, const SensorModel& sensor);

}  // namespace rfs

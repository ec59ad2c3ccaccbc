#include "rfs/models.hpp"

#include <cmath>
#include <stdexcept>

namespace rfs {

MotionModel MotionModel::constant_velocity(double dt, const Eigen::Vector2d& accel_var,
                                           double survival) {
    MotionModel m;
    m.delta_t = dt;
    m.survival_probability = survival;

    Eigen::Matrix2d f;
    f << 1.0, dt, 0.0, 1.0;
    Eigen::Vector2d g(0.5 * dt * dt, dt);
    Eigen::Matrix2d q_axis = g * g.transpose();

    m.transition.setZero();
    m.process_noise.setZero();
    m.transition.block<2, 2>(0, 0) = f;
    m.transition.block<2, 2>(2, 2) = f;
    m.process_noise.block<2, 2>(0, 0) = accel_var(0) * q_axis;
    m.process_noise.block<2, 2>(2, 2) = accel_var(1) * q_axis;
    return m;
}

SensorModel SensorModel::position_sensor(int id, const Eigen::Vector2d& noise_var,
                                         double detection_prob, double clutter_rate,
                                         const Rect& region) {
    SensorModel s;
    s.id = id;
    s.observation << 1, 0, 0, 0,
                     0, 0, 1, 0;
    s.noise = noise_var.asDiagonal();
    s.detection_probability = detection_prob;
    s.clutter_rate = clutter_rate;
    s.region = region;
    return s;
}

GaussianComponent predict_component(const GaussianComponent& component,
                                    const MotionModel& model) {
    GaussianComponent out;
    out.weight = component.weight;
    out.mean = model.transition * component.mean;
    Eigen::MatrixXd cov =
        model.transition * component.covariance * model.transition.transpose() +
        model.process_noise;
    out.covariance = 0.5 * (cov + cov.transpose());
    return out;
}

std::pair<double, GaussianComponent> measurement_marginal(const GaussianComponent& component,
                                                          const Eigen::Vector2d& z,
                                                          const SensorModel& sensor) {
    auto [log_lik, updated] = log_measurement_marginal(component, z, sensor);
    return {std::exp(log_lik), std::move(updated)};
}

std::pair<double, GaussianComponent> log_measurement_marginal(const GaussianComponent& component,
                                                              const Eigen::Vector2d& z,
                                                              const SensorModel& sensor) {
    const auto& h = sensor.observation;
    Eigen::Vector2d predicted = h * component.mean;
    Eigen::Matrix2d s = h * component.covariance * h.transpose() + sensor.noise;
    s = 0.5 * (s + s.transpose());

    Eigen::LLT<Eigen::Matrix2d> llt(s);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("measurement_marginal: innovation covariance not positive definite");

    Eigen::Vector2d innovation = z - predicted;
    Eigen::Vector2d sol = llt.matrixL().solve(innovation);
    double log_det = 2.0 * (std::log(llt.matrixL()(0, 0)) + std::log(llt.matrixL()(1, 1)));
    constexpr double log_2pi = 1.8378770664093454836;
    double log_lik = -0.5 * (sol.squaredNorm() + 2.0 * log_2pi + log_det);

    Eigen::Matrix<double, 4, 2> gain =
        component.covariance * h.transpose() * llt.solve(Eigen::Matrix2d::Identity());
    GaussianComponent out;
    out.weight = component.weight;
    out.mean = component.mean + gain * innovation;
    Eigen::Matrix4d joseph = Eigen::Matrix4d::Identity() - gain * h;
    Eigen::MatrixXd cov = joseph * component.covariance * joseph.transpose() +
                          gain * sensor.noise * gain.transpose();
    out.covariance = 0.5 * (cov + cov.transpose());
    return {log_lik, std::move(out)};
}

double clutter_intensity(const Eigen::Vector2d& z, const SensorModel& sensor) {
    if (!sensor.region.contains(z(0), z(1))) return 0.0;
    if (sensor.clutter_rate <= 0.0) return 0.0;
    return sensor.clutter_rate / sensor.region.area();
}

}  // namespace rfs

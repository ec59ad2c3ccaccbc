#pragma once

// Shared fixtures and independent reference implementations for the test
// suites. Everything here is deliberately brute-force: grid quadrature,
// exhaustive enumeration, permutation search. The library must agree with
// these, not the other way around.

#include "rfs/birth.hpp"
#include "rfs/density.hpp"
#include "rfs/filters.hpp"
#include "rfs/models.hpp"
#include "rfs/rng.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace testsupport {

inline rfs::MotionModel test_motion(double dt = 1.0, double accel_var = 25.0,
                                    double survival = 0.99) {
    return rfs::MotionModel::constant_velocity(dt, Eigen::Vector2d(accel_var, accel_var),
                                               survival);
}

inline rfs::SensorModel test_sensor(int id, double noise_var = 25.0, double p_d = 0.9,
                                    double clutter_rate = 10.0, double half_width = 100.0) {
    rfs::Rect region{-half_width, half_width, -half_width, half_width};
    return rfs::SensorModel::position_sensor(id, Eigen::Vector2d(noise_var, noise_var), p_d,
                                             clutter_rate, region);
}

inline rfs::BirthPrior test_prior(double pos_var = 400.0, double vel_var = 25.0) {
    rfs::BirthPrior prior;
    prior.mean = Eigen::Vector4d::Zero();
    prior.covariance = Eigen::Vector4d(pos_var, vel_var, pos_var, vel_var).asDiagonal();
    return prior;
}

inline double gauss2(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                     const Eigen::Matrix2d& cov) {
    Eigen::Matrix2d inv = cov.inverse();
    Eigen::Vector2d d = x - mean;
    double quad = d.dot(inv * d);
    double det = cov.determinant();
    return std::exp(-0.5 * quad) / (2.0 * 3.14159265358979323846 * std::sqrt(det));
}

// psi_bar by 2D grid quadrature over position. Velocities integrate out of
// the linear position observation exactly, so the reference integrand is
// prior position marginal times the detected sensors' likelihood ratios,
// with miss factors (1 - p_D) multiplied outside the integral.
inline double psi_bar_quadrature(const rfs::MeasurementTuple& tuple,
                                 const rfs::MeasurementFrame& frame,
                                 const rfs::BirthPrior& prior,
                                 const std::vector<rfs::SensorModel>& sensors, int nodes = 801,
                                 double extent_sigmas = 8.5) {
    Eigen::Vector2d prior_mean(prior.mean[0], prior.mean[2]);
    Eigen::Matrix2d prior_cov;
    prior_cov << prior.covariance(0, 0), prior.covariance(0, 2), prior.covariance(2, 0),
        prior.covariance(2, 2);

    double miss_product = 1.0;
    std::vector<int> detected;
    for (std::size_t s = 0; s < sensors.size(); ++s) {
        if (tuple.indices[s] == 0)
            miss_product *= 1.0 - sensors[s].detection_probability;
        else
            detected.push_back(static_cast<int>(s));
    }
    if (detected.empty()) return miss_product;

    // Center the grid on the tightest factor so no mass is missed: take the
    // component-wise bounding box of the prior mean and the detected
    // measurements, padded by extent_sigmas of the widest factor sigma.
    double sigma = std::sqrt(std::max(prior_cov(0, 0), prior_cov(1, 1)));
    double lo_x = prior_mean[0], hi_x = prior_mean[0];
    double lo_y = prior_mean[1], hi_y = prior_mean[1];
    for (int s : detected) {
        const Eigen::Vector2d& z = frame.measurement(s, tuple.indices[s]);
        lo_x = std::min(lo_x, z[0]);
        hi_x = std::max(hi_x, z[0]);
        lo_y = std::min(lo_y, z[1]);
        hi_y = std::max(hi_y, z[1]);
    }
    lo_x -= extent_sigmas * sigma;
    hi_x += extent_sigmas * sigma;
    lo_y -= extent_sigmas * sigma;
    hi_y += extent_sigmas * sigma;

    double hx = (hi_x - lo_x) / (nodes - 1);
    double hy = (hi_y - lo_y) / (nodes - 1);
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        double px = lo_x + i * hx;
        for (int j = 0; j < nodes; ++j) {
            Eigen::Vector2d p(px, lo_y + j * hy);
            double f = gauss2(p, prior_mean, prior_cov);
            for (int s : detected) {
                const rfs::SensorModel& sensor = sensors[s];
                const Eigen::Vector2d& z = frame.measurement(s, tuple.indices[s]);
                double kappa = rfs::clutter_intensity(z, sensor);
                f *= sensor.detection_probability * gauss2(z, p, sensor.noise) / kappa;
            }
            sum += f;
        }
    }
    return miss_product * sum * hx * hy;
}

// All measurement tuples for a frame, lexicographic, all-miss first.
inline std::vector<rfs::MeasurementTuple> enumerate_tuples(const rfs::MeasurementFrame& frame) {
    std::vector<rfs::MeasurementTuple> out;
    std::vector<int> idx(frame.sensors(), 0);
    while (true) {
        out.emplace_back(idx);
        int s = frame.sensors() - 1;
        while (s >= 0) {
            if (idx[s] < frame.count(s)) {
                ++idx[s];
                break;
            }
            idx[s] = 0;
            --s;
        }
        if (s < 0) break;
    }
    return out;
}

// Minimum-cost assignment by exhaustive search over injective row-to-column
// maps. Usable up to about 7 columns.
inline double brute_force_assignment(const Eigen::MatrixXd& cost) {
    int rows = static_cast<int>(cost.rows());
    int cols = static_cast<int>(cost.cols());
    std::vector<int> perm(cols);
    for (int i = 0; i < cols; ++i) perm[i] = i;
    double best = std::numeric_limits<double>::infinity();
    std::sort(perm.begin(), perm.end());
    do {
        double total = 0.0;
        for (int r = 0; r < rows; ++r) total += cost(r, perm[r]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// One exhaustive assignment map for the single-sensor update: column per
// row, measurement columns exclusive.
struct ExactAssignment {
    std::vector<int> columns;
    double weight = 0.0;
};

// Every valid assignment map and its unnormalized weight, from the same
// score matrix contract the filter uses (columns 0 miss, 1..m measurements,
// m + 1 death). Maps containing a zero-score cell are dropped.
inline std::vector<ExactAssignment> enumerate_assignments(const Eigen::MatrixXd& scores,
                                                          int measurements) {
    int rows = static_cast<int>(scores.rows());
    std::vector<ExactAssignment> out;
    std::vector<int> cols(rows, 0);
    while (true) {
        bool valid = true;
        for (int r = 0; r < rows && valid; ++r)
            for (int q = r + 1; q < rows; ++q)
                if (cols[r] != 0 && cols[r] <= measurements && cols[r] == cols[q]) {
                    valid = false;
                    break;
                }
        if (valid) {
            double w = 1.0;
            for (int r = 0; r < rows; ++r) w *= scores(r, cols[r]);
            if (w > 0.0) out.push_back({cols, w});
        }
        int r = rows - 1;
        while (r >= 0) {
            if (cols[r] < measurements + 1) {
                ++cols[r];
                break;
            }
            cols[r] = 0;
            --r;
        }
        if (r < 0) break;
    }
    return out;
}

}  // namespace testsupport

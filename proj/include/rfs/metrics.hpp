#pragma once

#include "rfs/label.hpp"

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace rfs {

struct MetricConfig {
    double cutoff = 200.0;  // c, meters
    double order = 1.0;     // p
    int window = 5;         // steps, for the trajectory metric
};

struct AssignmentSolution {
    std::vector<int> row_to_col;
    double cost = 0.0;
};

/// Exact minimum-cost assignment of every row to a distinct column
/// (requires rows <= columns). O(n^2 m) shortest augmenting paths.
AssignmentSolution solve_assignment(const Eigen::MatrixXd& cost);

/// Optimal sub-pattern assignment distance between two point sets.
/// Both empty gives 0; exactly one empty gives the cutoff.
double ospa(const std::vector<Eigen::Vector2d>& x, const std::vector<Eigen::Vector2d>& y,
            double cutoff, double order);

/// A track's position history, keyed by 1-based step.
struct TrackHistory {
    Label label;
    std::map<int, Eigen::Vector2d> points;

    bool present(int step) const { return points.count(step) != 0; }
};

/// OSPA-on-trajectories at evaluation step t: the base distance between
/// two histories is the per-step distance averaged uniformly over the
/// window [max(1, t - window + 1), t], with cutoff when exactly one track
/// has a state and zero when neither does. Histories with no state in the
/// window are left out of the comparison.
double ospa2(const std::vector<TrackHistory>& truth, const std::vector<TrackHistory>& estimate,
             int t, const MetricConfig& config);

}  // namespace rfs

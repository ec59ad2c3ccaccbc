#pragma once

#include "rfs/birth.hpp"
#include "rfs/density.hpp"
#include "rfs/herded_gibbs.hpp"
#include "rfs/models.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace rfs {

/// Ranked-assignment scores for one hypothesis against one sensor's scan.
/// Row i is the hypothesis's i-th track; columns are 0 = miss-detection,
/// 1..m = measurements, m + 1 = death. Entries are linear-domain scores:
/// death (1 - r), miss r (1 - p_D), measurement j
/// r p_D q(z_j) / kappa(z_j) with q the mixture's measurement marginal.
struct AssignmentProblem {
    Eigen::MatrixXd scores;
    int measurements = 0;

    int rows() const { return static_cast<int>(scores.rows()); }
    int death_column() const { return measurements + 1; }
};

AssignmentProblem build_assignment(const GlmbDensity& density, const GlmbHypothesis& hypothesis,
                                   const MeasurementFrame& frame, const SensorModel& sensor);

enum class DensityKind { lmb, glmb };

struct FilterConfig {
    DensityKind density = DensityKind::lmb;
    MotionModel motion;
    std::vector<SensorModel> sensors;
    BirthConfig birth;
    GibbsConfig assignment;  // sampler settings for the per-sensor update
    PruneConfig prune;
};

/// Survival-and-motion step. Existing tracks keep their labels; the birth
/// density's tracks are appended as-is (their densities were already
/// advanced when constructed). Throws on a label collision.
LmbDensity predict(const LmbDensity& prior, const MotionModel& motion, const LmbDensity& birth);
GlmbDensity predict(const GlmbDensity& prior, const MotionModel& motion, const LmbDensity& birth);

/// One sensor's measurement update on a multi-hypothesis density. Each
/// hypothesis spawns children over sampled assignment maps; child weights
/// are exact products of assignment scores (never visit counts), children
/// with identical track sets merge, and the result is pruned. Also
/// returns, per measurement, the posterior probability that it was
/// associated to some track.
std::pair<GlmbDensity, std::vector<double>> update_one_sensor(const GlmbDensity& prior,
                                                              const MeasurementFrame& frame,
                                                              const SensorModel& sensor,
                                                              const GibbsConfig& gibbs,
                                                              const PruneConfig& prune,
                                                              Pcg32* rng = nullptr);

/// Marginalizes a multi-hypothesis density to independent labeled tracks:
/// existence is the total weight of hypotheses containing the label, the
/// density a weight-blended mixture.
LmbDensity marginalize(const GlmbDensity& density);

struct StepResult {
    int step = 0;
    std::vector<std::pair<Label, Eigen::Vector4d>> estimates;
    BirthDiagnostics birth;
    std::size_t hypothesis_count = 0;
};

/// Multi-sensor tracking filter with measurement-driven birth. Sensors
/// update sequentially in id order each step; the birth density sampled
/// from one frame enters at the following step.
class Filter {
public:
    Filter(FilterConfig config, std::uint64_t seed);

    StepResult step(const MeasurementFrame& frame);

    const GlmbDensity& posterior() const { return glmb_; }
    const LmbDensity& marginal() const { return lmb_; }
    const LmbDensity& pending_birth() const { return pending_birth_; }

private:
    FilterConfig config_;
    GlmbDensity glmb_;
    LmbDensity lmb_;
    LmbDensity pending_birth_;
    Pcg32 update_rng_;
    Pcg32 birth_rng_;
    int time_ = 0;
};

}  // namespace rfs

#pragma once

#include "rfs/density.hpp"
#include "rfs/herded_gibbs.hpp"
#include "rfs/label.hpp"
#include "rfs/models.hpp"

#include <utility>
#include <vector>

namespace rfs {

/// Probability that each measurement was consumed by an existing track,
/// one vector per sensor over measurements 1..m. Entries are clamped to
/// [0, 1 - 1e-6] on read so non-association products stay positive.
struct AssociationProbabilities {
    static constexpr double clamp_margin = 1e-6;

    std::vector<std::vector<double>> per_sensor;

    static AssociationProbabilities zeros(const MeasurementFrame& frame);

    /// j is 1-based; j = 0 (miss) always reads as zero association.
    double clamped(int sensor_index, int j) const;
};

/// One sampled birth component before assembly into the LMB.
struct BirthCandidate {
    MeasurementTuple tuple;
    double psi_bar = 0.0;  // capped
    GaussianComponent posterior;
    double r_u = 1.0;
    double r_hat = 0.0;
    double r_birth = 0.0;
};

struct BirthConfig {
    double r_b_max = 0.1;
    double lambda_b = 2.0;
    double psi_bar_cap = 1e4;
    GibbsConfig gibbs;  // gibbs.iterations is the sampler's T
    BirthPrior prior;
};

/// Single-sensor measurement-or-miss factor: (1 - p_D) leaving the density
/// unchanged for j = 0, else p_D * marginal / clutter with the
/// Kalman-conditioned density. Throws invalid-measurement when the clutter
/// intensity at the measurement is zero.
std::pair<double, GaussianComponent> per_sensor_pseudolikelihood(
    const GaussianComponent& state_density, const SensorModel& sensor, int j,
    const MeasurementFrame& frame);

/// Multi-sensor pseudolikelihood integrated against the birth prior,
/// folded over sensors in id order in the log domain; exact for
/// linear-Gaussian models. Returns the (uncapped) value and the
/// measurement-conditioned birth density at the current time.
std::pair<double, GaussianComponent> psi_bar(const MeasurementTuple& tuple,
                                             const MeasurementFrame& frame,
                                             const BirthPrior& prior,
                                             const std::vector<SensorModel>& sensors);

/// Log-domain variant used by the sampler internals.
std::pair<double, GaussianComponent> log_psi_bar(const MeasurementTuple& tuple,
                                                 const MeasurementFrame& frame,
                                                 const BirthPrior& prior,
                                                 const std::vector<SensorModel>& sensors);

/// Product over the tuple's detected entries of (1 - r_A); miss entries
/// contribute one.
double non_association_probability(const MeasurementTuple& tuple,
                                   const AssociationProbabilities& assoc);

/// Markov transition distribution over sensor s's index domain {0..m}:
/// entry j proportional to (1 - r_A(j)) * min(psi_bar, cap), normalized.
std::vector<double> gibbs_conditional(int s, const MeasurementTuple& tuple,
                                      const MeasurementFrame& frame, const BirthPrior& prior,
                                      const std::vector<SensorModel>& sensors,
                                      const AssociationProbabilities& assoc,
                                      double psi_bar_cap);

/// Assemble the birth LMB from sampled candidates: effective birth
/// probabilities normalized over the candidate set, existence
/// min(r_b_max, r_hat * lambda_b), densities predicted one step forward,
/// labels (k+1, tuple), tracks ordered by label.
LmbDensity construct_birth_lmb(std::vector<BirthCandidate> candidates,
                               const BirthConfig& config, const MotionModel& motion, int k);

/// Work counters for one birth pass, used to compare truncated sampling
/// against exhaustive enumeration of the tuple space.
struct BirthDiagnostics {
    GibbsStats gibbs;
    std::size_t unique_psi_bar = 0;   // distinct tuples whose psi_bar was computed
    std::size_t tuple_space = 0;      // prod over sensors of (m + 1), saturated
    std::size_t candidates = 0;       // visited tuples kept as birth components
};

/// Full truncated-birth pipeline for one frame: Gibbs chain over the
/// tuple space from the all-miss start, visited tuples scored and
/// assembled. The all-miss tuple is never a birth candidate (an empty
/// frame yields an empty birth density). Cached psi_bar evaluations are
/// shared between the sampler and candidate assembly.
LmbDensity adaptive_birth(const MeasurementFrame& frame, const std::vector<SensorModel>& sensors,
                          const AssociationProbabilities& assoc, const BirthConfig& config,
                          const MotionModel& motion, int k, BirthDiagnostics* diag = nullptr,
                          Pcg32* rng = nullptr);

}  // namespace rfs

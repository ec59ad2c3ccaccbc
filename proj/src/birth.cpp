#include "rfs/birth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace rfs {

AssociationProbabilities AssociationProbabilities::zeros(const MeasurementFrame& frame) {
    AssociationProbabilities assoc;
    assoc.per_sensor.resize(frame.per_sensor.size());
    for (std::size_t s = 0; s < frame.per_sensor.size(); ++s)
        assoc.per_sensor[s].assign(frame.per_sensor[s].size(), 0.0);
    return assoc;
}

double AssociationProbabilities::clamped(int sensor_index, int j) const {
    if (j <= 0) return 0.0;
    const auto& row = per_sensor.at(static_cast<std::size_t>(sensor_index));
    double v = row.at(static_cast<std::size_t>(j - 1));
    return std::clamp(v, 0.0, 1.0 - clamp_margin);
}

namespace {

std::pair<double, GaussianComponent> log_per_sensor_pseudolikelihood(
    const GaussianComponent& state_density, const SensorModel& sensor, int j,
    const MeasurementFrame& frame) {
    if (j == 0) return {std::log1p(-sensor.detection_probability), state_density};
    if (j < 0 || j > frame.count(sensor.id))
        throw std::invalid_argument("measurement index out of range for sensor " +
                                    std::to_string(sensor.id));
    const Eigen::Vector2d& z = frame.measurement(sensor.id, j);
    double kappa = clutter_intensity(z, sensor);
    if (kappa <= 0.0)
        throw std::invalid_argument("measurement outside surveillance region of sensor " +
                                    std::to_string(sensor.id));
    auto [log_marginal, conditioned] = log_measurement_marginal(state_density, z, sensor);
    double value = std::log(sensor.detection_probability) + log_marginal - std::log(kappa);
    return {value, std::move(conditioned)};
}

void check_tuple_shape(const MeasurementTuple& tuple, const MeasurementFrame& frame,
                       const std::vector<SensorModel>& sensors) {
    if (sensors.size() != static_cast<std::size_t>(frame.sensors()))
        throw std::invalid_argument("sensor models and measurement frame disagree on sensor count");
    if (tuple.indices.size() != sensors.size())
        throw std::invalid_argument("measurement tuple length must equal the sensor count");
}

}  // namespace

std::pair<double, GaussianComponent> per_sensor_pseudolikelihood(
    const GaussianComponent& state_density, const SensorModel& sensor, int j,
    const MeasurementFrame& frame) {
    auto [logv, comp] = log_per_sensor_pseudolikelihood(state_density, sensor, j, frame);
    return {std::exp(logv), std::move(comp)};
}

std::pair<double, GaussianComponent> log_psi_bar(const MeasurementTuple& tuple,
                                                 const MeasurementFrame& frame,
                                                 const BirthPrior& prior,
                                                 const std::vector<SensorModel>& sensors) {
    check_tuple_shape(tuple, frame, sensors);
    GaussianComponent comp{1.0, prior.mean, prior.covariance};
    double acc = 0.0;
    for (std::size_t s = 0; s < sensors.size(); ++s) {
        auto [logv, conditioned] =
            log_per_sensor_pseudolikelihood(comp, sensors[s], tuple.indices[s], frame);
        acc += logv;
        comp = std::move(conditioned);
    }
    return {acc, std::move(comp)};
}

std::pair<double, GaussianComponent> psi_bar(const MeasurementTuple& tuple,
                                             const MeasurementFrame& frame,
                                             const BirthPrior& prior,
                                             const std::vector<SensorModel>& sensors) {
    auto [logv, comp] = log_psi_bar(tuple, frame, prior, sensors);
    return {std::exp(logv), std::move(comp)};
}

double non_association_probability(const MeasurementTuple& tuple,
                                   const AssociationProbabilities& assoc) {
    double product = 1.0;
    for (std::size_t s = 0; s < tuple.indices.size(); ++s) {
        int j = tuple.indices[s];
        if (j > 0) product *= 1.0 - assoc.clamped(static_cast<int>(s), j);
    }
    return product;
}

namespace {

/// Normalizes log-domain conditional entries to a probability vector.
std::vector<double> normalize_log_entries(std::vector<double> log_entries) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : log_entries) peak = std::max(peak, v);
    if (!std::isfinite(peak)) throw std::runtime_error("degenerate birth conditional: all entries zero");
    double sum = 0.0;
    for (double& v : log_entries) {
        v = std::exp(v - peak);
        sum += v;
    }
    for (double& v : log_entries) v /= sum;
    return log_entries;
}

}  // namespace

std::vector<double> gibbs_conditional(int s, const MeasurementTuple& tuple,
                                      const MeasurementFrame& frame, const BirthPrior& prior,
                                      const std::vector<SensorModel>& sensors,
                                      const AssociationProbabilities& assoc,
                                      double psi_bar_cap) {
    check_tuple_shape(tuple, frame, sensors);
    if (psi_bar_cap <= 0.0) throw std::invalid_argument("psi_bar_cap must be positive");
    if (s < 0 || s >= static_cast<int>(sensors.size()))
        throw std::invalid_argument("sensor coordinate out of range");
    double log_cap = std::log(psi_bar_cap);
    int m = frame.count(sensors[s].id);
    std::vector<double> log_entries(static_cast<std::size_t>(m) + 1);
    MeasurementTuple probe = tuple;
    for (int j = 0; j <= m; ++j) {
        probe.indices[static_cast<std::size_t>(s)] = j;
        double lp = std::min(log_psi_bar(probe, frame, prior, sensors).first, log_cap);
        double log_free = j == 0 ? 0.0 : std::log1p(-assoc.clamped(s, j));
        log_entries[static_cast<std::size_t>(j)] = log_free + lp;
    }
    return normalize_log_entries(std::move(log_entries));
}

LmbDensity construct_birth_lmb(std::vector<BirthCandidate> candidates,
                               const BirthConfig& config, const MotionModel& motion, int k) {
    LmbDensity birth;
    if (candidates.empty()) return birth;

    double denom = 0.0;
    for (const auto& c : candidates) denom += c.r_u * c.psi_bar;
    if (!(denom > 0.0))
        throw std::runtime_error("degenerate birth candidate set: total mass is zero");

    birth.tracks.reserve(candidates.size());
    for (auto& c : candidates) {
        c.r_hat = c.r_u * c.psi_bar / denom;
        c.r_birth = std::min(config.r_b_max, c.r_hat * config.lambda_b);

        LabeledTrack track;
        track.label = Label{k + 1, c.tuple};
        track.existence = c.r_birth;
        GaussianComponent comp = predict_component(c.posterior, motion);
        comp.weight = 1.0;
        track.mixture = {std::move(comp)};
        birth.tracks.push_back(std::move(track));
    }
    birth.sort_by_label();
    return birth;
}

LmbDensity adaptive_birth(const MeasurementFrame& frame, const std::vector<SensorModel>& sensors,
                          const AssociationProbabilities& assoc, const BirthConfig& config,
                          const MotionModel& motion, int k, BirthDiagnostics* diag,
                          Pcg32* rng) {
    if (sensors.size() != static_cast<std::size_t>(frame.sensors()))
        throw std::invalid_argument("sensor models and measurement frame disagree on sensor count");
    if (config.psi_bar_cap <= 0.0) throw std::invalid_argument("psi_bar_cap must be positive");
    if (diag) *diag = BirthDiagnostics{};

    const std::size_t num_sensors = sensors.size();
    std::size_t total = 0;
    std::size_t space = 1;
    constexpr std::size_t space_max = std::numeric_limits<std::size_t>::max();
    for (std::size_t s = 0; s < num_sensors; ++s) {
        std::size_t m = frame.per_sensor[s].size();
        total += m;
        space = space > space_max / (m + 1) ? space_max : space * (m + 1);
    }
    if (diag) diag->tuple_space = space;
    if (num_sensors == 0 || total == 0) return LmbDensity{};

    double log_cap = std::log(config.psi_bar_cap);

    // One psi_bar evaluation per distinct tuple across the whole pass.
    std::unordered_map<MeasurementTuple, std::pair<double, GaussianComponent>, TupleHash> memo;
    auto scored = [&](const MeasurementTuple& tuple)
        -> const std::pair<double, GaussianComponent>& {
        auto it = memo.find(tuple);
        if (it == memo.end())
            it = memo.emplace(tuple, log_psi_bar(tuple, frame, config.prior, sensors)).first;
        return it->second;
    };

    ConditionalEvaluator evaluator = [&](const std::vector<int>& state,
                                         int s) -> std::vector<double> {
        int m = frame.count(sensors[static_cast<std::size_t>(s)].id);
        std::vector<double> log_entries(static_cast<std::size_t>(m) + 1);
        MeasurementTuple probe{state};
        for (int j = 0; j <= m; ++j) {
            probe.indices[static_cast<std::size_t>(s)] = j;
            double lp = std::min(scored(probe).first, log_cap);
            double log_free = j == 0 ? 0.0 : std::log1p(-assoc.clamped(s, j));
            log_entries[static_cast<std::size_t>(j)] = log_free + lp;
        }
        return normalize_log_entries(std::move(log_entries));
    };

    std::vector<int> start(num_sensors, 0);
    GibbsStats stats;
    auto visited = sample_chain(evaluator, start, config.gibbs, &stats, rng);
    if (diag) diag->gibbs = stats;

    std::vector<BirthCandidate> candidates;
    candidates.reserve(visited.size());
    for (const auto& state : visited) {
        MeasurementTuple tuple{state};
        if (tuple.all_miss()) continue;
        const auto& [log_value, posterior] = scored(tuple);
        BirthCandidate c;
        c.tuple = std::move(tuple);
        c.psi_bar = std::exp(std::min(log_value, log_cap));
        c.posterior = posterior;
        c.r_u = non_association_probability(c.tuple, assoc);
        candidates.push_back(std::move(c));
    }
    if (diag) {
        diag->unique_psi_bar = memo.size();
        diag->candidates = candidates.size();
    }
    if (candidates.empty()) return LmbDensity{};
    return construct_birth_lmb(std::move(candidates), config, motion, k);
}

}  // namespace rfs

#include "rfs/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace rfs {

namespace {

/// Measurement-updated mixture and its marginal likelihood q(z).
struct Conditioned {
    double marginal = 0.0;
    GaussianMixture mixture;
};

Conditioned condition_mixture(const GaussianMixture& mix, const Eigen::Vector2d& z,
                              const SensorModel& sensor) {
    double wsum = mixture_weight_sum(mix);
    if (!(wsum > 0.0)) throw std::runtime_error("track mixture has zero mass");
    Conditioned out;
    out.mixture.reserve(mix.size());
    for (const auto& c : mix) {
        auto [log_nu, updated] = log_measurement_marginal(c, z, sensor);
        double contrib = (c.weight / wsum) * std::exp(log_nu);
        updated.weight = contrib;
        out.marginal += contrib;
        out.mixture.push_back(std::move(updated));
    }
    if (out.marginal > 0.0)
        for (auto& c : out.mixture) c.weight /= out.marginal;
    return out;
}

double checked_clutter(const Eigen::Vector2d& z, const SensorModel& sensor) {
    double kappa = clutter_intensity(z, sensor);
    if (kappa <= 0.0)
        throw std::invalid_argument("measurement outside surveillance region of sensor " +
                                    std::to_string(sensor.id));
    return kappa;
}

void check_label_free(const std::set<Label>& taken, const Label& label) {
    if (taken.count(label))
        throw std::runtime_error("birth label collides with an existing track: " + label.str());
}

GlmbDensity expand(const LmbDensity& lmb) {
    GlmbDensity out;
    GlmbHypothesis hyp;
    hyp.weight = 1.0;
    out.table.reserve(lmb.tracks.size());
    for (const auto& track : lmb.tracks) {
        hyp.entries.push_back(static_cast<int>(out.table.size()));
        hyp.existences.push_back(track.existence);
        out.table.push_back(GlmbTrackEntry{track.label, track.mixture, -1});
    }
    out.hypotheses.push_back(std::move(hyp));
    return out;
}

}  // namespace

AssignmentProblem build_assignment(const GlmbDensity& density, const GlmbHypothesis& hypothesis,
                                   const MeasurementFrame& frame, const SensorModel& sensor) {
    const int n = hypothesis.cardinality();
    const int m = frame.count(sensor.id);
    AssignmentProblem problem;
    problem.measurements = m;
    problem.scores.resize(n, m + 2);
    for (int i = 0; i < n; ++i) {
        const auto& entry = density.table[static_cast<std::size_t>(hypothesis.entries[i])];
        double r = hypothesis.existences[static_cast<std::size_t>(i)];
        problem.scores(i, 0) = r * (1.0 - sensor.detection_probability);
        for (int j = 1; j <= m; ++j) {
            const Eigen::Vector2d& z = frame.measurement(sensor.id, j);
            double kappa = checked_clutter(z, sensor);
            double q = condition_mixture(entry.mixture, z, sensor).marginal;
            problem.scores(i, j) = r * sensor.detection_probability * q / kappa;
        }
        problem.scores(i, m + 1) = 1.0 - r;
    }
    return problem;
}

LmbDensity predict(const LmbDensity& prior, const MotionModel& motion, const LmbDensity& birth) {
    LmbDensity out;
    out.tracks.reserve(prior.tracks.size() + birth.tracks.size());
    std::set<Label> taken;
    for (const auto& track : prior.tracks) {
        LabeledTrack next;
        next.label = track.label;
        next.existence = track.existence * motion.survival_probability;
        next.mixture.reserve(track.mixture.size());
        for (const auto& c : track.mixture) next.mixture.push_back(predict_component(c, motion));
        taken.insert(next.label);
        out.tracks.push_back(std::move(next));
    }
    for (const auto& track : birth.tracks) {
        check_label_free(taken, track.label);
        taken.insert(track.label);
        out.tracks.push_back(track);
    }
    out.sort_by_label();
    return out;
}

GlmbDensity predict(const GlmbDensity& prior, const MotionModel& motion, const LmbDensity& birth) {
    GlmbDensity out;
    out.table.reserve(prior.table.size() + birth.tracks.size());
    std::set<Label> taken;
    for (const auto& entry : prior.table) {
        GlmbTrackEntry next;
        next.label = entry.label;
        next.last_meas_index = -1;
        next.mixture.reserve(entry.mixture.size());
        for (const auto& c : entry.mixture) next.mixture.push_back(predict_component(c, motion));
        taken.insert(next.label);
        out.table.push_back(std::move(next));
    }
    const int birth_base = static_cast<int>(out.table.size());
    for (const auto& track : birth.tracks) {
        check_label_free(taken, track.label);
        taken.insert(track.label);
        out.table.push_back(GlmbTrackEntry{track.label, track.mixture, -1});
    }
    out.hypotheses.reserve(prior.hypotheses.size());
    for (const auto& hyp : prior.hypotheses) {
        GlmbHypothesis next;
        next.weight = hyp.weight;
        next.entries = hyp.entries;
        next.existences = hyp.existences;
        for (double& r : next.existences) r *= motion.survival_probability;
        for (std::size_t b = 0; b < birth.tracks.size(); ++b) {
            next.entries.push_back(birth_base + static_cast<int>(b));
            next.existences.push_back(birth.tracks[b].existence);
        }
        out.hypotheses.push_back(std::move(next));
    }
    return out;
}

std::pair<GlmbDensity, std::vector<double>> update_one_sensor(const GlmbDensity& prior,
                                                              const MeasurementFrame& frame,
                                                              const SensorModel& sensor,
                                                              const GibbsConfig& gibbs,
                                                              const PruneConfig& prune_cfg,
                                                              Pcg32* rng) {
    if (sensor.id < 0 || sensor.id >= frame.sensors())
        throw std::invalid_argument("sensor id not present in measurement frame");
    const int m = frame.count(sensor.id);
    if (prior.hypotheses.empty()) throw std::invalid_argument("update on an empty density");

    // Measurement-conditioned mixtures per (table entry, measurement).
    std::vector<std::vector<Conditioned>> cond(prior.table.size());
    std::vector<double> kappa(static_cast<std::size_t>(m), 0.0);
    for (int j = 1; j <= m; ++j)
        kappa[static_cast<std::size_t>(j - 1)] =
            checked_clutter(frame.measurement(sensor.id, j), sensor);
    for (std::size_t e = 0; e < prior.table.size(); ++e) {
        cond[e].reserve(static_cast<std::size_t>(m));
        for (int j = 1; j <= m; ++j)
            cond[e].push_back(
                condition_mixture(prior.table[e].mixture, frame.measurement(sensor.id, j), sensor));
    }

    GlmbDensity posterior;
    std::map<std::pair<int, int>, int> child_entry_index;  // (parent entry, column) -> table index
    auto child_entry = [&](int parent_entry, int column) {
        auto [it, inserted] = child_entry_index.try_emplace(
            {parent_entry, column}, static_cast<int>(posterior.table.size()));
        if (inserted) {
            const auto& parent = prior.table[static_cast<std::size_t>(parent_entry)];
            GlmbTrackEntry entry;
            entry.label = parent.label;
            if (column == 0) {
                entry.mixture = parent.mixture;
                entry.last_meas_index = 0;
            } else {
                entry.mixture = cond[static_cast<std::size_t>(parent_entry)]
                                    [static_cast<std::size_t>(column - 1)].mixture;
                entry.last_meas_index = column;
            }
            posterior.table.push_back(std::move(entry));
        }
        return it->second;
    };

    std::map<std::vector<int>, std::size_t> child_by_entries;
    std::vector<double> log_weights;

    auto merge_child = [&](std::vector<int> entries, double lw) {
        std::sort(entries.begin(), entries.end());
        auto [it, inserted] = child_by_entries.try_emplace(entries, posterior.hypotheses.size());
        if (inserted) {
            GlmbHypothesis child;
            child.entries = std::move(entries);
            child.existences.assign(child.entries.size(), 1.0);
            posterior.hypotheses.push_back(std::move(child));
            log_weights.push_back(lw);
        } else {
            double& slot = log_weights[it->second];
            double hi = std::max(slot, lw);
            slot = hi + std::log(std::exp(slot - hi) + std::exp(lw - hi));
        }
    };

    for (const auto& hyp : prior.hypotheses) {
        if (!(hyp.weight > 0.0)) continue;
        const int n = hyp.cardinality();
        double log_parent = std::log(hyp.weight);
        if (n == 0) {
            merge_child({}, log_parent);
            continue;
        }

        AssignmentProblem problem;
        problem.measurements = m;
        problem.scores.resize(n, m + 2);
        for (int i = 0; i < n; ++i) {
            int e = hyp.entries[static_cast<std::size_t>(i)];
            double r = hyp.existences[static_cast<std::size_t>(i)];
            problem.scores(i, 0) = r * (1.0 - sensor.detection_probability);
            for (int j = 1; j <= m; ++j)
                problem.scores(i, j) = r * sensor.detection_probability *
                                       cond[static_cast<std::size_t>(e)]
                                           [static_cast<std::size_t>(j - 1)].marginal /
                                       kappa[static_cast<std::size_t>(j - 1)];
            problem.scores(i, m + 1) = 1.0 - r;
        }

        ConditionalEvaluator evaluator = [&problem, m, n](const std::vector<int>& state,
                                                          int row) -> std::vector<double> {
            std::vector<double> out(static_cast<std::size_t>(m) + 2);
            for (int col = 0; col <= m + 1; ++col) {
                if (col >= 1 && col <= m) {
                    bool used = false;
                    for (int other = 0; other < n; ++other)
                        if (other != row && state[static_cast<std::size_t>(other)] == col) {
                            used = true;
                            break;
                        }
                    if (used) {
                        out[static_cast<std::size_t>(col)] = 0.0;
                        continue;
                    }
                }
                out[static_cast<std::size_t>(col)] = problem.scores(row, col);
            }
            return out;
        };

        std::vector<int> start(static_cast<std::size_t>(n), 0);
        auto visited = sample_chain(evaluator, start, gibbs, nullptr, rng);

        for (const auto& assignment : visited) {
            double lw = log_parent;
            std::vector<int> entries;
            entries.reserve(static_cast<std::size_t>(n));
            bool dead_branch_zero = false;
            for (int i = 0; i < n && !dead_branch_zero; ++i) {
                int col = assignment[static_cast<std::size_t>(i)];
                double score = problem.scores(i, col);
                if (!(score > 0.0)) {
                    dead_branch_zero = true;
                    break;
                }
                lw += std::log(score);
                if (col != m + 1) entries.push_back(child_entry(hyp.entries[static_cast<std::size_t>(i)], col));
            }
            if (dead_branch_zero) continue;
            merge_child(std::move(entries), lw);
        }
    }

    if (posterior.hypotheses.empty())
        throw std::runtime_error("sensor update produced no surviving hypotheses");

    double peak = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    for (double lw : log_weights) total += std::exp(lw - peak);
    double log_total = peak + std::log(total);
    for (std::size_t h = 0; h < posterior.hypotheses.size(); ++h)
        posterior.hypotheses[h].weight = std::exp(log_weights[h] - log_total);

    prune(posterior, prune_cfg);

    std::vector<double> assoc(static_cast<std::size_t>(m), 0.0);
    for (const auto& hyp : posterior.hypotheses)
        for (int e : hyp.entries) {
            int j = posterior.table[static_cast<std::size_t>(e)].last_meas_index;
            if (j >= 1) assoc[static_cast<std::size_t>(j - 1)] += hyp.weight;
        }

    return {std::move(posterior), std::move(assoc)};
}

LmbDensity marginalize(const GlmbDensity& density) {
    std::map<Label, LabeledTrack> tracks;
    for (const auto& hyp : density.hypotheses) {
        for (std::size_t i = 0; i < hyp.entries.size(); ++i) {
            double mass = hyp.weight * hyp.existences[i];
            if (!(mass > 0.0)) continue;
            const auto& entry = density.table[static_cast<std::size_t>(hyp.entries[i])];
            auto& track = tracks[entry.label];
            track.label = entry.label;
            track.existence += mass;
            double wsum = mixture_weight_sum(entry.mixture);
            for (const auto& c : entry.mixture) {
                GaussianComponent scaled = c;
                scaled.weight = mass * c.weight / wsum;
                track.mixture.push_back(std::move(scaled));
            }
        }
    }
    LmbDensity out;
    out.tracks.reserve(tracks.size());
    for (auto& [label, track] : tracks) {
        track.existence = std::min(track.existence, 1.0);
        normalize_mixture(track.mixture);
        out.tracks.push_back(std::move(track));
    }
    return out;
}

Filter::Filter(FilterConfig config, std::uint64_t seed)
    : config_(std::move(config)), update_rng_(seed, 1), birth_rng_(seed, 2) {
    if (config_.sensors.empty()) throw std::invalid_argument("sensors: required");
    for (std::size_t i = 0; i < config_.sensors.size(); ++i)
        if (config_.sensors[i].id != static_cast<int>(i))
            throw std::invalid_argument("sensors: ids must run 0..V-1 in order");
    glmb_ = GlmbDensity::trivial();
}

StepResult Filter::step(const MeasurementFrame& frame) {
    if (frame.sensors() != static_cast<int>(config_.sensors.size()))
        throw std::invalid_argument("frame sensor count does not match the filter configuration");
    time_ = frame.time;

    if (config_.density == DensityKind::lmb) {
        lmb_ = predict(lmb_, config_.motion, pending_birth_);
        glmb_ = expand(lmb_);
    } else {
        glmb_ = predict(glmb_, config_.motion, pending_birth_);
    }
    pending_birth_ = LmbDensity{};

    Pcg32* update_rng =
        config_.assignment.mode == SamplerMode::stochastic ? &update_rng_ : nullptr;
    AssociationProbabilities assoc;
    assoc.per_sensor.reserve(config_.sensors.size());
    for (const auto& sensor : config_.sensors) {
        auto [posterior, ra] = update_one_sensor(glmb_, frame, sensor, config_.assignment,
                                                 config_.prune, update_rng);
        glmb_ = std::move(posterior);
        assoc.per_sensor.push_back(std::move(ra));
        if (config_.density == DensityKind::lmb) {
            lmb_ = marginalize(glmb_);
            prune(lmb_, config_.prune);
            glmb_ = expand(lmb_);
        }
    }

    Pcg32* birth_rng =
        config_.birth.gibbs.mode == SamplerMode::stochastic ? &birth_rng_ : nullptr;
    StepResult result;
    result.step = frame.time;
    pending_birth_ = adaptive_birth(frame, config_.sensors, assoc, config_.birth, config_.motion,
                                    frame.time, &result.birth, birth_rng);

    result.hypothesis_count = glmb_.hypotheses.size();
    auto extracted = config_.density == DensityKind::lmb ? extract_estimates(lmb_)
                                                         : extract_estimates(glmb_);
    result.estimates.reserve(extracted.size());
    for (auto& [label, mean] : extracted)
        result.estimates.emplace_back(std::move(label), Eigen::Vector4d(mean));
    return result;
}

}  // namespace rfs

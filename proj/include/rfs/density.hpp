#pragma once

#include "rfs/gaussian.hpp"
#include "rfs/label.hpp"

#include <utility>
#include <vector>

namespace rfs {

/// Bernoulli track: label, existence probability, normalized Gaussian
/// mixture state density.
struct LabeledTrack {
    Label label;
    double existence = 0.0;
    GaussianMixture mixture;
};

/// Labeled multi-Bernoulli density. Tracks carry distinct labels and are
/// kept sorted by label.
struct LmbDensity {
    std::vector<LabeledTrack> tracks;

    bool empty() const { return tracks.empty(); }
    void sort_by_label();
    const LabeledTrack* find(const Label& l) const;
};

/// One conditional track density in a GLMB track table. last_meas_index
/// records which measurement column this entry consumed in the most
/// recent sensor update (0 = miss, j >= 1 = measurement j, -1 = none yet).
struct GlmbTrackEntry {
    Label label;
    GaussianMixture mixture;
    int last_meas_index = -1;
};

/// Weighted label-set hypothesis. entries index the density's track table;
/// existences are hypothesis-conditional track probabilities. A pure
/// delta-GLMB has every existence equal to one; mid-step predicted
/// densities carry survival/birth probabilities here until the next
/// update resolves them.
struct GlmbHypothesis {
    double weight = 0.0;
    std::vector<int> entries;
    std::vector<double> existences;

    int cardinality() const { return static_cast<int>(entries.size()); }
};

struct GlmbDensity {
    std::vector<GlmbTrackEntry> table;
    std::vector<GlmbHypothesis> hypotheses;

    bool empty() const;
    /// Single empty-label-set hypothesis of weight one.
    static GlmbDensity trivial();
};

struct PruneConfig {
    double hypothesis_threshold = 1e-5;
    int hypothesis_cap = 1000;
    double existence_threshold = 1e-3;
    int max_components = 10;
};

/// Rescale hypothesis weights to sum to one. Throws on an all-zero density.
void normalize_hypotheses(GlmbDensity& density);

/// Drop hypotheses below the weight threshold, keep at most hypothesis_cap
/// by descending weight (index ascending on ties), renormalize, compact the
/// track table, and cap every entry's mixture.
void prune(GlmbDensity& density, const PruneConfig& cfg);

/// Drop tracks below the existence threshold and cap each mixture.
void prune(LmbDensity& density, const PruneConfig& cfg);

/// MAP-cardinality estimate: the highest-weight hypothesis among those of
/// the most probable cardinality; one (label, mixture mean) per track,
/// ordered by label.
std::vector<std::pair<Label, Eigen::VectorXd>> extract_estimates(const GlmbDensity& density);

/// All tracks with existence above 0.5, ordered by label.
std::vector<std::pair<Label, Eigen::VectorXd>> extract_estimates(const LmbDensity& density);

}  // namespace rfs

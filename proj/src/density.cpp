#include "rfs/density.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace rfs {

void LmbDensity::sort_by_label() {
    std::sort(tracks.begin(), tracks.end(),
              [](const LabeledTrack& a, const LabeledTrack& b) { return a.label < b.label; });
}

const LabeledTrack* LmbDensity::find(const Label& l) const {
    for (const auto& t : tracks)
        if (t.label == l) return &t;
    return nullptr;
}

bool GlmbDensity::empty() const {
    for (const auto& h : hypotheses)
        if (!h.entries.empty()) return false;
    return true;
}

GlmbDensity GlmbDensity::trivial() {
    GlmbDensity d;
    GlmbHypothesis h;
    h.weight = 1.0;
    d.hypotheses.push_back(std::move(h));
    return d;
}

void normalize_hypotheses(GlmbDensity& density) {
    double sum = 0.0;
    for (const auto& h : density.hypotheses) sum += h.weight;
    if (!(sum > 0.0))
        throw std::runtime_error("normalize_hypotheses: degenerate density, all weights zero");
    for (auto& h : density.hypotheses) h.weight /= sum;
}

namespace {

// Rebuild the track table keeping only referenced entries, preserving order.
void compact_table(GlmbDensity& density) {
    std::vector<int> remap(density.table.size(), -1);
    std::vector<GlmbTrackEntry> table;
    for (auto& h : density.hypotheses) {
        for (auto& e : h.entries) {
            if (remap[e] < 0) {
                remap[e] = static_cast<int>(table.size());
                table.push_back(std::move(density.table[e]));
            }
            e = remap[e];
        }
    }
    density.table = std::move(table);
}

}  // namespace

void prune(GlmbDensity& density, const PruneConfig& cfg) {
    auto& hyps = density.hypotheses;
    std::vector<int> order(hyps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return hyps[a].weight > hyps[b].weight; });

    std::vector<GlmbHypothesis> kept;
    for (int i : order) {
        if (cfg.hypothesis_cap > 0 && static_cast<int>(kept.size()) >= cfg.hypothesis_cap) break;
        if (hyps[i].weight < cfg.hypothesis_threshold) continue;
        kept.push_back(std::move(hyps[i]));
    }
    hyps = std::move(kept);
    if (!hyps.empty()) normalize_hypotheses(density);
    compact_table(density);
    for (auto& e : density.table) cap_mixture(e.mixture, cfg.max_components);
}

void prune(LmbDensity& density, const PruneConfig& cfg) {
    std::vector<LabeledTrack> kept;
    for (auto& t : density.tracks) {
        if (t.existence < cfg.existence_threshold) continue;
        cap_mixture(t.mixture, cfg.max_components);
        kept.push_back(std::move(t));
    }
    density.tracks = std::move(kept);
    density.sort_by_label();
}

std::vector<std::pair<Label, Eigen::VectorXd>> extract_estimates(const GlmbDensity& density) {
    std::vector<std::pair<Label, Eigen::VectorXd>> out;
    if (density.hypotheses.empty()) return out;

    std::map<int, double> card_weight;
    for (const auto& h : density.hypotheses) card_weight[h.cardinality()] += h.weight;
    int map_card = 0;
    double best_mass = -1.0;
    for (const auto& [card, mass] : card_weight) {
        if (mass > best_mass) {
            best_mass = mass;
            map_card = card;
        }
    }

    const GlmbHypothesis* best = nullptr;
    for (const auto& h : density.hypotheses) {
        if (h.cardinality() != map_card) continue;
        if (!best || h.weight > best->weight) best = &h;
    }
    if (!best) return out;

    for (int e : best->entries)
        out.emplace_back(density.table[e].label, mixture_mean(density.table[e].mixture));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

std::vector<std::pair<Label, Eigen::VectorXd>> extract_estimates(const LmbDensity& density) {
    std::vector<std::pair<Label, Eigen::VectorXd>> out;
    for (const auto& t : density.tracks)
        if (t.existence > 0.5) out.emplace_back(t.label, mixture_mean(t.mixture));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace rfs

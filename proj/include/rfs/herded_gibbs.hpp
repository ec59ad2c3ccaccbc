#pragma once

#include "rfs/label.hpp"
#include "rfs/rng.hpp"

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

namespace rfs {

enum class SamplerMode { herded, stochastic };

struct GibbsConfig {
    int iterations = 250;  // T, counted as full coordinate sweeps
    SamplerMode mode = SamplerMode::herded;
    std::uint64_t seed = 0;  // stochastic mode, used when no external generator is supplied
    bool cycling = true;     // cycle the coordinate order lexicographically per sweep
};

/// One herding update: pick the argmax weight (lowest index on ties), then
/// add the target distribution and subtract the selected indicator.
/// Returns the selected index; weights are updated in place.
int herding_step(std::vector<double>& weights, const std::vector<double>& mu);

/// Coordinate order for sweep t (1-based): the ((t-1) mod n!)-th
/// lexicographic permutation of 0..n-1, stepped by repeated
/// lexicographic successor from the identity. t=1 gives the identity.
std::vector<int> cycled_permutation(std::uint64_t t, int n);

/// Conditional distribution over one coordinate's domain given the rest of
/// the state. The returned vector's length is the coordinate's domain size.
using ConditionalEvaluator =
    std::function<std::vector<double>(const std::vector<int>& state, int coord)>;

/// Dictionary key: the conditioning state (coordinate's own entry removed)
/// plus the coordinate index. The conditional does not depend on the
/// coordinate's current value, so keying this way shares herding memory
/// across revisits of the same conditioning state.
struct StoreKey {
    std::vector<int> conditioning;
    int coord = 0;

    bool operator==(const StoreKey&) const = default;
};

struct StoreKeyHash {
    std::size_t operator()(const StoreKey& k) const {
        std::size_t h = std::hash<int>{}(k.coord);
        for (int v : k.conditioning) h = hash_combine(h, std::hash<int>{}(v));
        return h;
    }
};

/// Herding weight vectors per (conditioning state, coordinate).
using WeightStore = std::unordered_map<StoreKey, std::vector<double>, StoreKeyHash>;
/// Cached conditional distributions per (conditioning state, coordinate).
using ConditionalCache = std::unordered_map<StoreKey, std::vector<double>, StoreKeyHash>;

struct GibbsStats {
    std::uint64_t evaluator_calls = 0;    // cache misses: full conditionals computed
    std::uint64_t evaluator_entries = 0;  // scalar conditional values computed
    std::uint64_t cache_hits = 0;
    std::uint64_t coordinate_updates = 0;
};

/// Coordinate-wise sampler over a factored discrete space with conditional
/// caching. Herded mode is a pure function of (evaluator, initial state,
/// config); stochastic mode draws each coordinate from the cached
/// conditional with the seeded generator. A sampler instance owns its
/// weight store and cache; run() may be called once per chain.
class GibbsSampler {
public:
    explicit GibbsSampler(ConditionalEvaluator evaluator)
        : evaluator_(std::move(evaluator)) {}

    /// Run T sweeps from initial_state; returns unique visited states in
    /// first-visit order (the state after every coordinate update is
    /// recorded; the initial state only if revisited).
    std::vector<std::vector<int>> run(const std::vector<int>& initial_state,
                                      const GibbsConfig& config, Pcg32* rng = nullptr);

    /// Fill the conditional cache for (state, coord) ahead of the chain.
    void prewarm(const std::vector<int>& state, int coord);

    const GibbsStats& stats() const { return stats_; }
    const ConditionalCache& cache() const { return cache_; }
    const WeightStore& weights() const { return weights_; }

private:
    const std::vector<double>& conditional(const std::vector<int>& state, int coord);

    ConditionalEvaluator evaluator_;
    WeightStore weights_;
    ConditionalCache cache_;
    GibbsStats stats_;
};

/// Convenience wrapper: fresh sampler, one chain.
std::vector<std::vector<int>> sample_chain(const ConditionalEvaluator& evaluator,
                                           const std::vector<int>& initial_state,
                                           const GibbsConfig& config,
                                           GibbsStats* stats = nullptr, Pcg32* rng = nullptr);

}  // namespace rfs

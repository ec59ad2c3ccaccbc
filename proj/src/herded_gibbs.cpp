#include "rfs/herded_gibbs.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rfs {

int herding_step(std::vector<double>& weights, const std::vector<double>& mu) {
    if (weights.empty()) throw std::invalid_argument("herding_step: empty weight vector");
    if (weights.size() != mu.size())
        throw std::invalid_argument("herding_step: weight/target length mismatch");
    int selected = 0;
    for (std::size_t i = 1; i < weights.size(); ++i)
        if (weights[i] > weights[selected]) selected = static_cast<int>(i);
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] += mu[i];
    weights[selected] -= 1.0;
    return selected;
}

std::vector<int> cycled_permutation(std::uint64_t t, int n) {
    if (n < 1) throw std::invalid_argument("cycled_permutation: need at least one coordinate");
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    if (t <= 1) return p;

    std::uint64_t fact = 1;
    bool overflow = false;
    for (int i = 2; i <= n; ++i) {
        if (fact > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(i)) {
            overflow = true;
            break;
        }
        fact *= static_cast<std::uint64_t>(i);
    }
    std::uint64_t steps = t - 1;
    if (!overflow) steps %= fact;
    for (std::uint64_t i = 0; i < steps; ++i) {
        // next_permutation wraps to the identity after the last permutation
        std::next_permutation(p.begin(), p.end());
    }
    return p;
}

namespace {

StoreKey make_key(const std::vector<int>& state, int coord) {
    StoreKey key;
    key.coord = coord;
    key.conditioning.reserve(state.size() - 1);
    for (std::size_t i = 0; i < state.size(); ++i)
        if (static_cast<int>(i) != coord) key.conditioning.push_back(state[i]);
    return key;
}

std::string describe(const std::vector<int>& state, int coord) {
    std::ostringstream os;
    os << "state (";
    for (std::size_t i = 0; i < state.size(); ++i) os << (i ? "," : "") << state[i];
    os << "), coordinate " << coord;
    return os.str();
}

int draw_categorical(const std::vector<double>& mu, Pcg32& rng) {
    double u = rng.uniform();
    double cum = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] <= 0.0) continue;
        last_positive = static_cast<int>(i);
        cum += mu[i];
        if (u < cum) return last_positive;
    }
    // rounding left cum fractionally below one
    return last_positive;
}

}  // namespace

const std::vector<double>& GibbsSampler::conditional(const std::vector<int>& state, int coord) {
    StoreKey key = make_key(state, coord);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
        ++stats_.cache_hits;
        return it->second;
    }
    std::vector<double> mu;
    try {
        mu = evaluator_(state, coord);
    } catch (const std::exception& e) {
        throw std::runtime_error("conditional evaluator failed at " + describe(state, coord) +
                                 ": " + e.what());
    }
    if (mu.empty())
        throw std::runtime_error("conditional evaluator returned an empty vector at " +
                                 describe(state, coord));
    double sum = 0.0;
    for (double v : mu) {
        if (v < 0.0)
            throw std::runtime_error("conditional evaluator returned a negative entry at " +
                                     describe(state, coord));
        sum += v;
    }
    if (!(sum > 0.0))
        throw std::runtime_error("degenerate conditional (all mass zero) at " +
                                 describe(state, coord));
    for (double& v : mu) v /= sum;
    ++stats_.evaluator_calls;
    stats_.evaluator_entries += mu.size();
    return cache_.emplace(std::move(key), std::move(mu)).first->second;
}

void GibbsSampler::prewarm(const std::vector<int>& state, int coord) {
    conditional(state, coord);
}

std::vector<std::vector<int>> GibbsSampler::run(const std::vector<int>& initial_state,
                                                const GibbsConfig& config, Pcg32* rng) {
    if (initial_state.empty())
        throw std::invalid_argument("sample_chain: state must have at least one coordinate");
    if (config.iterations < 1)
        throw std::invalid_argument("sample_chain: iterations must be at least 1");

    Pcg32 local_rng(config.seed, 7);
    if (config.mode == SamplerMode::stochastic && rng == nullptr) rng = &local_rng;

    const int num_coords = static_cast<int>(initial_state.size());
    std::vector<int> state = initial_state;
    std::vector<int> order(num_coords);
    std::iota(order.begin(), order.end(), 0);

    std::vector<std::vector<int>> visited;
    std::set<std::vector<int>> seen;

    for (int t = 1; t <= config.iterations; ++t) {
        for (int coord : order) {
            const std::vector<double>& mu = conditional(state, coord);
            int selected;
            if (config.mode == SamplerMode::herded) {
                StoreKey key = make_key(state, coord);
                auto [it, inserted] = weights_.try_emplace(key, mu);
                if (it->second.size() != mu.size())
                    throw std::runtime_error("weight store domain size changed at " +
                                             describe(state, coord));
                selected = herding_step(it->second, mu);
            } else {
                selected = draw_categorical(mu, *rng);
            }
            state[coord] = selected;
            ++stats_.coordinate_updates;
            if (seen.insert(state).second) visited.push_back(state);
        }
        if (config.cycling) {
            // lexicographic successor; wraps to the identity automatically
            std::next_permutation(order.begin(), order.end());
        }
    }
    return visited;
}

std::vector<std::vector<int>> sample_chain(const ConditionalEvaluator& evaluator,
                                           const std::vector<int>& initial_state,
                                           const GibbsConfig& config, GibbsStats* stats,
                                           Pcg32* rng) {
    GibbsSampler sampler(evaluator);
    auto visited = sampler.run(initial_state, config, rng);
    if (stats) *stats = sampler.stats();
    return visited;
}

}  // namespace rfs

#include "rfs/config.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace rfs {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items())
        if (!ok.count(item.key()))
            throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
}

template <typename T>
T get_or(const json& j, const std::string& where, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + std::string(key) + "' in " + where + ": " +
                          e.what());
    }
}

std::vector<double> get_numbers(const json& j, const std::string& where, const char* key,
                                std::size_t count, const std::vector<double>& fallback) {
    std::vector<double> v = get_or<std::vector<double>>(j, where, key, fallback);
    if (v.size() != count)
        throw ConfigError("config: '" + std::string(key) + "' in " + where + " needs " +
                          std::to_string(count) + " numbers");
    return v;
}

Rect parse_region(const json& j, const std::string& where) {
    check_keys(j, where, {"x", "y"});
    auto x = get_numbers(j, where, "x", 2, {-1000.0, 1000.0});
    auto y = get_numbers(j, where, "y", 2, {-1000.0, 1000.0});
    Rect r{x[0], x[1], y[0], y[1]};
    if (r.area() <= 0.0) throw ConfigError("config: " + where + " must have positive area");
    return r;
}

MotionModel parse_motion(const json& j) {
    check_keys(j, "scenario.motion", {"dt", "acceleration_variance", "survival_probability"});
    double dt = get_or(j, "scenario.motion", "dt", 1.0);
    auto accel = get_numbers(j, "scenario.motion", "acceleration_variance", 2, {5.0, 5.0});
    double survival = get_or(j, "scenario.motion", "survival_probability", 0.99);
    if (dt <= 0.0) throw ConfigError("config: scenario.motion.dt must be positive");
    if (survival < 0.0 || survival > 1.0)
        throw ConfigError("config: scenario.motion.survival_probability must lie in [0, 1]");
    return MotionModel::constant_velocity(dt, Eigen::Vector2d(accel[0], accel[1]), survival);
}

SensorModel parse_sensor(const json& j, int id, const Rect& default_region) {
    std::string where = "scenario.sensors[" + std::to_string(id) + "]";
    check_keys(j, where, {"detection_probability", "clutter_rate", "noise_variance", "region"});
    double p_d = get_or(j, where, "detection_probability", 0.95);
    double rate = get_or(j, where, "clutter_rate", 15.0);
    auto noise = get_numbers(j, where, "noise_variance", 2, {100.0, 100.0});
    if (p_d <= 0.0 || p_d > 1.0)
        throw ConfigError("config: " + where + ".detection_probability must lie in (0, 1]");
    if (rate < 0.0) throw ConfigError("config: " + where + ".clutter_rate must be nonnegative");
    Rect region = default_region;
    if (j.contains("region")) region = parse_region(j.at("region"), where + ".region");
    return SensorModel::position_sensor(id, Eigen::Vector2d(noise[0], noise[1]), p_d, rate,
                                        region);
}

TruthScheduleEntry parse_truth_entry(const json& j, std::size_t i) {
    std::string where = "scenario.truth[" + std::to_string(i) + "]";
    check_keys(j, where, {"birth", "death", "state"});
    TruthScheduleEntry entry;
    entry.birth_step = get_or(j, where, "birth", 1);
    entry.death_step = get_or(j, where, "death", entry.birth_step);
    auto state = get_numbers(j, where, "state", 4, {0.0, 0.0, 0.0, 0.0});
    entry.initial_state = Eigen::Vector4d(state[0], state[1], state[2], state[3]);
    return entry;
}

ScenarioConfig parse_scenario(const json& j) {
    check_keys(j, "scenario",
               {"horizon", "region", "motion", "truth_process_noise", "sensors", "truth"});
    ScenarioConfig sc;
    sc.horizon = get_or(j, "scenario", "horizon", 0);
    Rect region{-1000.0, 1000.0, -1000.0, 1000.0};
    if (j.contains("region")) region = parse_region(j.at("region"), "scenario.region");
    sc.motion = j.contains("motion") ? parse_motion(j.at("motion"))
                                     : MotionModel::constant_velocity(
                                           1.0, Eigen::Vector2d(5.0, 5.0), 0.99);
    sc.truth_process_noise = get_or(j, "scenario", "truth_process_noise", true);
    if (!j.contains("sensors") || !j.at("sensors").is_array() || j.at("sensors").empty())
        throw ConfigError("sensors: required");
    int id = 0;
    for (const auto& sensor_json : j.at("sensors"))
        sc.sensors.push_back(parse_sensor(sensor_json, id++, region));
    if (j.contains("truth")) {
        std::size_t i = 0;
        for (const auto& entry_json : j.at("truth"))
            sc.truth.push_back(parse_truth_entry(entry_json, i++));
    }
    return sc;
}

GibbsConfig parse_gibbs(const json& j, const std::string& where, const GibbsConfig& base) {
    check_keys(j, where, {"iterations", "cycling", "mode"});
    GibbsConfig g = base;
    g.iterations = get_or(j, where, "iterations", g.iterations);
    g.cycling = get_or(j, where, "cycling", g.cycling);
    if (j.contains("mode"))
        g.mode = parse_sampler_mode(get_or<std::string>(j, where, "mode", "herded"));
    if (g.iterations < 1)
        throw ConfigError("config: " + where + ".iterations must be at least 1");
    return g;
}

BirthConfig parse_birth(const json& j, SamplerMode default_mode) {
    check_keys(j, "filter.birth",
               {"r_b_max", "lambda_b", "psi_bar_cap", "iterations", "cycling", "mode", "prior"});
    BirthConfig b;
    b.gibbs.mode = default_mode;
    if (j.contains("mode"))
        b.gibbs.mode = parse_sampler_mode(get_or<std::string>(j, "filter.birth", "mode",
                                                              "herded"));
    b.r_b_max = get_or(j, "filter.birth", "r_b_max", b.r_b_max);
    b.lambda_b = get_or(j, "filter.birth", "lambda_b", b.lambda_b);
    b.psi_bar_cap = get_or(j, "filter.birth", "psi_bar_cap", b.psi_bar_cap);
    b.gibbs.iterations = get_or(j, "filter.birth", "iterations", b.gibbs.iterations);
    b.gibbs.cycling = get_or(j, "filter.birth", "cycling", b.gibbs.cycling);
    if (b.r_b_max <= 0.0 || b.r_b_max > 1.0)
        throw ConfigError("config: filter.birth.r_b_max must lie in (0, 1]");
    if (b.lambda_b <= 0.0) throw ConfigError("config: filter.birth.lambda_b must be positive");
    if (b.psi_bar_cap <= 0.0)
        throw ConfigError("config: filter.birth.psi_bar_cap must be positive");
    if (b.gibbs.iterations < 1)
        throw ConfigError("config: filter.birth.iterations must be at least 1");
    if (j.contains("prior")) {
        const auto& p = j.at("prior");
        check_keys(p, "filter.birth.prior", {"mean", "covariance_diag"});
        auto mean = get_numbers(p, "filter.birth.prior", "mean", 4, {0.0, 0.0, 0.0, 0.0});
        auto diag = get_numbers(p, "filter.birth.prior", "covariance_diag", 4,
                                {1e10, 2500.0, 1e10, 2500.0});
        b.prior.mean = Eigen::Vector4d(mean[0], mean[1], mean[2], mean[3]);
        b.prior.covariance = Eigen::Vector4d(diag[0], diag[1], diag[2], diag[3]).asDiagonal();
        for (double d : diag)
            if (d <= 0.0)
                throw ConfigError("config: filter.birth.prior.covariance_diag must be positive");
    } else {
        b.prior.mean = Eigen::Vector4d::Zero();
        b.prior.covariance = Eigen::Vector4d(1e10, 2500.0, 1e10, 2500.0).asDiagonal();
    }
    return b;
}

PruneConfig parse_prune(const json& j) {
    check_keys(j, "filter.prune",
               {"hypothesis_threshold", "hypothesis_cap", "existence_threshold",
                "max_components"});
    PruneConfig p;
    p.hypothesis_threshold = get_or(j, "filter.prune", "hypothesis_threshold",
                                    p.hypothesis_threshold);
    p.hypothesis_cap = get_or(j, "filter.prune", "hypothesis_cap", p.hypothesis_cap);
    p.existence_threshold = get_or(j, "filter.prune", "existence_threshold",
                                   p.existence_threshold);
    p.max_components = get_or(j, "filter.prune", "max_components", p.max_components);
    if (p.hypothesis_cap < 1)
        throw ConfigError("config: filter.prune.hypothesis_cap must be at least 1");
    if (p.max_components < 1)
        throw ConfigError("config: filter.prune.max_components must be at least 1");
    return p;
}

FilterConfig parse_filter(const json& j, const ScenarioConfig& scenario) {
    check_keys(j, "filter", {"density", "mode", "assignment", "birth", "prune"});
    FilterConfig f;
    f.motion = scenario.motion;
    f.sensors = scenario.sensors;
    std::string density = get_or<std::string>(j, "filter", "density", "lmb");
    if (density == "lmb")
        f.density = DensityKind::lmb;
    else if (density == "glmb")
        f.density = DensityKind::glmb;
    else
        throw ConfigError("config: filter.density must be \"lmb\" or \"glmb\"");
    if (j.contains("mode"))
        apply_sampler_mode(f, parse_sampler_mode(get_or<std::string>(j, "filter", "mode",
                                                                     "herded")));
    f.birth = parse_birth(j.contains("birth") ? j.at("birth") : json::object(),
                          f.birth.gibbs.mode);
    if (j.contains("assignment"))
        f.assignment = parse_gibbs(j.at("assignment"), "filter.assignment", f.assignment);
    if (j.contains("prune")) f.prune = parse_prune(j.at("prune"));
    return f;
}

MetricConfig parse_metrics(const json& j) {
    check_keys(j, "metrics", {"cutoff", "order", "window"});
    MetricConfig m;
    m.cutoff = get_or(j, "metrics", "cutoff", m.cutoff);
    m.order = get_or(j, "metrics", "order", m.order);
    m.window = get_or(j, "metrics", "window", m.window);
    if (m.cutoff <= 0.0) throw ConfigError("config: metrics.cutoff must be positive");
    if (m.order < 1.0) throw ConfigError("config: metrics.order must be at least 1");
    if (m.window < 1) throw ConfigError("config: metrics.window must be at least 1");
    return m;
}

CampaignConfig parse_campaign(const json& j) {
    check_keys(j, "campaign", {"runs", "base_seed", "modes"});
    CampaignConfig c;
    c.runs = get_or(j, "campaign", "runs", c.runs);
    c.base_seed = get_or(j, "campaign", "base_seed", c.base_seed);
    if (c.runs < 1) throw ConfigError("config: campaign.runs must be at least 1");
    if (j.contains("modes")) {
        c.modes.clear();
        for (const auto& mode_json : j.at("modes")) {
            if (!mode_json.is_string())
                throw ConfigError("config: campaign.modes entries must be strings");
            c.modes.push_back(parse_sampler_mode(mode_json.get<std::string>()));
        }
        if (c.modes.empty()) throw ConfigError("config: campaign.modes must not be empty");
    }
    return c;
}

AppConfig parse_root(const json& root) {
    check_keys(root, "the top level", {"scenario", "filter", "metrics", "campaign"});
    if (!root.contains("scenario")) throw ConfigError("config: scenario section is required");
    AppConfig app;
    app.scenario = parse_scenario(root.at("scenario"));
    app.filter = root.contains("filter") ? parse_filter(root.at("filter"), app.scenario)
                                         : parse_filter(json::object(), app.scenario);
    if (root.contains("metrics")) app.metrics = parse_metrics(root.at("metrics"));
    if (root.contains("campaign")) app.campaign = parse_campaign(root.at("campaign"));
    app.scenario.validate();
    return app;
}

}  // namespace

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError(path + ":" + std::to_string(line) + ": " + e.what());
    }
    try {
        return parse_root(root);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

AppConfig parse_config_text(const std::string& text) {
    json root = json::parse(text);
    return parse_root(root);
}

SamplerMode parse_sampler_mode(const std::string& name) {
    if (name == "herded") return SamplerMode::herded;
    if (name == "stochastic") return SamplerMode::stochastic;
    throw ConfigError("config: sampler mode must be \"herded\" or \"stochastic\", got \"" + name +
                      "\"");
}

void apply_sampler_mode(FilterConfig& filter, SamplerMode mode) {
    filter.assignment.mode = mode;
    filter.birth.gibbs.mode = mode;
}

const char* sampler_mode_name(SamplerMode mode) {
    return mode == SamplerMode::herded ? "herded" : "stochastic";
}

}  // namespace rfs

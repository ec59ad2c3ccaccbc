#include "rfs/config.hpp"
#include "rfs/filters.hpp"
#include "rfs/io.hpp"
#include "rfs/log.hpp"
#include "rfs/metrics.hpp"
#include "rfs/scenario.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace {

namespace fs = std::filesystem;
using namespace rfs;

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_config = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string mode_override;
};

std::ofstream open_out_file(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

/// Estimates from one tracking run, plus per-step wall-clock.
struct TrackingOutput {
    std::vector<EstimateRecord> estimates;
    std::vector<double> step_millis;
};

TrackingOutput run_filter(const FilterConfig& config, const std::vector<MeasurementFrame>& frames,
                          std::uint64_t seed) {
    Filter filter(config, seed);
    TrackingOutput out;
    for (const auto& frame : frames) {
        auto begin = std::chrono::steady_clock::now();
        StepResult result = filter.step(frame);
        auto end = std::chrono::steady_clock::now();
        out.step_millis.push_back(
            std::chrono::duration<double, std::milli>(end - begin).count());
        for (auto& [label, state] : result.estimates)
            out.estimates.push_back(EstimateRecord{result.step, label, state});
    }
    return out;
}

std::vector<TrackHistory> history_from_estimates(const std::vector<EstimateRecord>& records) {
    std::map<Label, TrackHistory> by_label;
    for (const auto& rec : records) {
        auto& h = by_label[rec.label];
        h.label = rec.label;
        h.points[rec.step] = Eigen::Vector2d(rec.state[0], rec.state[2]);
    }
    std::vector<TrackHistory> out;
    out.reserve(by_label.size());
    for (auto& [label, h] : by_label) out.push_back(std::move(h));
    return out;
}

std::vector<TrackHistory> history_from_truth(const SimulationResult& sim, int horizon) {
    std::vector<TrackHistory> out;
    for (std::size_t i = 0; i < sim.truth.size(); ++i) {
        const auto& t = sim.truth[i];
        TrackHistory h;
        h.label = t.label;
        for (int step = t.birth_step; step <= t.death_step() && step <= horizon; ++step)
            h.points[step] = Eigen::Vector2d(t.state(step)[0], t.state(step)[2]);
        out.push_back(std::move(h));
    }
    return out;
}

int count_present(const std::vector<TrackHistory>& tracks, int step) {
    int n = 0;
    for (const auto& t : tracks)
        if (t.present(step)) ++n;
    return n;
}

int cmd_simulate(const CommonArgs& args) {
    AppConfig app = load_config(args.config_path);
    SimulationResult sim = simulate(app.scenario, args.seed);
    fs::create_directories(args.out_path);
    int sensors = static_cast<int>(app.scenario.sensors.size());
    write_truth((fs::path(args.out_path) / "truth.txt").string(), sim, sensors,
                app.scenario.horizon);
    write_measurements((fs::path(args.out_path) / "measurements.txt").string(), sim, sensors,
                       app.scenario.horizon);
    logging::info("wrote truth and measurements to " + args.out_path);
    return exit_ok;
}

int cmd_track(const CommonArgs& args, const std::string& measurements_path) {
    AppConfig app = load_config(args.config_path);
    if (!args.mode_override.empty())
        apply_sampler_mode(app.filter, parse_sampler_mode(args.mode_override));
    MeasurementData data = read_measurements(measurements_path);
    if (data.sensors != static_cast<int>(app.filter.sensors.size()))
        throw ConfigError(measurements_path + ": sensor count " + std::to_string(data.sensors) +
                          " does not match the configured " +
                          std::to_string(app.filter.sensors.size()));
    TrackingOutput out = run_filter(app.filter, data.frames, args.seed);
    write_estimates(args.out_path, out.estimates, data.sensors, data.horizon);
    logging::info("wrote estimates to " + args.out_path);
    return exit_ok;
}

int cmd_metrics(const CommonArgs& args, const std::string& truth_path,
                const std::string& estimates_path) {
    AppConfig app = load_config(args.config_path);
    TrackData truth = read_truth(truth_path);
    TrackData est = read_estimates(estimates_path);
    int horizon = std::max(truth.horizon, est.horizon);
    auto out = open_out_file(args.out_path);
    out << "step,ospa,ospa2,truth_card,est_card\n";
    for (int step = 1; step <= horizon; ++step) {
        std::vector<Eigen::Vector2d> xs, ys;
        for (const auto& t : truth.tracks)
            if (t.present(step)) xs.push_back(t.points.at(step));
        for (const auto& t : est.tracks)
            if (t.present(step)) ys.push_back(t.points.at(step));
        double d1 = ospa(xs, ys, app.metrics.cutoff, app.metrics.order);
        double d2 = ospa2(truth.tracks, est.tracks, step, app.metrics);
        out << step << ',' << format_g9(d1) << ',' << format_g9(d2) << ',' << xs.size() << ','
            << ys.size() << '\n';
    }
    return exit_ok;
}

struct RunRecord {
    SamplerMode mode = SamplerMode::herded;
    int run = 0;
    std::uint64_t seed = 0;
    std::vector<double> ospa2_per_step;
    std::vector<int> truth_card;
    std::vector<int> est_card;
    std::vector<double> step_millis;
    bool failed = false;
    std::string error;
};

RunRecord campaign_run(const AppConfig& app, SamplerMode mode, int run) {
    RunRecord rec;
    rec.mode = mode;
    rec.run = run;
    rec.seed = app.campaign.base_seed + static_cast<std::uint64_t>(run);
    SimulationResult sim = simulate(app.scenario, rec.seed);
    FilterConfig fc = app.filter;
    apply_sampler_mode(fc, mode);
    TrackingOutput out = run_filter(fc, sim.frames, rec.seed);
    rec.step_millis = out.step_millis;
    auto truth_hist = history_from_truth(sim, app.scenario.horizon);
    auto est_hist = history_from_estimates(out.estimates);
    for (int step = 1; step <= app.scenario.horizon; ++step) {
        rec.ospa2_per_step.push_back(ospa2(truth_hist, est_hist, step, app.metrics));
        rec.truth_card.push_back(count_present(truth_hist, step));
        rec.est_card.push_back(count_present(est_hist, step));
    }
    return rec;
}

int cmd_campaign(const CommonArgs& args) {
    AppConfig app = load_config(args.config_path);
    std::vector<SamplerMode> modes = app.campaign.modes;
    if (!args.mode_override.empty()) modes = {parse_sampler_mode(args.mode_override)};

    struct Task {
        SamplerMode mode;
        int run;
    };
    std::vector<Task> tasks;
    for (SamplerMode mode : modes)
        for (int run = 0; run < app.campaign.runs; ++run) tasks.push_back({mode, run});

    std::vector<RunRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                records[i] = campaign_run(app, tasks[i].mode, tasks[i].run);
            } catch (const std::exception& e) {
                records[i].mode = tasks[i].mode;
                records[i].run = tasks[i].run;
                records[i].failed = true;
                records[i].error = e.what();
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "run " << tasks[i].run << " (" << sampler_mode_name(tasks[i].mode)
                          << ") failed: " << e.what() << '\n';
            }
        }
    };
    int workers = std::max(1, args.workers);
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    fs::create_directories(args.out_path);
    bool any_failed = false;

    auto runs_csv = open_out_file((fs::path(args.out_path) / "runs.csv").string());
    runs_csv << "mode,run,step,ospa2,truth_card,est_card\n";
    for (const auto& rec : records) {
        if (rec.failed) {
            any_failed = true;
            continue;
        }
        for (std::size_t s = 0; s < rec.ospa2_per_step.size(); ++s)
            runs_csv << sampler_mode_name(rec.mode) << ',' << rec.run << ',' << (s + 1) << ','
                     << format_g9(rec.ospa2_per_step[s]) << ',' << rec.truth_card[s] << ','
                     << rec.est_card[s] << '\n';
    }

    auto summary_csv = open_out_file((fs::path(args.out_path) / "summary.csv").string());
    summary_csv << "mode,step,mean_ospa2\n";
    std::vector<PlotSeries> series;
    for (SamplerMode mode : modes) {
        PlotSeries line;
        line.name = sampler_mode_name(mode);
        for (int step = 1; step <= app.scenario.horizon; ++step) {
            double sum = 0.0;
            int n = 0;
            for (const auto& rec : records) {
                if (rec.failed || rec.mode != mode) continue;
                sum += rec.ospa2_per_step[static_cast<std::size_t>(step - 1)];
                ++n;
            }
            if (n == 0) continue;
            double mean = sum / n;
            summary_csv << sampler_mode_name(mode) << ',' << step << ',' << format_g9(mean)
                        << '\n';
            line.x.push_back(step);
            line.y.push_back(mean);
        }
        series.push_back(std::move(line));
    }
    write_svg_plot((fs::path(args.out_path) / "ospa2.svg").string(),
                   "Mean trajectory error by sampler mode", "step", "mean OSPA(2)", series);

    return any_failed ? exit_runtime : exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Multi-sensor multi-target tracking simulator"};
    cli.require_subcommand(1);

    CommonArgs args;
    std::string measurements_path, truth_path, estimates_path;

    auto add_common = [&](CLI::App* sub, bool with_seed) {
        sub->add_option("--config", args.config_path, "config file (JSON)")->required();
        sub->add_option("--out", args.out_path, "output path")->required();
        if (with_seed) sub->add_option("--seed", args.seed, "random seed");
    };

    CLI::App* sim = cli.add_subcommand("simulate", "generate truth and measurements");
    add_common(sim, true);

    CLI::App* track = cli.add_subcommand("track", "run the filter over a measurement file");
    add_common(track, true);
    track->add_option("--measurements", measurements_path, "measurement file")->required();
    track->add_option("--mode", args.mode_override, "sampler mode override (herded|stochastic)");

    CLI::App* campaign = cli.add_subcommand("campaign", "Monte Carlo mode comparison");
    add_common(campaign, false);
    campaign->add_option("--workers", args.workers, "parallel runs");
    campaign->add_option("--mode", args.mode_override, "restrict to one sampler mode");

    CLI::App* metrics = cli.add_subcommand("metrics", "per-step error metrics");
    add_common(metrics, false);
    metrics->add_option("--truth", truth_path, "truth file")->required();
    metrics->add_option("--estimates", estimates_path, "estimate file")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return exit_config;
    }

    try {
        if (sim->parsed()) return cmd_simulate(args);
        if (track->parsed()) return cmd_track(args, measurements_path);
        if (campaign->parsed()) return cmd_campaign(args);
        if (metrics->parsed()) return cmd_metrics(args, truth_path, estimates_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_config;
}

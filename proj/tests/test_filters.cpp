#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rfs/filters.hpp"
#include "rfs/scenario.hpp"

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace rfs;
using namespace testsupport;

namespace {

GaussianComponent component_at(double px, double py, double pos_var = 50.0,
                               double vel_var = 10.0) {
    GaussianComponent c;
    c.weight = 1.0;
    c.mean = Eigen::Vector4d(px, 0.0, py, 0.0);
    c.covariance = Eigen::Vector4d(pos_var, vel_var, pos_var, vel_var).asDiagonal();
    return c;
}

PruneConfig keep_everything() {
    PruneConfig p;
    p.hypothesis_threshold = 0.0;
    p.hypothesis_cap = 1000000;
    p.existence_threshold = 0.0;
    p.max_components = 1000;
    return p;
}

// Two close tracks and two nearby measurements, so every one of the 14
// valid assignment maps carries mass the chain can actually reach.
struct UpdateFixture {
    SensorModel sensor;
    MeasurementFrame frame;
    GlmbDensity prior;

    UpdateFixture() : sensor(test_sensor(0, 25.0, 0.8, 5.0, 100.0)) {
        frame.time = 1;
        frame.per_sensor = {{Eigen::Vector2d(2.0, 1.0), Eigen::Vector2d(8.0, 4.0)}};

        prior.table.push_back(GlmbTrackEntry{Label(1, 0), {component_at(0.0, 0.0)}, -1});
        prior.table.push_back(GlmbTrackEntry{Label(1, 1), {component_at(10.0, 5.0)}, -1});
        GlmbHypothesis hyp;
        hyp.weight = 1.0;
        hyp.entries = {0, 1};
        hyp.existences = {0.7, 0.6};
        prior.hypotheses.push_back(std::move(hyp));
    }
};

// (label -> column) fingerprint of a posterior hypothesis; death drops the label
std::map<Label, int> hypothesis_fingerprint(const GlmbDensity& d, const GlmbHypothesis& h) {
    std::map<Label, int> fp;
    for (int e : h.entries)
        fp[d.table[static_cast<std::size_t>(e)].label] =
            d.table[static_cast<std::size_t>(e)].last_meas_index;
    return fp;
}

}  // namespace

TEST_CASE("assignment scores follow the miss, detection, death pattern") {
    UpdateFixture f;
    AssignmentProblem problem =
        build_assignment(f.prior, f.prior.hypotheses[0], f.frame, f.sensor);
    REQUIRE(problem.rows() == 2);
    REQUIRE(problem.measurements == 2);
    CHECK(problem.death_column() == 3);

    CHECK(problem.scores(0, 0) == doctest::Approx(0.7 * 0.2).epsilon(1e-12));
    CHECK(problem.scores(1, 0) == doctest::Approx(0.6 * 0.2).epsilon(1e-12));
    CHECK(problem.scores(0, 3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(problem.scores(1, 3) == doctest::Approx(0.4).epsilon(1e-12));

    // detection score r p_D N(z; Hm, HPH^T + R) / kappa, by hand
    double kappa = 5.0 / 40000.0;
    double s = 50.0 + 25.0;
    Eigen::Vector2d z1(2.0, 1.0);
    double q = std::exp(-0.5 * (z1.squaredNorm() / s)) / (2.0 * 3.14159265358979323846 * s);
    CHECK(problem.scores(0, 1) == doctest::Approx(0.7 * 0.8 * q / kappa).epsilon(1e-12));
}

TEST_CASE("single sensor update matches exhaustive enumeration") {
    UpdateFixture f;
    GibbsConfig gibbs;
    gibbs.iterations = 6000;
    gibbs.mode = SamplerMode::herded;

    auto [posterior, assoc] =
        update_one_sensor(f.prior, f.frame, f.sensor, gibbs, keep_everything());

    AssignmentProblem problem =
        build_assignment(f.prior, f.prior.hypotheses[0], f.frame, f.sensor);
    auto exact = enumerate_assignments(problem.scores, problem.measurements);
    REQUIRE(exact.size() == 14);
    double total = 0.0;
    for (const auto& a : exact) total += a.weight;

    // every map must have been found
    REQUIRE(posterior.hypotheses.size() == exact.size());

    // weights agree with the normalized exact products
    std::map<std::map<Label, int>, double> exact_by_fp;
    for (const auto& a : exact) {
        std::map<Label, int> fp;
        for (int row = 0; row < 2; ++row) {
            int col = a.columns[static_cast<std::size_t>(row)];
            if (col == problem.death_column()) continue;
            fp[f.prior.table[static_cast<std::size_t>(row)].label] = col;
        }
        exact_by_fp[fp] += a.weight / total;
    }
    for (const auto& hyp : posterior.hypotheses) {
        auto fp = hypothesis_fingerprint(posterior, hyp);
        REQUIRE(exact_by_fp.count(fp) == 1);
        CHECK(hyp.weight == doctest::Approx(exact_by_fp[fp]).epsilon(1e-9));
    }

    // per-measurement association probabilities from the same enumeration
    for (int j = 1; j <= 2; ++j) {
        double expected = 0.0;
        for (const auto& a : exact)
            if (a.columns[0] == j || a.columns[1] == j) expected += a.weight / total;
        CHECK(assoc[static_cast<std::size_t>(j - 1)] ==
              doctest::Approx(expected).epsilon(1e-9));
    }

    // no hypothesis may use one measurement twice
    for (const auto& hyp : posterior.hypotheses) {
        std::set<int> used;
        for (int e : hyp.entries) {
            int j = posterior.table[static_cast<std::size_t>(e)].last_meas_index;
            if (j >= 1) CHECK(used.insert(j).second);
        }
        for (double r : hyp.existences) CHECK(r == 1.0);
    }
}

TEST_CASE("updated track densities are the conditioned mixtures") {
    UpdateFixture f;
    GibbsConfig gibbs;
    gibbs.iterations = 200;
    auto [posterior, assoc] =
        update_one_sensor(f.prior, f.frame, f.sensor, gibbs, keep_everything());

    for (const auto& entry : posterior.table) {
        const GlmbTrackEntry& parent =
            entry.label == Label(1, 0) ? f.prior.table[0] : f.prior.table[1];
        if (entry.last_meas_index == 0) {
            CHECK((entry.mixture[0].mean - parent.mixture[0].mean).cwiseAbs().maxCoeff() <
                  1e-12);
        } else {
            REQUIRE(entry.last_meas_index >= 1);
            const Eigen::Vector2d& z = f.frame.measurement(0, entry.last_meas_index);
            auto [q, conditioned] = measurement_marginal(parent.mixture[0], z, f.sensor);
            CHECK((entry.mixture[0].mean - conditioned.mean).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((entry.mixture[0].covariance - conditioned.covariance)
                      .cwiseAbs()
                      .maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("certain detection removes the miss branch") {
    UpdateFixture f;
    f.sensor.detection_probability = 1.0;
    GibbsConfig gibbs;
    gibbs.iterations = 1000;

    auto [posterior, assoc] =
        update_one_sensor(f.prior, f.frame, f.sensor, gibbs, keep_everything());

    for (const auto& entry : posterior.table) CHECK(entry.last_meas_index != 0);

    AssignmentProblem problem =
        build_assignment(f.prior, f.prior.hypotheses[0], f.frame, f.sensor);
    auto exact = enumerate_assignments(problem.scores, problem.measurements);
    // tracks can only be detected or die: 2 ways to place both on distinct
    // measurements, 4 single-death maps, 1 double death
    REQUIRE(exact.size() == 7);
    CHECK(posterior.hypotheses.size() == 7);
}

TEST_CASE("updates are deterministic per mode and seed") {
    UpdateFixture f;
    GibbsConfig gibbs;
    gibbs.iterations = 150;

    auto snapshot = [](const GlmbDensity& d) {
        std::vector<std::pair<std::vector<std::pair<std::string, int>>, double>> s;
        for (const auto& h : d.hypotheses) {
            std::vector<std::pair<std::string, int>> fp;
            for (int e : h.entries)
                fp.emplace_back(d.table[static_cast<std::size_t>(e)].label.str(),
                                d.table[static_cast<std::size_t>(e)].last_meas_index);
            std::sort(fp.begin(), fp.end());
            s.emplace_back(std::move(fp), h.weight);
        }
        return s;
    };

    auto [pa, aa] = update_one_sensor(f.prior, f.frame, f.sensor, gibbs, keep_everything());
    auto [pb, ab] = update_one_sensor(f.prior, f.frame, f.sensor, gibbs, keep_everything());
    CHECK(snapshot(pa) == snapshot(pb));
    CHECK(aa == ab);

    gibbs.mode = SamplerMode::stochastic;
    Pcg32 r1(7, 1), r2(7, 1);
    auto [pc, ac] = update_one_sensor(f.prior, f.frame, f.sensor, gibbs, keep_everything(), &r1);
    auto [pd, ad] = update_one_sensor(f.prior, f.frame, f.sensor, gibbs, keep_everything(), &r2);
    CHECK(snapshot(pc) == snapshot(pd));
    CHECK(ac == ad);
}

TEST_CASE("lmb prediction scales existence and advances mixtures") {
    MotionModel motion = test_motion(1.0, 4.0, 0.9);
    LmbDensity prior;
    prior.tracks.push_back({Label(1, 0), 0.8, {component_at(5.0, -3.0)}});

    LmbDensity birth;
    birth.tracks.push_back({Label(2, MeasurementTuple({1, 0})), 0.1,
                            {component_at(20.0, 20.0)}});

    LmbDensity predicted = predict(prior, motion, birth);
    REQUIRE(predicted.tracks.size() == 2);
    const LabeledTrack* existing = predicted.find(Label(1, 0));
    REQUIRE(existing != nullptr);
    CHECK(existing->existence == doctest::Approx(0.72).epsilon(1e-12));
    GaussianComponent advanced = predict_component(component_at(5.0, -3.0), motion);
    CHECK((existing->mixture[0].mean - advanced.mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((existing->mixture[0].covariance - advanced.covariance).cwiseAbs().maxCoeff() <
          1e-12);

    // birth tracks enter untouched
    const LabeledTrack* born = predicted.find(Label(2, MeasurementTuple({1, 0})));
    REQUIRE(born != nullptr);
    CHECK(born->existence == doctest::Approx(0.1).epsilon(1e-12));
    CHECK((born->mixture[0].mean - Eigen::Vector4d(20, 0, 20, 0)).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("glmb prediction appends birth entries to every hypothesis") {
    MotionModel motion = test_motion(1.0, 4.0, 0.95);
    GlmbDensity prior;
    prior.table.push_back(GlmbTrackEntry{Label(1, 0), {component_at(0.0, 0.0)}, 2});
    prior.hypotheses.push_back({0.6, {0}, {1.0}});
    prior.hypotheses.push_back({0.4, {}, {}});

    LmbDensity birth;
    birth.tracks.push_back({Label(2, MeasurementTuple({0, 1})), 0.05,
                            {component_at(9.0, 9.0)}});

    GlmbDensity predicted = predict(prior, motion, birth);
    REQUIRE(predicted.table.size() == 2);
    CHECK(predicted.table[0].last_meas_index == -1);
    REQUIRE(predicted.hypotheses.size() == 2);
    CHECK(predicted.hypotheses[0].entries == std::vector<int>{0, 1});
    CHECK(predicted.hypotheses[0].existences[0] == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(predicted.hypotheses[0].existences[1] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(predicted.hypotheses[1].entries == std::vector<int>{1});
    CHECK(predicted.hypotheses[1].existences[0] == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("colliding birth labels are rejected") {
    MotionModel motion = test_motion();
    LmbDensity prior;
    prior.tracks.push_back({Label(2, MeasurementTuple({1, 0})), 0.5,
                            {component_at(0.0, 0.0)}});
    LmbDensity birth;
    birth.tracks.push_back({Label(2, MeasurementTuple({1, 0})), 0.1,
                            {component_at(1.0, 1.0)}});
    CHECK_THROWS_AS(predict(prior, motion, birth), std::runtime_error);

    GlmbDensity gprior;
    gprior.table.push_back(GlmbTrackEntry{Label(2, MeasurementTuple({1, 0})),
                                          {component_at(0.0, 0.0)}, -1});
    gprior.hypotheses.push_back({1.0, {0}, {0.5}});
    CHECK_THROWS_AS(predict(gprior, motion, birth), std::runtime_error);
}

TEST_CASE("marginalization blends hypotheses into independent tracks") {
    GlmbDensity d;
    d.table.push_back(GlmbTrackEntry{Label(1, 0), {component_at(0.0, 0.0)}, 0});
    d.table.push_back(GlmbTrackEntry{Label(1, 0), {component_at(4.0, 0.0)}, 1});
    d.table.push_back(GlmbTrackEntry{Label(1, 1), {component_at(9.0, 9.0)}, 1});
    d.hypotheses.push_back({0.6, {0}, {0.8}});
    d.hypotheses.push_back({0.4, {1, 2}, {0.5, 1.0}});

    LmbDensity lmb = marginalize(d);
    REQUIRE(lmb.tracks.size() == 2);
    const LabeledTrack* a = lmb.find(Label(1, 0));
    REQUIRE(a != nullptr);
    CHECK(a->existence == doctest::Approx(0.6 * 0.8 + 0.4 * 0.5).epsilon(1e-12));
    // mixture blended with masses 0.48 and 0.20, then normalized
    REQUIRE(a->mixture.size() == 2);
    CHECK(a->mixture[0].weight == doctest::Approx(0.48 / 0.68).epsilon(1e-12));
    CHECK(a->mixture[1].weight == doctest::Approx(0.20 / 0.68).epsilon(1e-12));
    CHECK(a->mixture[1].mean[0] == doctest::Approx(4.0));

    const LabeledTrack* b = lmb.find(Label(1, 1));
    REQUIRE(b != nullptr);
    CHECK(b->existence == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("marginalization clamps existence at one") {
    GlmbDensity d;
    d.table.push_back(GlmbTrackEntry{Label(1, 0), {component_at(0.0, 0.0)}, 1});
    d.hypotheses.push_back({0.7, {0}, {1.0}});
    d.hypotheses.push_back({0.5, {0}, {1.0}});  // deliberately unnormalized
    LmbDensity lmb = marginalize(d);
    REQUIRE(lmb.tracks.size() == 1);
    CHECK(lmb.tracks[0].existence == 1.0);
}

namespace {

FilterConfig smoke_config(DensityKind kind, int sensor_count = 2) {
    FilterConfig cfg;
    cfg.density = kind;
    cfg.motion = test_motion(1.0, 4.0, 0.99);
    for (int s = 0; s < sensor_count; ++s)
        cfg.sensors.push_back(test_sensor(s, 9.0, 0.95, 2.0, 200.0));
    cfg.birth.prior = test_prior(40000.0, 100.0);
    cfg.birth.gibbs.iterations = 50;
    cfg.assignment.iterations = 50;
    cfg.prune = PruneConfig{};
    return cfg;
}

ScenarioConfig smoke_scenario(int sensor_count = 2) {
    ScenarioConfig sc;
    sc.horizon = 6;
    sc.motion = test_motion(1.0, 4.0, 0.99);
    for (int s = 0; s < sensor_count; ++s)
        sc.sensors.push_back(test_sensor(s, 9.0, 0.95, 2.0, 200.0));
    sc.truth.push_back({1, 6, Eigen::Vector4d(50.0, 2.0, -30.0, 1.0)});
    return sc;
}

}  // namespace

TEST_CASE("the filter locks onto a real target") {
    ScenarioConfig sc = smoke_scenario();
    SimulationResult sim = simulate(sc, 19);

    Filter filter(smoke_config(DensityKind::lmb), 19);
    std::size_t final_count = 0;
    Eigen::Vector4d final_estimate = Eigen::Vector4d::Zero();
    for (const auto& frame : sim.frames) {
        StepResult res = filter.step(frame);
        final_count = res.estimates.size();
        if (!res.estimates.empty()) final_estimate = res.estimates[0].second;
    }
    REQUIRE(final_count == 1);
    Eigen::Vector4d truth_state = sim.truth[0].state(6);
    double err = std::hypot(final_estimate[0] - truth_state[0],
                            final_estimate[2] - truth_state[2]);
    CHECK(err < 20.0);
}

TEST_CASE("full filter steps are reproducible") {
    ScenarioConfig sc = smoke_scenario();
    SimulationResult sim = simulate(sc, 23);

    auto run = [&](SamplerMode mode, std::uint64_t seed) {
        FilterConfig cfg = smoke_config(DensityKind::lmb);
        cfg.assignment.mode = mode;
        cfg.birth.gibbs.mode = mode;
        Filter filter(cfg, seed);
        std::vector<std::pair<std::string, double>> log;
        for (const auto& frame : sim.frames) {
            StepResult res = filter.step(frame);
            for (const auto& [label, state] : res.estimates)
                log.emplace_back(label.str(), state[0]);
        }
        return log;
    };

    CHECK(run(SamplerMode::herded, 1) == run(SamplerMode::herded, 99));
    CHECK(run(SamplerMode::stochastic, 5) == run(SamplerMode::stochastic, 5));
}

TEST_CASE("lmb and glmb modes agree while the prior is a single hypothesis") {
    // one sensor: the iterated corrector marginalizes between sensors, so
    // the two representations only coincide for single-sensor steps
    ScenarioConfig sc = smoke_scenario(1);
    SimulationResult sim = simulate(sc, 31);

    FilterConfig lmb_cfg = smoke_config(DensityKind::lmb, 1);
    FilterConfig glmb_cfg = smoke_config(DensityKind::glmb, 1);
    lmb_cfg.prune = keep_everything();
    glmb_cfg.prune = keep_everything();

    Filter lmb_filter(lmb_cfg, 3);
    Filter glmb_filter(glmb_cfg, 3);
    // step 1 produces the first birth, step 2 updates it once: the two
    // representations coincide until a second update correlates tracks
    for (int step = 0; step < 2; ++step) {
        lmb_filter.step(sim.frames[static_cast<std::size_t>(step)]);
        glmb_filter.step(sim.frames[static_cast<std::size_t>(step)]);
    }

    LmbDensity direct = lmb_filter.marginal();
    LmbDensity via_glmb = marginalize(glmb_filter.posterior());
    via_glmb.sort_by_label();
    REQUIRE(direct.tracks.size() == via_glmb.tracks.size());
    for (std::size_t i = 0; i < direct.tracks.size(); ++i) {
        CHECK(direct.tracks[i].label == via_glmb.tracks[i].label);
        CHECK(direct.tracks[i].existence ==
              doctest::Approx(via_glmb.tracks[i].existence).epsilon(1e-9));
        CHECK((mixture_mean(direct.tracks[i].mixture) -
               mixture_mean(via_glmb.tracks[i].mixture))
                  .cwiseAbs()
                  .maxCoeff() < 1e-6);
    }
}

TEST_CASE("filter construction validates sensors") {
    FilterConfig cfg = smoke_config(DensityKind::lmb);
    cfg.sensors.clear();
    CHECK_THROWS_AS(Filter(cfg, 0), std::invalid_argument);

    cfg = smoke_config(DensityKind::lmb);
    cfg.sensors[1].id = 3;
    CHECK_THROWS_AS(Filter(cfg, 0), std::invalid_argument);

    Filter ok(smoke_config(DensityKind::lmb), 0);
    MeasurementFrame frame;
    frame.time = 1;
    frame.per_sensor = {{}};
    CHECK_THROWS_AS(ok.step(frame), std::invalid_argument);
}

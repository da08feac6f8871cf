#include "test_util.hpp"

#include "tpmbm/simulator.hpp"
#include "tpmbm/tracker.hpp"

#include <doctest.h>

using namespace tpmbm;
using namespace tpmbm::testing;

namespace {

ModelSet models() { return cv_models(0.5, 25.0, 0.99, 0.9, 1e-5, 500.0, 0.01, 40000.0, 4.0, 2.0); }

SimulationOutput crossing(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.kind = TruthKind::scripted;
    spec.duration = 40;
    spec.scripted.push_back(ScriptedTarget{0, 39, Vector{{-100.0, 0.0, 5.0, 0.5}}});
    spec.scripted.push_back(ScriptedTarget{0, 25, Vector{{100.0, 20.0, -5.0, 0.0}}});
    return simulate(spec, models(), seed);
}

}  // namespace

TEST_CASE("variant names round-trip") {
    for (auto v : {TrackerVariant::current, TrackerVariant::all, TrackerVariant::filter}) {
        CHECK(parse_variant(variant_name(v)) == v);
    }
    CHECK_THROWS_AS(parse_variant("glmb"), std::invalid_argument);
}

TEST_CASE("configuration validation") {
    TrackerConfig c;
    CHECK_NOTHROW(c.validate());
    c.window_lag = 3;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);  // all-trajectories cannot be truncated
    c.variant = TrackerVariant::current;
    CHECK_NOTHROW(c.validate());
    c.k_best = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    TrackerConfig f;
    f.variant = TrackerVariant::filter;
    CHECK(f.effective_window_lag() == 1);
}

TEST_CASE("trackers follow two targets and keep dead trajectories when asked") {
    const SimulationOutput sim = crossing(3);
    TrackerConfig cur;
    cur.variant = TrackerVariant::current;
    TrackerConfig all;
    all.variant = TrackerVariant::all;
    Tracker tc(models(), cur), ta(models(), all);
    for (const auto& frame : sim.frames) {
        tc.step(frame);
        ta.step(frame);
    }
    CHECK(tc.time() == 39);
    const auto ec = tc.estimates();
    const auto ea = ta.estimates();
    // The second target died at 25: gone from the current set, kept in the set of all trajectories.
    CHECK(ec.size() == 1);
    REQUIRE(ea.size() == 2);
    std::size_t dead = 0;
    for (const auto& e : ea) {
        if (e.trajectory.end_time < 39) {
            ++dead;
            CHECK(e.trajectory.end_time >= 24);
            CHECK(e.trajectory.end_time <= 27);
        } else {
            CHECK(e.trajectory.birth_time == 0);
            CHECK((e.trajectory.states.back().head(2) - sim.truth[0].states.back().head(2)).norm() < 20.0);
        }
    }
    CHECK(dead == 1);
}

TEST_CASE("filter estimates equal the current tracker's final states") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const SimulationOutput sim = crossing(seed);
        TrackerConfig cur;
        cur.variant = TrackerVariant::current;
        TrackerConfig fil;
        fil.variant = TrackerVariant::filter;
        Tracker tc(models(), cur), tf(models(), fil);
        for (const auto& frame : sim.frames) {
            tc.step(frame);
            tf.step(frame);
            const auto ec = tc.estimates();
            const auto ef = tf.estimates();
            REQUIRE(ec.size() == ef.size());
            for (std::size_t i = 0; i < ec.size(); ++i) {
                CHECK(ef[i].trajectory.length() == 1);
                CHECK(ef[i].track_origin == ec[i].track_origin);
                CHECK(scaled_diff(ef[i].trajectory.states.back(), ec[i].trajectory.states.back()) < 1e-8);
            }
        }
    }
}

TEST_CASE("window truncation bounds the stored sequence length") {
    const SimulationOutput sim = crossing(4);
    TrackerConfig c;
    c.variant = TrackerVariant::current;
    c.window_lag = 5;
    Tracker t(models(), c);
    for (const auto& frame : sim.frames) t.step(frame);
    for (const auto& track : t.density().tracks) {
        for (const auto& leaf : track.leaves) {
            for (const auto& comp : leaf.density.components) CHECK(comp.density.length() <= 5);
        }
    }
    for (const auto& e : t.estimates()) CHECK(e.trajectory.length() <= 5);
}

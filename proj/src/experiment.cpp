#include "tpmbm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace tpmbm {

Json default_config_json() {
    return Json::parse(R"({
  "models": {
    "motion": {"type": "constant_velocity", "sigma_v": 0.5, "dt": 1.0},
    "survival_prob": 0.99,
    "measurement": {"R": [[100.0, 0.0], [0.0, 100.0]], "detection_prob": 0.98},
    "clutter": {"rate_density": 2.5e-8, "region": [[-1000.0, 1000.0], [-1000.0, 1000.0]]},
    "birth": {"initial": [], "per_step": []}
  },
  "scenario": {"duration": 100, "truth": "stochastic", "targets": [], "runs": 1, "seed": 1},
  "tracker": {
    "variant": "all",
    "k_best": 20,
    "gate_probability": 0.999,
    "exact": false,
    "new_track_floor": 1e-4,
    "window_lag": 0,
    "extract_threshold": 0.5,
    "dead_component_threshold": 0.0,
    "prune": {
      "hypothesis_ratio": 1e-4,
      "max_hypotheses": 200,
      "existence_threshold": 1e-3,
      "recycle": false,
      "max_undetected": 50,
      "mixture_threshold": 1e-6,
      "max_mixture": 0
    }
  },
  "metrics": {"type": "trajectory", "c": 100.0, "p": 1.0, "gamma": 20.0,
              "position_dims": 2, "normalize_by_time": true},
  "output": {"dir": "out", "estimates": "final"},
  "execution": {"threads": 0}
})");
}

Json merge_json(const Json& base, const Json& overlay) {
    if (!base.is_object() || !overlay.is_object()) return overlay;
    Json out = base;
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (out.contains(it.key())) out[it.key()] = merge_json(out[it.key()], it.value());
        else out[it.key()] = it.value();
    }
    return out;
}

void apply_override(Json& config, const std::string& dotted_path, const std::string& value) {
    if (dotted_path.empty()) throw std::invalid_argument("override: empty key");
    Json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted_path.find('.', start);
        const std::string key = dotted_path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw std::invalid_argument("override: malformed key '" + dotted_path + "'");
        if (node->is_null()) *node = Json::object();
        if (!node->is_object()) throw std::invalid_argument("override: '" + dotted_path + "' crosses a non-object");
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    Json parsed = Json::parse(value, nullptr, false);
    *node = parsed.is_discarded() ? Json(value) : parsed;
}

namespace {

std::vector<BirthComponent> parse_birth(const Json& list) {
    std::vector<BirthComponent> out;
    for (const auto& c : list) {
        out.push_back(BirthComponent{c.at("weight").get<double>(), vector_from_json(c.at("mean")),
                                     matrix_from_json(c.at("cov"))});
    }
    return out;
}

ModelSet parse_models(const Json& j) {
    const auto& motion_j = j.at("motion");
    const double ps = j.at("survival_prob").get<double>();
    const std::string type = motion_j.value("type", "constant_velocity");
    std::optional<MotionModel> motion;
    if (type == "constant_velocity") {
        motion.emplace(constant_velocity(motion_j.at("sigma_v").get<double>(), motion_j.value("dt", 1.0), ps));
    } else if (type == "linear") {
        motion.emplace(matrix_from_json(motion_j.at("F")), matrix_from_json(motion_j.at("Q")), ps);
    } else {
        throw std::invalid_argument("config: models.motion.type must be constant_velocity or linear");
    }
    const auto& meas_j = j.at("measurement");
    const Matrix r = matrix_from_json(meas_j.at("R"));
    const double pd = meas_j.at("detection_prob").get<double>();
    std::optional<MeasurementModel> meas;
    if (meas_j.contains("H")) meas.emplace(matrix_from_json(meas_j.at("H")), r, pd);
    else meas.emplace(position_measurement(r, pd));

    ClutterModel clutter;
    clutter.rate_density = j.at("clutter").at("rate_density").get<double>();
    for (const auto& bounds : j.at("clutter").at("region")) {
        clutter.lower.push_back(bounds.at(0).get<double>());
        clutter.upper.push_back(bounds.at(1).get<double>());
    }
    BirthModel birth;
    birth.initial = parse_birth(j.at("birth").value("initial", Json::array()));
    birth.per_step = parse_birth(j.at("birth").value("per_step", Json::array()));
    ModelSet models{*motion, *meas, birth, clutter};
    if (models.measurement.obs().cols() != static_cast<Eigen::Index>(models.motion.state_dim())) {
        throw std::invalid_argument("config: measurement matrix does not match the state dimension");
    }
    models.birth.validate(models.motion.state_dim());
    models.clutter.validate(models.measurement.meas_dim());
    return models;
}

ScenarioSpec parse_scenario(const Json& j) {
    ScenarioSpec s;
    s.duration = j.at("duration").get<Time>();
    const std::string truth = j.at("truth").get<std::string>();
    if (truth == "stochastic") {
        s.kind = TruthKind::stochastic;
    } else if (truth == "scripted") {
        s.kind = TruthKind::scripted;
        for (const auto& t : j.at("targets")) {
            s.scripted.push_back(ScriptedTarget{t.at("birth_time").get<Time>(), t.at("end_time").get<Time>(),
                                                vector_from_json(t.at("initial_state"))});
        }
    } else if (truth == "waypoints") {
        s.kind = TruthKind::waypoints;
        for (const auto& t : j.at("targets")) {
            WaypointTarget w{t.at("birth_time").get<Time>(), t.at("end_time").get<Time>(), {}, {}};
            for (const auto& p : t.at("waypoints")) {
                w.times.push_back(p.at(0).get<double>());
                w.positions.emplace_back(p.at(1).get<double>(), p.at(2).get<double>());
            }
            s.waypoint_targets.push_back(std::move(w));
        }
    } else {
        throw std::invalid_argument("config: scenario.truth must be stochastic, scripted or waypoints");
    }
    return s;
}

TrackerConfig parse_tracker(const Json& j) {
    TrackerConfig t;
    t.variant = parse_variant(j.at("variant").get<std::string>());
    t.k_best = j.at("k_best").get<std::size_t>();
    t.gate_probability = j.at("gate_probability").get<double>();
    t.exact = j.at("exact").get<bool>();
    t.new_track_floor = j.at("new_track_floor").get<double>();
    t.window_lag = j.at("window_lag").get<std::size_t>();
    t.extract_threshold = j.at("extract_threshold").get<double>();
    t.dead_component_threshold = j.at("dead_component_threshold").get<double>();
    const auto& p = j.at("prune");
    t.prune.hypothesis_ratio = p.at("hypothesis_ratio").get<double>();
    t.prune.max_hypotheses = p.at("max_hypotheses").get<std::size_t>();
    t.prune.existence_threshold = p.at("existence_threshold").get<double>();
    t.prune.recycle = p.at("recycle").get<bool>();
    t.prune.max_undetected = p.at("max_undetected").get<std::size_t>();
    t.prune.mixture_threshold = p.at("mixture_threshold").get<double>();
    t.prune.max_mixture = p.at("max_mixture").get<std::size_t>();
    t.validate();
    return t;
}

MetricConfig parse_metrics(const Json& j) {
    MetricConfig m;
    const std::string type = j.at("type").get<std::string>();
    if (type == "trajectory") m.kind = MetricKind::trajectory;
    else if (type == "gospa") m.kind = MetricKind::gospa;
    else if (type == "none") m.kind = MetricKind::none;
    else throw std::invalid_argument("config: metrics.type must be trajectory, gospa or none");
    m.trajectory = TrajMetricParams{j.at("c").get<double>(), j.at("p").get<double>(), j.at("gamma").get<double>()};
    m.gospa = GospaParams{m.trajectory.c, m.trajectory.p};
    m.position_dims = j.at("position_dims").get<std::size_t>();
    m.normalize_by_time = j.at("normalize_by_time").get<bool>();
    m.trajectory.validate();
    return m;
}

}  // namespace

ExperimentConfig parse_config(const Json& config) {
    const Json j = merge_json(default_config_json(), config);
    try {
        ExperimentConfig out{parse_models(j.at("models")), parse_scenario(j.at("scenario")),
                             parse_tracker(j.at("tracker")), parse_metrics(j.at("metrics")),
                             OutputConfig{}, 1, 1, 0};
        out.runs = j.at("scenario").at("runs").get<std::size_t>();
        out.seed = j.at("scenario").at("seed").get<std::uint64_t>();
        out.threads = j.at("execution").at("threads").get<std::size_t>();
        out.output.dir = j.at("output").at("dir").get<std::string>();
        const std::string est = j.at("output").at("estimates").get<std::string>();
        if (est == "none") out.output.estimates = EstimateOutput::none;
        else if (est == "final") out.output.estimates = EstimateOutput::final_step;
        else if (est == "all") out.output.estimates = EstimateOutput::all_steps;
        else throw std::invalid_argument("config: output.estimates must be none, final or all");
        if (out.runs == 0) throw std::invalid_argument("config: scenario.runs must be at least 1");
        out.scenario.validate(out.models);
        return out;
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

bool estimates_consistent(const std::vector<TrajectoryEstimate>& estimates) {
    std::set<MeasurementRef> used;
    for (const auto& e : estimates) {
        for (const auto& r : e.history) {
            if (!used.insert(r).second) return false;
        }
    }
    return true;
}

namespace {

std::string estimate_line(std::size_t run, Time k, const TrajectoryEstimate& e) {
    Json states = Json::array();
    for (const auto& s : e.trajectory.states) {
        for (Eigen::Index i = 0; i < s.size(); ++i) states.push_back(s(i));
    }
    Json j{{"run", run},
           {"time", k},
           {"track", Json::array({e.track_origin.time, e.track_origin.meas})},
           {"birth_time", e.trajectory.birth_time},
           {"end_time", e.trajectory.end_time},
           {"existence", e.existence},
           {"states", states}};
    return j.dump();
}

StepMetric score_step(const ExperimentConfig& config, const std::vector<Trajectory>& truth,
                      const std::vector<TrajectoryEstimate>& estimates, Time k) {
    StepMetric s;
    s.time = k;
    const auto& mc = config.metrics;
    std::vector<Vector> truth_now, est_now;
    for (const auto& t : truth) {
        if (t.exists_at(k)) truth_now.push_back(t.state_at(k));
    }
    s.num_truth = truth_now.size();
    if (mc.kind == MetricKind::none) return s;
    if (mc.kind == MetricKind::gospa) {
        for (const auto& e : estimates) {
            if (e.trajectory.end_time == k) est_now.push_back(e.trajectory.states.back());
        }
        const auto g = gospa(truth_now, est_now, mc.gospa, mc.position_dims);
        s.total = g.total;
        s.location = g.location;
        s.missed = g.missed;
        s.false_ = g.false_;
        s.num_missed = g.num_missed;
        s.num_false = g.num_false;
        return s;
    }
    std::vector<Trajectory> truth_k, est_k;
    for (const auto& t : truth) {
        Trajectory r;
        if (restrict_to(t, k, r)) truth_k.push_back(std::move(r));
    }
    for (const auto& e : estimates) est_k.push_back(e.trajectory);
    const auto m = traj_metric(truth_k, est_k, mc.trajectory, 0, k, mc.position_dims);
    const double scale = mc.normalize_by_time ? 1.0 / static_cast<double>(k + 1) : 1.0;
    s.total = m.total * scale;
    s.location = m.location * scale;
    s.missed = m.missed * scale;
    s.false_ = m.false_ * scale;
    s.switch_ = m.switch_ * scale;
    return s;
}

}  // namespace

RunResult run_single(const ExperimentConfig& config, std::size_t run) {
    RunResult out;
    out.run = run;
    const auto sim = simulate(config.scenario, config.models, config.seed + run);
    out.num_truth_trajectories = sim.truth.size();
    Tracker tracker(config.models, config.tracker);
    for (Time k = 0; k < config.scenario.duration; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        tracker.step(sim.frames[k]);
        const auto t1 = std::chrono::steady_clock::now();
        out.step_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        const auto est = tracker.estimates();
        if (!estimates_consistent(est)) out.consistent = false;
        out.metrics.push_back(score_step(config, sim.truth, est, k));
        const bool write = config.output.estimates == EstimateOutput::all_steps ||
                           (config.output.estimates == EstimateOutput::final_step &&
                            k + 1 == config.scenario.duration);
        if (write) {
            for (const auto& e : est) out.estimate_lines.push_back(estimate_line(run, k, e));
        }
    }
    return out;
}

std::vector<RunResult> run_all(const ExperimentConfig& config) {
    std::vector<RunResult> results(config.runs);
    std::size_t threads = config.threads > 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, config.runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t r = next.fetch_add(1);
            if (r >= config.runs) return;
            try {
                results[r] = run_single(config, r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = config.runs;
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

Json summarize(const ExperimentConfig& config, const std::vector<RunResult>& results) {
    const std::size_t steps = config.scenario.duration;
    const double runs = static_cast<double>(results.size());
    Json per_step = Json::array();
    double sum_total = 0, sum_loc = 0, sum_miss = 0, sum_false = 0, sum_switch = 0;
    double truth_steps = 0, missed = 0, false_count = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        double t = 0, l = 0, mi = 0, f = 0, s = 0;
        for (const auto& r : results) {
            const auto& m = r.metrics[k];
            t += m.total;
            l += m.location;
            mi += m.missed;
            f += m.false_;
            s += m.switch_;
            truth_steps += static_cast<double>(m.num_truth);
            missed += static_cast<double>(m.num_missed);
            false_count += static_cast<double>(m.num_false);
        }
        per_step.push_back(Json{{"time", k}, {"total", t / runs}, {"location", l / runs},
                                {"missed", mi / runs}, {"false", f / runs}, {"switch", s / runs}});
        sum_total += t / runs;
        sum_loc += l / runs;
        sum_miss += mi / runs;
        sum_false += f / runs;
        sum_switch += s / runs;
    }
    std::vector<double> times;
    for (const auto& r : results) times.insert(times.end(), r.step_seconds.begin(), r.step_seconds.end());
    std::sort(times.begin(), times.end());
    auto pct = [&](double q) {
        if (times.empty()) return 0.0;
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(times.size() - 1) + 0.5);
        return times[std::min(idx, times.size() - 1)];
    };
    double total_time = 0.0;
    for (double t : times) total_time += t;
    bool consistent = true;
    double truth_count = 0.0;
    for (const auto& r : results) {
        consistent = consistent && r.consistent;
        truth_count += static_cast<double>(r.num_truth_trajectories);
    }
    Json j;
    j["tracker"] = variant_name(config.tracker.variant);
    j["runs"] = results.size();
    j["steps"] = steps;
    j["metric"] = config.metrics.kind == MetricKind::trajectory ? "trajectory"
                  : config.metrics.kind == MetricKind::gospa    ? "gospa"
                                                                : "none";
    j["summed_over_time"] = Json{{"metric", sum_total}, {"loc", sum_loc}, {"miss", sum_miss},
                                 {"false", sum_false}, {"switch", sum_switch}};
    j["per_step_mean"] = per_step;
    j["mean_truth_trajectories"] = truth_count / runs;
    if (config.metrics.kind == MetricKind::gospa) {
        j["gospa_rates"] = Json{{"truth_target_steps", truth_steps},
                                {"missed_fraction", truth_steps > 0 ? missed / truth_steps : 0.0},
                                {"false_fraction", truth_steps > 0 ? false_count / truth_steps : 0.0}};
    }
    j["consistent_estimates"] = consistent;
    j["timing_seconds_per_step"] = Json{{"mean", times.empty() ? 0.0 : total_time / static_cast<double>(times.size())},
                                        {"p50", pct(0.5)}, {"p90", pct(0.9)}, {"p99", pct(0.99)},
                                        {"max", times.empty() ? 0.0 : times.back()}, {"total", total_time}};
    return j;
}

void write_outputs(const ExperimentConfig& config, const std::vector<RunResult>& results) {
    namespace fs = std::filesystem;
    const fs::path dir(config.output.dir);
    fs::create_directories(dir);
    {
        std::ofstream est(dir / "estimates.jsonl");
        if (!est) throw std::runtime_error("cannot write " + (dir / "estimates.jsonl").string());
        for (const auto& r : results) {
            for (const auto& line : r.estimate_lines) est << line << '\n';
        }
    }
    {
        std::ofstream csv(dir / "metrics.csv");
        if (!csv) throw std::runtime_error("cannot write " + (dir / "metrics.csv").string());
        csv << "run,time,total,location,missed,false,switch\n";
        for (const auto& r : results) {
            for (const auto& m : r.metrics) {
                csv << r.run << ',' << m.time << ',' << format_number(m.total) << ','
                    << format_number(m.location) << ',' << format_number(m.missed) << ','
                    << format_number(m.false_) << ',' << format_number(m.switch_) << '\n';
            }
        }
    }
    std::ofstream summary(dir / "summary.json");
    if (!summary) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
    summary << summarize(config, results).dump(2) << '\n';
}

}  // namespace tpmbm

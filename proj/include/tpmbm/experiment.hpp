#pragma once

#include "tpmbm/metrics.hpp"
#include "tpmbm/serialization.hpp"
#include "tpmbm/simulator.hpp"
#include "tpmbm/tracker.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tpmbm {

enum class MetricKind { trajectory, gospa, none };

struct MetricConfig {
    MetricKind kind = MetricKind::trajectory;
    TrajMetricParams trajectory;
    GospaParams gospa;
    std::size_t position_dims = 2;   ///< compared coordinates of each state
    bool normalize_by_time = true;   ///< divide the step-k trajectory metric by k + 1
};

enum class EstimateOutput { none, final_step, all_steps };

struct OutputConfig {
    std::string dir = "out";
    EstimateOutput estimates = EstimateOutput::final_step;
};

struct ExperimentConfig {
    ModelSet models;
    ScenarioSpec scenario;
    TrackerConfig tracker;
    MetricConfig metrics;
    OutputConfig output;
    std::size_t runs = 1;
    std::uint64_t seed = 1;  ///< run r uses seed + r
    std::size_t threads = 0; ///< 0 = hardware concurrency
};

/// Configuration document with every default filled in.
Json default_config_json();

/// Recursive merge: objects merge key by key, anything else in `overlay` wins.
Json merge_json(const Json& base, const Json& overlay);

/// Sets a dotted path ("tracker.k_best") to a value parsed as JSON, or as a
/// plain string when it is not valid JSON.
void apply_override(Json& config, const std::string& dotted_path, const std::string& value);

/// Builds and validates an experiment from a (merged) configuration document.
ExperimentConfig parse_config(const Json& config);

/// Metric decomposition of one run at one time step.
struct StepMetric {
    Time time = 0;
    double total = 0.0;
    double location = 0.0;
    double missed = 0.0;
    double false_ = 0.0;
    double switch_ = 0.0;
    std::size_t num_truth = 0;
    std::size_t num_missed = 0;
    std::size_t num_false = 0;
};

struct RunResult {
    std::size_t run = 0;
    std::vector<StepMetric> metrics;
    std::vector<double> step_seconds;  ///< wall clock of each predict+update+prune step
    std::vector<std::string> estimate_lines;
    std::size_t num_truth_trajectories = 0;
    /// True if at every step no measurement is shared between the extracted
    /// trajectories, i.e. the estimates come from a single consistent hypothesis.
    bool consistent = true;
};

/// Simulates and tracks one Monte Carlo run.
RunResult run_single(const ExperimentConfig& config, std::size_t run);

/// Trajectory estimates sharing no measurement reference.
bool estimates_consistent(const std::vector<TrajectoryEstimate>& estimates);

/// Runs every Monte Carlo run on a worker pool, results in run order.
std::vector<RunResult> run_all(const ExperimentConfig& config);

/// Aggregate summary document (per-step means, time-summed table, timing).
Json summarize(const ExperimentConfig& config, const std::vector<RunResult>& results);

/// Fixed 9-significant-digit formatting used in CSV output.
std::string format_number(double v);

/// Writes estimates.jsonl, metrics.csv and summary.json into config.output.dir.
void write_outputs(const ExperimentConfig& config, const std::vector<RunResult>& results);

}  // namespace tpmbm

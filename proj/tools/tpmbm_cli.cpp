#include "tpmbm/experiment.hpp"

#include <CLI11.hpp>

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

tpmbm::Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return tpmbm::Json::parse(in);
    } catch (const tpmbm::Json::exception& e) {
        throw std::runtime_error("cannot parse '" + path + "': " + e.what());
    }
}

struct RunOptions {
    std::string config_path;
    std::string scenario_path;
    std::optional<std::string> tracker;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> threads;
    std::vector<std::string> overrides;
    bool validate_only = false;
    bool exact = false;
};

/// Later sources win: defaults, scenario file, config file, --set, explicit flags.
tpmbm::Json assemble_config(const RunOptions& o) {
    tpmbm::Json j = tpmbm::Json::object();
    if (!o.scenario_path.empty()) j = tpmbm::merge_json(j, load_json_file(o.scenario_path));
    if (!o.config_path.empty()) j = tpmbm::merge_json(j, load_json_file(o.config_path));
    for (const auto& s : o.overrides) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
        tpmbm::apply_override(j, s.substr(0, eq), s.substr(eq + 1));
    }
    if (o.tracker) j["tracker"]["variant"] = *o.tracker;
    if (o.runs) j["scenario"]["runs"] = *o.runs;
    if (o.seed) j["scenario"]["seed"] = *o.seed;
    if (o.out_dir) j["output"]["dir"] = *o.out_dir;
    if (o.threads) j["execution"]["threads"] = *o.threads;
    if (o.exact) {
        j["tracker"]["exact"] = true;
        j["tracker"]["gate_probability"] = 1.0;
        j["tracker"]["new_track_floor"] = 0.0;
    }
    return j;
}

int run_command(const RunOptions& o) {
    const auto config = tpmbm::parse_config(assemble_config(o));
    if (o.validate_only) {
        std::cout << "config OK\n";
        return 0;
    }
    const auto results = tpmbm::run_all(config);
    tpmbm::write_outputs(config, results);
    const auto summary = tpmbm::summarize(config, results);
    const auto& t = summary.at("summed_over_time");
    std::cout << "tracker " << summary.at("tracker").get<std::string>() << ", " << config.runs << " run(s), "
              << config.scenario.duration << " steps\n"
              << "Metric " << tpmbm::format_number(t.at("metric").get<double>()) << "  Loc "
              << tpmbm::format_number(t.at("loc").get<double>()) << "  Miss "
              << tpmbm::format_number(t.at("miss").get<double>()) << "  False "
              << tpmbm::format_number(t.at("false").get<double>()) << "  Switch "
              << tpmbm::format_number(t.at("switch").get<double>()) << '\n'
              << "mean seconds per step "
              << tpmbm::format_number(summary.at("timing_seconds_per_step").at("mean").get<double>()) << '\n'
              << "outputs written to " << config.output.dir << '\n';
    return 0;
}

int simulate_command(const RunOptions& o, std::size_t run) {
    const auto config = tpmbm::parse_config(assemble_config(o));
    const auto sim = tpmbm::simulate(config.scenario, config.models, config.seed + run);
    tpmbm::Json truth = tpmbm::Json::array();
    for (const auto& t : sim.truth) truth.push_back(tpmbm::trajectory_to_json(t));
    tpmbm::Json frames = tpmbm::Json::array();
    for (std::size_t k = 0; k < sim.frames.size(); ++k) {
        tpmbm::Json z = tpmbm::Json::array();
        for (const auto& m : sim.frames[k]) z.push_back(tpmbm::vector_to_json(m));
        frames.push_back(tpmbm::Json{{"time", k}, {"measurements", z}, {"origins", sim.origins[k]}});
    }
    std::cout << tpmbm::Json{{"truth", truth}, {"frames", frames}}.dump() << '\n';
    return 0;
}

void add_common_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--scenario", o.scenario_path, "JSON scenario file (any config sections)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", o.overrides, "override a dotted config path, e.g. tracker.k_best=5")
        ->take_all();
    cmd->add_option("--seed", o.seed, "base seed; run r uses seed + r");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trajectory PMBM tracking experiments"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "simulate, track and score Monte Carlo runs");
    add_common_options(run, run_opts);
    run->add_option("--tracker", run_opts.tracker, "tracker variant")
        ->check(CLI::IsMember({"current", "all", "filter"}));
    run->add_option("--runs", run_opts.runs, "number of Monte Carlo runs");
    run->add_option("--out-dir", run_opts.out_dir, "output directory");
    run->add_option("--threads", run_opts.threads, "worker threads (0 = hardware concurrency)");
    run->add_flag("--validate-only", run_opts.validate_only, "validate the configuration and exit");
    run->add_flag("--exact-mode", run_opts.exact, "disable gating, pruning floors and approximations");

    RunOptions sim_opts;
    std::size_t sim_run = 0;
    auto* sim = app.add_subcommand("simulate", "print one simulated run (truth and measurements) as JSON");
    add_common_options(sim, sim_opts);
    sim->add_option("--run", sim_run, "run index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        if (run->parsed()) return run_command(run_opts);
        return simulate_command(sim_opts, sim_run);
    } catch (const std::exception& e) {
        std::cerr << "tpmbm: error: " << e.what() << '\n';
        return 1;
    }
}

// gcn_sizer: command-line front end for sizing runs, normalizer calibration,
// checkpoint transfer and trace reports.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "sizer/agent/agent.hpp"
#include "sizer/agent/checkpoint.hpp"
#include "sizer/agent/runner.hpp"
#include "sizer/baselines/report.hpp"
#include "sizer/baselines/search.hpp"
#include "sizer/circuit/netlist.hpp"
#include "sizer/circuit/state.hpp"
#include "sizer/circuit/technology.hpp"
#include "sizer/fom/fom.hpp"
#include "sizer/nn/kernels.hpp"
#include "sizer/sim/analytical.hpp"
#include "sizer/sim/external.hpp"
#include "sizer/sim/synthetic.hpp"
#include "sizer/util/error.hpp"
#include "sizer/util/json_io.hpp"

namespace fs = std::filesystem;
using namespace sizer;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitBackend = 2;

struct RunOptions {
    std::string netlist;
    std::string tech;
    std::string fom;
    std::string algo = "gcn-rl";
    std::size_t steps = 10000;
    std::size_t warmup = 100;
    std::uint64_t seed = 0;
    std::string out = "run";
    std::string backend = "analytical";
    std::string adapter;
    std::string encoding = "onehot";
    std::string benchmark = "graph-quadratic";
    double coupling = 0.5;
    std::optional<std::uint64_t> target_seed;
    std::size_t hidden = 64;
    std::string checkpoint;
};

struct Problem {
    circuit::CircuitTopology topology;
    circuit::TechnologyNode tech;
    fom::FomConfig fom;
    std::unique_ptr<sim::SimulatorBackend> backend;
};

void add_problem_options(CLI::App& cmd, RunOptions& o) {
    cmd.add_option("--netlist", o.netlist, "Circuit netlist file")->required()->check(CLI::ExistingFile);
    cmd.add_option("--tech", o.tech, "Technology node JSON file")->required()->check(CLI::ExistingFile);
    cmd.add_option("--fom", o.fom, "FoM configuration JSON file")->required()->check(CLI::ExistingFile);
    cmd.add_option("--backend", o.backend, "Simulator backend")
        ->check(CLI::IsMember({"analytical", "synthetic", "external"}));
    cmd.add_option("--adapter", o.adapter, "External simulator adapter config (JSON)");
    cmd.add_option("--benchmark", o.benchmark, "Synthetic benchmark kind")
        ->check(CLI::IsMember({"graph-quadratic", "sphere"}));
    cmd.add_option("--coupling", o.coupling, "GraphQuadratic edge coupling");
    cmd.add_option("--target-seed", o.target_seed, "Seed of the synthetic target (defaults to --seed)");
    cmd.add_option("--seed", o.seed, "Base seed");
}

void add_run_options(CLI::App& cmd, RunOptions& o) {
    add_problem_options(cmd, o);
    cmd.add_option("--steps", o.steps, "Evaluation budget (episodes)");
    cmd.add_option("--warmup", o.warmup, "Warm-up episodes (RL algorithms)");
    cmd.add_option("--out", o.out, "Output directory");
    cmd.add_option("--encoding", o.encoding, "State encoding")->check(CLI::IsMember({"onehot", "scalar"}));
    cmd.add_option("--hidden", o.hidden, "Hidden width of actor and critic");
}

std::unique_ptr<sim::SimulatorBackend> make_backend(const RunOptions& o, const circuit::CircuitTopology& topology,
                                                    const circuit::TechnologyNode& tech) {
    if (o.backend == "analytical") {
        return std::make_unique<sim::AnalyticalAmpModel>();
    }
    if (o.backend == "synthetic") {
        const auto kind = sim::synthetic_kind_from_name(o.benchmark);
        auto bench = sim::make_benchmark(*kind, topology, tech, o.target_seed.value_or(o.seed), o.coupling);
        return std::make_unique<sim::SyntheticBackend>(std::move(bench));
    }
    if (o.adapter.empty()) {
        throw ConfigError("--backend external requires --adapter");
    }
    return std::make_unique<sim::ExternalBackend>(sim::load_adapter_config(o.adapter));
}

Problem load_problem(const RunOptions& o, bool require_normalizers) {
    Problem p;
    p.topology = circuit::load_netlist_document(o.netlist).topology;
    p.tech = circuit::load_technology(o.tech);
    p.fom = fom::load_fom_config(o.fom, false);
    if (require_normalizers) {
        for (const auto& m : p.fom.metrics) {
            if (!std::isfinite(m.m_min) || !std::isfinite(m.m_max)) {
                throw ConfigError("FoM config " + o.fom + " has no normalizer range for '" + m.name +
                                  "'; run `gcn_sizer calibrate` first");
            }
        }
        p.fom.validate();
    }
    p.backend = make_backend(o, p.topology, p.tech);
    for (const auto& m : p.fom.metrics) {
        const auto names = p.backend->metric_names();
        if (!names.empty() && std::find(names.begin(), names.end(), m.name) == names.end()) {
            throw ConfigError("backend '" + p.backend->name() + "' does not produce metric '" + m.name + "'");
        }
    }
    return p;
}

circuit::EncodingMode parse_encoding(const std::string& name) {
    const auto mode = circuit::encoding_from_name(name);
    if (!mode) {
        throw ConfigError("unknown encoding '" + name + "'");
    }
    return *mode;
}

Json options_json(const RunOptions& o, const std::string& command) {
    Json j;
    j["command"] = command;
    j["netlist"] = o.netlist;
    j["tech"] = o.tech;
    j["fom"] = o.fom;
    j["algo"] = o.algo;
    j["steps"] = o.steps;
    j["warmup"] = o.warmup;
    j["seed"] = o.seed;
    j["backend"] = o.backend;
    if (!o.adapter.empty()) {
        j["adapter"] = o.adapter;
    }
    if (o.backend == "synthetic") {
        j["benchmark"] = o.benchmark;
        j["coupling"] = o.coupling;
        j["target_seed"] = o.target_seed.value_or(o.seed);
    }
    j["encoding"] = o.encoding;
    j["hidden"] = o.hidden;
    if (!o.checkpoint.empty()) {
        j["checkpoint"] = o.checkpoint;
    }
    j["simd"] = nn::kernels::active().name;
    return j;
}

agent::AgentConfig agent_config(const RunOptions& o) {
    agent::AgentConfig c;
    c.episodes = o.steps;
    c.warmup = o.warmup;
    c.hidden = o.hidden;
    c.action_hidden = o.hidden;
    c.seed = o.seed;
    c.encoding = parse_encoding(o.encoding);
    c.skip_aggregation = o.algo == "ng-rl";
    return c;
}

agent::EpisodeCallback progress(std::size_t total) {
    return [total](const agent::EpisodeResult& ep, const baselines::TraceEntry& entry) {
        if (ep.episode % 100 == 0 || ep.episode == total) {
            spdlog::info("episode {}/{}: fom {:.6g}, best {:.6g}", ep.episode, total, ep.fom, entry.best_fom);
        }
    };
}

void write_results(const fs::path& out, const baselines::SearchResult& result, const Problem& p) {
    result.trace.write_csv(out / "trace.csv");
    Json best;
    best["fom"] = result.best_fom;
    best["design_hash"] = params::hash_hex(result.best_design.hash());
    best["design"] = params::design_to_json(result.best_design, p.topology);
    write_json_file(out / "best_design.json", best);
}

void finish_meta(const fs::path& out, Json meta, double seconds, const baselines::SearchResult& result) {
    meta["status"] = "completed";
    meta["wall_time_seconds"] = seconds;
    meta["evaluations"] = result.trace.size();
    meta["best_fom"] = result.best_fom;
    write_json_file(out / "run_meta.json", meta);
}

void validate_budget(const RunOptions& o, bool rl) {
    if (o.steps == 0) {
        throw ConfigError("--steps must be at least 1");
    }
    if (rl) {
        if (o.warmup == 0) {
            throw ConfigError("--warmup must be at least 1");
        }
        if (o.steps < o.warmup) {
            throw ConfigError("--steps (" + std::to_string(o.steps) + ") is smaller than --warmup (" +
                              std::to_string(o.warmup) + ")");
        }
    }
}

int cmd_size(const RunOptions& o) {
    if (o.algo == "bo" || o.algo == "mace") {
        std::cerr << "error: algorithm '" << o.algo << "' is not implemented\n";
        return kExitConfig;
    }
    const bool rl = o.algo == "gcn-rl" || o.algo == "ng-rl";
    validate_budget(o, rl);
    Problem p = load_problem(o, true);

    const fs::path out = o.out;
    fs::create_directories(out);
    Json meta = options_json(o, "size");
    meta["status"] = "running";
    write_json_file(out / "run_meta.json", meta);

    const auto start = std::chrono::steady_clock::now();
    baselines::SearchResult result;
    if (rl) {
        agent::AgentConfig cfg = agent_config(o);
        auto env = agent::Environment::make(p.topology, p.tech, *p.backend, p.fom, cfg.encoding);
        agent::Agent ag(cfg, env.state->cols());
        result = agent::run_agent(ag, env, progress(o.steps));
        agent::save_checkpoint(out / "checkpoint.bin", ag, p.topology);
    } else {
        baselines::Problem bp{&p.topology, &p.tech, p.backend.get(), &p.fom};
        auto log_step = [&](const baselines::TraceEntry& e) {
            if (e.step % 100 == 0 || e.step == o.steps) {
                spdlog::info("step {}/{}: fom {:.6g}, best {:.6g}", e.step, o.steps, e.fom, e.best_fom);
            }
        };
        result = o.algo == "es" ? baselines::es_optimize(bp, o.steps, o.seed, {}, log_step)
                                : baselines::random_search(bp, o.steps, o.seed, log_step);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_results(out, result, p);
    finish_meta(out, meta, seconds, result);
    std::cout << "best FoM " << result.best_fom << " after " << result.trace.size() << " evaluations ("
              << out.string() << ")\n";
    return 0;
}

int cmd_transfer(const RunOptions& o) {
    validate_budget(o, true);
    agent::Checkpoint ck = agent::load_checkpoint(o.checkpoint);
    RunOptions eff = o;
    eff.encoding = std::string(circuit::encoding_name(ck.info.encoding));
    eff.algo = ck.info.skip_aggregation ? "ng-rl" : "gcn-rl";
    eff.hidden = ck.info.dims.hidden;
    Problem p = load_problem(eff, true);
    agent::check_compatible(ck.info, p.topology, ck.info.encoding);

    const fs::path out = o.out;
    fs::create_directories(out);
    Json meta = options_json(eff, "transfer");
    meta["status"] = "running";
    write_json_file(out / "run_meta.json", meta);
    Json tmeta;
    tmeta["source_checkpoint"] = fs::absolute(o.checkpoint).string();
    tmeta["source_topology"] = ck.info.source_name;
    tmeta["source_components"] = ck.info.source_nodes;
    tmeta["target_topology"] = p.topology.name();
    tmeta["target_technology"] = p.tech.name();
    tmeta["encoding"] = eff.encoding;
    tmeta["algo"] = eff.algo;
    tmeta["steps"] = o.steps;
    tmeta["warmup"] = o.warmup;
    write_json_file(out / "transfer_meta.json", tmeta);

    const auto start = std::chrono::steady_clock::now();
    agent::AgentConfig cfg = agent_config(eff);
    auto env = agent::Environment::make(p.topology, p.tech, *p.backend, p.fom, ck.info.encoding);
    agent::Agent ag = agent::make_transfer_agent(std::move(ck), env, cfg);
    const auto result = agent::run_agent(ag, env, progress(o.steps));
    agent::save_checkpoint(out / "checkpoint.bin", ag, p.topology);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_results(out, result, p);
    finish_meta(out, meta, seconds, result);
    std::cout << "best FoM " << result.best_fom << " after " << result.trace.size() << " evaluations ("
              << out.string() << ")\n";
    return 0;
}

int cmd_calibrate(const RunOptions& o, std::size_t samples, const std::string& out_file) {
    if (samples == 0) {
        throw ConfigError("--samples must be at least 1");
    }
    Problem p = load_problem(o, false);
    const auto ranges = fom::calibrate_normalizers(*p.backend, p.topology, p.tech, samples, o.seed);
    const fom::FomConfig calibrated = fom::with_normalizers(p.fom, ranges);
    calibrated.validate();
    const fs::path target = out_file.empty() ? fs::path(o.fom) : fs::path(out_file);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    write_json_file(target, fom::fom_config_to_json(calibrated));
    for (const auto& [name, r] : ranges) {
        std::cout << name << ": [" << r.m_min << ", " << r.m_max << "]\n";
    }
    std::cout << "normalizers written to " << target.string() << '\n';
    return 0;
}

std::vector<std::string> run_names(const std::vector<std::string>& files) {
    std::vector<std::string> names;
    std::map<std::string, int> stems;
    for (const auto& f : files) {
        ++stems[fs::path(f).stem().string()];
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        const fs::path p(files[i]);
        std::string name = p.stem().string();
        if (stems[name] > 1 && p.has_parent_path()) {
            name = p.parent_path().filename().string() + "_" + name;
        }
        if (std::count(names.begin(), names.end(), name) > 0) {
            name += "_" + std::to_string(i + 1);
        }
        names.push_back(name);
    }
    return names;
}

int cmd_report(const std::vector<std::string>& files, const std::string& out_dir) {
    if (files.empty()) {
        throw ConfigError("report needs at least one trace file");
    }
    std::vector<baselines::SearchTrace> traces;
    for (const auto& f : files) {
        try {
            traces.push_back(baselines::SearchTrace::read_csv(f));
        } catch (const ParseError& e) {
            throw ConfigError(f + ": " + e.what());
        }
        if (traces.back().empty()) {
            throw ConfigError(f + ": trace has no entries");
        }
    }
    const auto names = run_names(files);
    const auto merged = baselines::merge_traces(traces, names);
    const fs::path out = out_dir;
    fs::create_directories(out);
    write_text_file(out / "report.csv", merged.to_csv());
    for (std::size_t i = 0; i < names.size(); ++i) {
        write_text_file(out / (names[i] + ".svg"),
                        baselines::render_svg({merged.curves[i]}, {names[i]}, "best-so-far FoM: " + names[i]));
    }
    auto all = merged.curves;
    auto labels = names;
    if (all.size() > 1) {
        all.push_back(merged.max_curve);
        labels.push_back("max");
    }
    write_text_file(out / "report.svg", baselines::render_svg(all, labels, "best-so-far FoM"));
    std::cout << "report for " << files.size() << " trace(s), " << merged.steps() << " steps, final max "
              << merged.max_curve.back() << " (" << out.string() << ")\n";
    return 0;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("gcn_sizer");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("GCN_SIZER_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off") {
            spdlog::warn("unknown GCN_SIZER_LOG level '{}', keeping info", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"GCN-RL transistor sizing"};
    app.require_subcommand(1);

    RunOptions size_opts;
    auto* size = app.add_subcommand("size", "Run one sizing experiment");
    add_run_options(*size, size_opts);
    size->add_option("--algo", size_opts.algo, "Optimizer")
        ->check(CLI::IsMember({"gcn-rl", "ng-rl", "es", "random", "bo", "mace"}));

    RunOptions cal_opts;
    std::size_t samples = 5000;
    std::string cal_out;
    auto* calibrate = app.add_subcommand("calibrate", "Calibrate FoM normalizers from random designs");
    add_problem_options(*calibrate, cal_opts);
    calibrate->add_option("--samples", samples, "Number of random designs");
    calibrate->add_option("--out", cal_out, "Output FoM config (default: overwrite --fom)");

    RunOptions tr_opts;
    tr_opts.steps = 300;
    tr_opts.warmup = 100;
    auto* transfer = app.add_subcommand("transfer", "Continue from a checkpoint on a new node or topology");
    add_run_options(*transfer, tr_opts);
    transfer->add_option("--checkpoint", tr_opts.checkpoint, "Source checkpoint")
        ->required()
        ->check(CLI::ExistingFile);

    std::vector<std::string> trace_files;
    std::string report_out = "report";
    auto* report = app.add_subcommand("report", "Merge traces into best-so-far curves");
    report->add_option("traces", trace_files, "Trace CSV files")->required();
    report->add_option("--out", report_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (size->parsed()) {
            return cmd_size(size_opts);
        }
        if (calibrate->parsed()) {
            return cmd_calibrate(cal_opts, samples, cal_out);
        }
        if (transfer->parsed()) {
            return cmd_transfer(tr_opts);
        }
        return cmd_report(trace_files, report_out);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DimensionError& e) {
        std::cerr << "dimension error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fom::CalibrationError& e) {
        std::cerr << "calibration error: " << e.what() << '\n';
        return kExitBackend;
    } catch (const EvaluationError& e) {
        std::cerr << "backend error: " << e.what() << '\n';
        return kExitBackend;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBackend;
    }
}

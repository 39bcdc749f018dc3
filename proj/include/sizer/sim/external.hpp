#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "sizer/sim/backend.hpp"
#include "sizer/util/json_io.hpp"

namespace sizer::sim {

/// How to call an external simulator. The command is run through /bin/sh
/// after substituting {netlist}, {design}, {out} and {workdir} with absolute
/// paths inside `workdir`.
struct AdapterConfig {
    std::string command;
    std::filesystem::path workdir = "sim_work";
    std::string netlist_file = "design.net";
    std::string design_file = "design.json";
    std::string metrics_file = "metrics.txt";
    double timeout_seconds = 60.0;
    /// Metrics that must appear in the metrics file (all of them are
    /// returned either way).
    std::vector<std::string> metrics;
};

AdapterConfig adapter_config_from_json(const Json& doc);
AdapterConfig load_adapter_config(const std::filesystem::path& path);

/// Parses `name value` lines; blank lines and `#` comments are skipped.
Metrics parse_metrics_text(const std::string& text);

/// Replaces every {key} in `templ`.
std::string substitute(std::string templ, const std::vector<std::pair<std::string, std::string>>& values);

/// Writes the exported netlist and the design document, runs the command and
/// reads the metrics file. Calls are serialized per backend instance (one
/// working directory).
class ExternalBackend final : public SimulatorBackend {
public:
    explicit ExternalBackend(AdapterConfig config);

    [[nodiscard]] std::string name() const override { return "external"; }
    [[nodiscard]] std::vector<std::string> metric_names() const override { return config_.metrics; }
    Metrics evaluate(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                     const params::DesignPoint& design) override;

private:
    AdapterConfig config_;
    std::mutex mutex_;
};

struct CommandResult {
    int exit_code = 0;
    bool timed_out = false;
};

/// Runs `/bin/sh -c command`, killing its process group after the timeout.
CommandResult run_command(const std::string& command, double timeout_seconds);

}  // namespace sizer::sim

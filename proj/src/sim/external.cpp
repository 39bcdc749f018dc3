#include "sizer/sim/external.hpp"

#include <chrono>
#include <csignal>
#include <sstream>
#include <thread>

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "sizer/sim/export.hpp"
#include "sizer/util/error.hpp"

extern char** environ;

namespace sizer::sim {

AdapterConfig adapter_config_from_json(const Json& doc) {
    AdapterConfig c;
    try {
        c.command = doc.at("command").get<std::string>();
        c.workdir = doc.value("workdir", c.workdir.string());
        c.netlist_file = doc.value("netlist_file", c.netlist_file);
        c.design_file = doc.value("design_file", c.design_file);
        c.metrics_file = doc.value("metrics_file", c.metrics_file);
        c.timeout_seconds = doc.value("timeout_seconds", c.timeout_seconds);
        if (doc.contains("metrics")) {
            c.metrics = doc.at("metrics").get<std::vector<std::string>>();
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("adapter config: ") + e.what());
    }
    if (c.command.empty()) {
        throw ConfigError("adapter config: empty command");
    }
    if (!(c.timeout_seconds > 0.0)) {
        throw ConfigError("adapter config: timeout must be positive");
    }
    return c;
}

AdapterConfig load_adapter_config(const std::filesystem::path& path) {
    AdapterConfig c = adapter_config_from_json(read_json_file(path));
    if (c.workdir.is_relative()) {
        c.workdir = path.parent_path() / c.workdir;
    }
    return c;
}

Metrics parse_metrics_text(const std::string& text) {
    Metrics m;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name)) {
            continue;
        }
        std::string value_text, extra;
        if (!(ls >> value_text) || (ls >> extra)) {
            throw EvaluationError("metrics file line " + std::to_string(line_no) + ": expected 'name value'");
        }
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(value_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value_text.size()) {
            throw EvaluationError("metrics file line " + std::to_string(line_no) + ": bad number '" +
                                  value_text + "'");
        }
        m[name] = value;
    }
    return m;
}

std::string substitute(std::string templ, const std::vector<std::pair<std::string, std::string>>& values) {
    for (const auto& [key, value] : values) {
        const std::string token = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = templ.find(token, pos)) != std::string::npos) {
            templ.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return templ;
}

CommandResult run_command(const std::string& command, double timeout_seconds) {
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);
    const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
    pid_t pid = 0;
    const int rc = posix_spawn(&pid, "/bin/sh", nullptr, &attr, const_cast<char* const*>(argv), environ);
    posix_spawnattr_destroy(&attr);
    if (rc != 0) {
        throw EvaluationError("could not start simulator command");
    }

    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    int status = 0;
    for (;;) {
        const pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid) {
            break;
        }
        if (done < 0) {
            throw EvaluationError("waitpid failed for simulator command");
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(-pid, SIGKILL);
            waitpid(pid, &status, 0);
            return {-1, true};
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (WIFEXITED(status)) {
        return {WEXITSTATUS(status), false};
    }
    return {128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0), false};
}

ExternalBackend::ExternalBackend(AdapterConfig config) : config_(std::move(config)) {}

Metrics ExternalBackend::evaluate(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                                  const params::DesignPoint& design) {
    std::lock_guard lock(mutex_);
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config_.workdir, ec);
    const fs::path dir = fs::absolute(config_.workdir);
    const fs::path netlist = dir / config_.netlist_file;
    const fs::path design_path = dir / config_.design_file;
    const fs::path out = dir / config_.metrics_file;
    try {
        write_text_file(netlist, export_netlist(topology, design, tech));
        write_json_file(design_path, params::design_to_json(design, topology));
    } catch (const ConfigError& e) {
        throw EvaluationError(e.what());
    }
    fs::remove(out, ec);

    const std::string cmd = substitute(config_.command, {{"netlist", netlist.string()},
                                                         {"design", design_path.string()},
                                                         {"out", out.string()},
                                                         {"workdir", dir.string()}});
    const CommandResult r = run_command(cmd, config_.timeout_seconds);
    if (r.timed_out) {
        throw EvaluationError("simulator command timed out after " + std::to_string(config_.timeout_seconds) + " s");
    }
    if (r.exit_code != 0) {
        throw EvaluationError("simulator command exited with status " + std::to_string(r.exit_code));
    }
    if (!fs::exists(out)) {
        throw EvaluationError("simulator did not write metrics file " + out.string());
    }
    std::string text;
    try {
        text = read_text_file(out);
    } catch (const ConfigError& e) {
        throw EvaluationError(e.what());
    }
    Metrics m = parse_metrics_text(text);
    for (const std::string& name : config_.metrics) {
        if (!m.contains(name)) {
            throw EvaluationError("metrics file lacks " + name);
        }
    }
    return m;
}

}  // namespace sizer::sim

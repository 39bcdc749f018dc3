#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sizer/agent/exploration.hpp"
#include "sizer/agent/networks.hpp"
#include "sizer/agent/replay.hpp"
#include "sizer/circuit/state.hpp"
#include "sizer/circuit/technology.hpp"
#include "sizer/circuit/topology.hpp"
#include "sizer/fom/fom.hpp"
#include "sizer/nn/adam.hpp"
#include "sizer/params/param_space.hpp"
#include "sizer/sim/backend.hpp"

namespace sizer::agent {

struct AgentConfig {
    std::size_t episodes = 10000;
    std::size_t warmup = 100;
    std::size_t batch_size = 64;
    std::size_t replay_capacity = 5000;
    std::size_t hidden = 64;
    std::size_t action_hidden = 64;
    std::size_t gcn_layers = 7;
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    double baseline_beta = 0.95;
    NoiseConfig noise;
    circuit::EncodingMode encoding = circuit::EncodingMode::OneHotIndex;
    /// Skip neighbour aggregation in every GCN layer (the NG-RL ablation).
    bool skip_aggregation = false;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Everything one episode needs besides the agent: the circuit, its encoded
/// state and graph, the backend and the FoM definition.
struct Environment {
    const circuit::CircuitTopology* topology = nullptr;
    const circuit::TechnologyNode* tech = nullptr;
    sim::SimulatorBackend* backend = nullptr;
    const fom::FomConfig* fom = nullptr;
    std::shared_ptr<const nn::Matrix> state;
    GraphContext graph;

    /// With `identity_adjacency` the graph's Â is replaced by I.
    static Environment make(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                            sim::SimulatorBackend& backend, const fom::FomConfig& fom,
                            circuit::EncodingMode mode, bool identity_adjacency = false);
};

struct EpisodeResult {
    std::size_t episode = 0;
    double fom = 0.0;
    params::DesignPoint design;
    bool warmup = false;
    bool sim_failed = false;
    std::optional<double> critic_loss;
};

/// DDPG-style sizing agent: random warm-up, then per episode one action from
/// the actor plus truncated-Gaussian noise, one critic step on a replay batch
/// against the baseline-corrected reward, and one actor step maximizing Q.
class Agent {
public:
    Agent(AgentConfig config, std::size_t state_dim);
    Agent(AgentConfig config, ActorNetwork actor, CriticNetwork critic);
    // The optimizers hold pointers into the networks.
    Agent(const Agent&) = delete;
    Agent& operator=(const Agent&) = delete;
    Agent(Agent&&) = delete;
    Agent& operator=(Agent&&) = delete;

    /// Deterministic actor output for `state`, plus noise when `explore`.
    params::ActionMatrix act(const nn::Matrix& state, const GraphContext& graph, bool explore);
    params::ActionMatrix warmup_sample(const circuit::CircuitTopology& topology);

    EpisodeResult train_episode(Environment& env);

    /// One critic update on a fixed batch against baseline `baseline`.
    /// Returns the loss before the update.
    double critic_step(const std::vector<const ReplayRecord*>& batch, const GraphContext& graph,
                       double baseline);
    /// One actor update maximizing the mean critic value over the batch states.
    double actor_step(const std::vector<const ReplayRecord*>& batch, const GraphContext& graph);
    /// Critic loss on a batch without updating anything.
    double critic_loss(const std::vector<const ReplayRecord*>& batch, const GraphContext& graph,
                       double baseline);

    /// Clears replay, baseline, noise schedule, optimizer state and episode
    /// count; network weights are kept.
    void reset_training_state();

    [[nodiscard]] const AgentConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::size_t episode() const noexcept { return episode_; }
    [[nodiscard]] ActorNetwork& actor() noexcept { return actor_; }
    [[nodiscard]] CriticNetwork& critic() noexcept { return critic_; }
    [[nodiscard]] const ReplayBuffer& replay() const noexcept { return replay_; }
    [[nodiscard]] const BaselineTracker& baseline() const noexcept { return baseline_; }
    [[nodiscard]] const NoiseProcess& noise() const noexcept { return noise_; }
    [[nodiscard]] bool aggregate() const noexcept { return !config_.skip_aggregation; }

private:
    void init_training_state();

    AgentConfig config_;
    ActorNetwork actor_;
    CriticNetwork critic_;
    std::unique_ptr<nn::ParamUpdater> actor_opt_;
    std::unique_ptr<nn::ParamUpdater> critic_opt_;
    ReplayBuffer replay_;
    BaselineTracker baseline_;
    NoiseProcess noise_;
    Rng warmup_rng_;
    Rng noise_rng_;
    Rng replay_rng_;
    std::size_t episode_ = 0;
};

}  // namespace sizer::agent

#include "sizer/agent/agent.hpp"

#include <algorithm>
#include <cmath>

#include "sizer/util/error.hpp"

namespace sizer::agent {

void AgentConfig::validate() const {
    if (warmup == 0) {
        throw ConfigError("warm-up must be at least one episode");
    }
    if (warmup > episodes) {
        throw ConfigError("warm-up (" + std::to_string(warmup) + ") exceeds the episode budget (" +
                          std::to_string(episodes) + ")");
    }
    if (batch_size == 0 || hidden == 0 || action_hidden == 0) {
        throw ConfigError("batch size and hidden widths must be positive");
    }
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
        throw ConfigError("learning rates must be positive");
    }
    noise.validate();
}

Environment Environment::make(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                              sim::SimulatorBackend& backend, const fom::FomConfig& fom,
                              circuit::EncodingMode mode, bool identity_adjacency) {
    Environment env;
    env.topology = &topology;
    env.tech = &tech;
    env.backend = &backend;
    env.fom = &fom;
    env.state = std::make_shared<const nn::Matrix>(circuit::encode_state(topology, tech, mode).values);
    env.graph = make_graph_context(topology, identity_adjacency);
    return env;
}

namespace {

NetworkDims dims_for(const AgentConfig& c, std::size_t state_dim) {
    return NetworkDims{state_dim, c.hidden, c.action_hidden, c.gcn_layers};
}

nn::Matrix stack_rows(const std::vector<const nn::Matrix*>& blocks) {
    std::size_t rows = 0;
    for (const auto* b : blocks) {
        rows += b->rows();
    }
    nn::Matrix out(rows, blocks.front()->cols());
    std::size_t r0 = 0;
    for (const auto* b : blocks) {
        std::copy(b->data(), b->data() + b->size(), out.data() + r0 * out.cols());
        r0 += b->rows();
    }
    return out;
}

void zero_grads(const std::vector<nn::Parameter*>& ps) {
    for (auto* p : ps) {
        p->zero_grad();
    }
}

}  // namespace

Agent::Agent(AgentConfig config, std::size_t state_dim)
    : config_(std::move(config)), replay_(config_.replay_capacity), baseline_(config_.baseline_beta),
      noise_(config_.noise) {
    config_.validate();
    Rng init(sub_seed(config_.seed, "agent-init"));
    actor_ = ActorNetwork(dims_for(config_, state_dim), init);
    critic_ = CriticNetwork(dims_for(config_, state_dim), init);
    init_training_state();
}

Agent::Agent(AgentConfig config, ActorNetwork actor, CriticNetwork critic)
    : config_(std::move(config)), actor_(std::move(actor)), critic_(std::move(critic)),
      replay_(config_.replay_capacity), baseline_(config_.baseline_beta), noise_(config_.noise) {
    config_.hidden = actor_.dims().hidden;
    config_.action_hidden = actor_.dims().action_hidden;
    config_.gcn_layers = actor_.dims().gcn_layers;
    config_.validate();
    init_training_state();
}

void Agent::init_training_state() {
    actor_opt_ = std::make_unique<nn::ParamUpdater>(actor_.parameters(),
                                                    nn::AdamConfig{.learning_rate = config_.actor_lr});
    critic_opt_ = std::make_unique<nn::ParamUpdater>(critic_.parameters(),
                                                     nn::AdamConfig{.learning_rate = config_.critic_lr});
    replay_.clear();
    baseline_.reset();
    noise_.reset();
    warmup_rng_.seed(sub_seed(config_.seed, "warmup"));
    noise_rng_.seed(sub_seed(config_.seed, "noise"));
    replay_rng_.seed(sub_seed(config_.seed, "replay"));
    episode_ = 0;
}

void Agent::reset_training_state() { init_training_state(); }

params::ActionMatrix Agent::act(const nn::Matrix& state, const GraphContext& graph, bool explore) {
    params::ActionMatrix a = actor_.act(state, graph, aggregate());
    if (explore) {
        for (std::size_t i = 0; i < graph.nodes(); ++i) {
            const std::size_t arity = circuit::action_arity(graph.kinds[i]);
            for (std::size_t c = 0; c < arity; ++c) {
                a(i, c) = std::clamp(a(i, c) + noise_.sample(noise_rng_), -1.0, 1.0);
            }
        }
    }
    return a;
}

params::ActionMatrix Agent::warmup_sample(const circuit::CircuitTopology& topology) {
    return params::random_action(topology, warmup_rng_);
}

EpisodeResult Agent::train_episode(Environment& env) {
    EpisodeResult r;
    r.episode = ++episode_;
    r.warmup = r.episode <= config_.warmup;

    params::ActionMatrix raw =
        r.warmup ? warmup_sample(*env.topology) : act(*env.state, env.graph, /*explore=*/true);
    r.design = params::action_to_design(raw, *env.topology, *env.tech);
    const auto eval = fom::evaluate_design(*env.backend, *env.topology, *env.tech, r.design, *env.fom);
    r.fom = eval.fom;
    r.sim_failed = eval.failed;

    replay_.push(ReplayRecord{env.state, std::move(raw), r.fom});

    const bool first_reward = !baseline_.initialized();
    if (first_reward) {
        baseline_.update(r.fom);
    }
    if (!r.warmup) {
        const auto batch = replay_.sample(config_.batch_size, replay_rng_);
        r.critic_loss = critic_step(batch, env.graph, baseline_.value());
        actor_step(batch, env.graph);
    }
    noise_.decay();
    if (!first_reward) {
        baseline_.update(r.fom);
    }
    return r;
}

double Agent::critic_loss(const std::vector<const ReplayRecord*>& batch, const GraphContext& graph,
                          double baseline) {
    std::vector<const nn::Matrix*> states;
    std::vector<const nn::Matrix*> actions;
    nn::Matrix target(batch.size(), 1);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        states.push_back(batch[i]->state.get());
        actions.push_back(&batch[i]->action);
        target(i, 0) = batch[i]->reward - baseline;
    }
    nn::Tape tape;
    nn::Var q = critic_.forward(tape, tape.constant(stack_rows(states)), tape.constant(stack_rows(actions)), graph,
                                aggregate(), false);
    return tape.value(tape.mse(q, target))(0, 0);
}

double Agent::critic_step(const std::vector<const ReplayRecord*>& batch, const GraphContext& graph,
                          double baseline) {
    if (batch.empty()) {
        throw std::logic_error("critic step on an empty batch");
    }
    std::vector<const nn::Matrix*> states;
    std::vector<const nn::Matrix*> actions;
    nn::Matrix target(batch.size(), 1);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        states.push_back(batch[i]->state.get());
        actions.push_back(&batch[i]->action);
        target(i, 0) = batch[i]->reward - baseline;
    }
    const auto params = critic_.parameters();
    zero_grads(params);
    nn::Tape tape;
    nn::Var q = critic_.forward(tape, tape.constant(stack_rows(states)), tape.constant(stack_rows(actions)), graph,
                                aggregate());
    nn::Var loss = tape.mse(q, target);
    const double value = tape.value(loss)(0, 0);
    if (!std::isfinite(value)) {
        throw NumericError("critic loss became non-finite at episode " + std::to_string(episode_));
    }
    tape.backward(loss);
    critic_opt_->step();
    return value;
}

double Agent::actor_step(const std::vector<const ReplayRecord*>& batch, const GraphContext& graph) {
    if (batch.empty()) {
        throw std::logic_error("actor step on an empty batch");
    }
    // When every record shares one state the mean over the batch equals the
    // value at that single state.
    std::vector<const nn::Matrix*> states;
    const bool shared = std::all_of(batch.begin(), batch.end(),
                                    [&](const ReplayRecord* r) { return r->state == batch.front()->state; });
    if (shared) {
        states.push_back(batch.front()->state.get());
    } else {
        for (const auto* r : batch) {
            states.push_back(r->state.get());
        }
    }
    const auto params = actor_.parameters();
    zero_grads(params);
    nn::Tape tape;
    nn::Var s = tape.constant(stack_rows(states));
    nn::Var a = actor_.forward(tape, s, graph, aggregate());
    nn::Var q = critic_.forward(tape, s, a, graph, aggregate(), /*trainable=*/false);
    nn::Var loss = tape.scale(tape.mean(q), -1.0);
    const double value = tape.value(loss)(0, 0);
    if (!std::isfinite(value)) {
        throw NumericError("actor objective became non-finite at episode " + std::to_string(episode_));
    }
    tape.backward(loss);
    actor_opt_->step();
    return value;
}

}  // namespace sizer::agent

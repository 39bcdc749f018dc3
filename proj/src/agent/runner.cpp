#include "sizer/agent/runner.hpp"

#include <spdlog/spdlog.h>

#include "sizer/util/error.hpp"

namespace sizer::agent {

baselines::SearchResult run_agent(Agent& agent, Environment& env, const EpisodeCallback& on_episode) {
    baselines::SearchResult result;
    while (agent.episode() < agent.config().episodes) {
        const EpisodeResult ep = agent.train_episode(env);
        result.observe(ep.design, ep.fom);
        const auto& entry = result.trace.entries().back();
        spdlog::debug("episode {} fom {:.6g} best {:.6g}{}", ep.episode, ep.fom, entry.best_fom,
                      ep.warmup ? " (warm-up)" : "");
        if (on_episode) {
            on_episode(ep, entry);
        }
    }
    return result;
}

Agent make_transfer_agent(Checkpoint checkpoint, const Environment& env, AgentConfig config) {
    config.encoding = checkpoint.info.encoding;
    config.skip_aggregation = checkpoint.info.skip_aggregation;
    check_compatible(checkpoint.info, *env.topology, config.encoding);
    if (env.state->cols() != checkpoint.info.dims.state_dim) {
        throw DimensionError("environment state width " + std::to_string(env.state->cols()) +
                             " does not match the checkpoint's " + std::to_string(checkpoint.info.dims.state_dim));
    }
    return Agent(config, std::move(checkpoint.actor), std::move(checkpoint.critic));
}

baselines::SearchResult transfer_run(Checkpoint checkpoint, Environment& env, AgentConfig config,
                                     const EpisodeCallback& on_episode) {
    Agent agent = make_transfer_agent(std::move(checkpoint), env, std::move(config));
    return run_agent(agent, env, on_episode);
}

}  // namespace sizer::agent

#include "sizer/baselines/search.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "sizer/params/param_space.hpp"
#include "sizer/util/error.hpp"

namespace sizer::baselines {

namespace {

struct Candidate {
    params::ActionMatrix raw;
    double fom = 0.0;
};

struct Tally {
    std::size_t failures = 0;
};

double evaluate(const Problem& p, const params::ActionMatrix& raw, SearchResult& result, Tally& tally,
                const StepCallback& on_step) {
    const params::DesignPoint design = params::action_to_design(raw, *p.topology, *p.tech);
    const auto eval = fom::evaluate_design(*p.backend, *p.topology, *p.tech, design, *p.fom);
    tally.failures += eval.failed ? 1 : 0;
    const double fom = eval.fom;
    result.observe(design, fom);
    if (on_step) {
        on_step(result.trace.entries().back());
    }
    return fom;
}

void check(const Problem& p) {
    if (!p.topology || !p.tech || !p.backend || !p.fom) {
        throw ConfigError("search problem is incomplete");
    }
}

void check_failures(const SearchResult& result, const Tally& tally) {
    if (!result.trace.empty() && tally.failures == result.trace.size()) {
        throw EvaluationError("all " + std::to_string(tally.failures) + " evaluations failed");
    }
}

}  // namespace

void EsConfig::validate() const {
    if (parents == 0 || offspring < parents) {
        throw ConfigError("evolution strategy needs 1 <= parents <= offspring");
    }
    if (!(sigma >= 0.0)) {
        throw ConfigError("mutation std must be non-negative");
    }
}

SearchResult random_search(const Problem& problem, std::size_t budget, std::uint64_t seed,
                           const StepCallback& on_step) {
    check(problem);
    if (budget == 0) {
        throw ConfigError("random search needs at least one step");
    }
    Rng rng(sub_seed(seed, "random-search"));
    SearchResult result;
    Tally tally;
    for (std::size_t i = 0; i < budget; ++i) {
        evaluate(problem, params::random_action(*problem.topology, rng), result, tally, on_step);
    }
    check_failures(result, tally);
    return result;
}

SearchResult es_optimize(const Problem& problem, std::size_t budget, std::uint64_t seed, EsConfig config,
                         const StepCallback& on_step) {
    check(problem);
    config.validate();
    if (budget < config.offspring) {
        throw ConfigError("evolution strategy budget " + std::to_string(budget) + " is below one generation (" +
                          std::to_string(config.offspring) + ")");
    }
    Rng rng(sub_seed(seed, "es"));
    SearchResult result;
    Tally tally;
    const auto& comps = problem.topology->components();

    std::vector<Candidate> population;
    for (std::size_t i = 0; i < config.offspring && result.trace.size() < budget; ++i) {
        Candidate c{params::random_action(*problem.topology, rng), 0.0};
        c.fom = evaluate(problem, c.raw, result, tally, on_step);
        population.push_back(std::move(c));
    }
    std::optional<Candidate> elite;

    while (result.trace.size() < budget) {
        for (const auto& c : population) {
            if (!elite || c.fom > elite->fom) {
                elite = c;
            }
        }
        std::stable_sort(population.begin(), population.end(),
                         [](const Candidate& a, const Candidate& b) { return a.fom > b.fom; });
        population.resize(std::min(config.parents, population.size()));
        if (config.elitism && elite->fom > population.front().fom) {
            population.back() = *elite;
        }

        std::vector<Candidate> children;
        for (std::size_t i = 0; i < config.offspring && result.trace.size() < budget; ++i) {
            const Candidate& parent = population[rng() % population.size()];
            Candidate child{parent.raw, 0.0};
            for (std::size_t k = 0; k < comps.size(); ++k) {
                for (std::size_t j = 0; j < circuit::action_arity(comps[k].kind); ++j) {
                    child.raw(k, j) = std::clamp(child.raw(k, j) + config.sigma * standard_normal(rng), -1.0, 1.0);
                }
            }
            child.fom = evaluate(problem, child.raw, result, tally, on_step);
            children.push_back(std::move(child));
        }
        population = std::move(children);
    }
    check_failures(result, tally);
    return result;
}

}  // namespace sizer::baselines

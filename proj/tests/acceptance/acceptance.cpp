// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Pass criterion numbers as arguments to run
// a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include <spdlog/spdlog.h>

#include "sizer/agent/checkpoint.hpp"
#include "sizer/agent/runner.hpp"
#include "sizer/baselines/search.hpp"
#include "sizer/fom/fom.hpp"
#include "sizer/nn/layers.hpp"
#include "sizer/sim/analytical.hpp"
#include "sizer/sim/export.hpp"
#include "sizer/sim/synthetic.hpp"
#include "sizer/util/error.hpp"
#include "support.hpp"

using namespace sizer;
using circuit::EncodingMode;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? " " : "") + fmt("%.4g", v[i]);
    }
    return s + "]";
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

nn::Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    nn::Matrix m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m.data()[i] = uniform(rng, -1, 1);
    }
    return m;
}

fom::FomConfig calibrated(const circuit::CircuitTopology& topo, const circuit::TechnologyNode& tech) {
    sim::AnalyticalAmpModel model;
    const auto base = fom::load_fom_config(testing::data_path("fom/amplifier.json"), false);
    return fom::with_normalizers(base, fom::calibrate_normalizers(model, topo, tech, 5000, 1));
}

// 1 ------------------------------------------------------------------------
Outcome gradients() {
    const auto tech = testing::tech_node("n180");
    Rng rng(101);
    testing::GradCheck total;
    double worst = 0.0;
    for (int g = 0; g < 6; ++g) {
        const auto topo = testing::random_topology(4 + g % 5, rng);
        const auto state = circuit::encode_state(topo, tech, EncodingMode::OneHotIndex).values;
        const auto graph = agent::make_graph_context(topo);
        agent::NetworkDims dims{state.cols(), 8, 6, 3};
        agent::ActorNetwork actor(dims, rng);
        agent::CriticNetwork critic(dims, rng);
        const auto weights = random_matrix(topo.size(), circuit::kMaxArity, rng);
        const auto action = params::random_action(topo, rng);
        const nn::Matrix target{{0.3}};

        auto actor_loss = [&](nn::Tape& t) {
            return t.weighted_sum(actor.forward(t, t.constant(state), graph, true), weights);
        };
        auto critic_loss = [&](nn::Tape& t) {
            return t.mse(critic.forward(t, t.constant(state), t.constant(action), graph, true), target);
        };
        for (auto [params, loss] : {std::pair{actor.parameters(), std::function<nn::Var(nn::Tape&)>(actor_loss)},
                                    std::pair{critic.parameters(), std::function<nn::Var(nn::Tape&)>(critic_loss)}}) {
            const auto gc = testing::check_gradients(
                params,
                [&] {
                    nn::Tape t;
                    return t.value(loss(t))(0, 0);
                },
                [&] {
                    nn::Tape t;
                    t.backward(loss(t));
                },
                1e-6, 1e-4);
            total.checked += gc.checked;
            total.passed += gc.passed;
            worst = std::max(worst, gc.worst);
        }
    }
    return {total.pass_rate() >= 0.999, std::to_string(total.passed) + "/" + std::to_string(total.checked) +
                                            " parameters within 1e-4 (" + fmt("%.4f%%", 100 * total.pass_rate()) +
                                            ", worst " + fmt("%.2g", worst) + ")"};
}

// 2 ------------------------------------------------------------------------
Outcome gcn_algebra() {
    Rng rng(202);
    double worst = 0.0;
    bool equivariant = true;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 15;
        nn::Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (uniform(rng, 0, 1) < 0.35) {
                    a(i, j) = a(j, i) = 1.0;
                }
            }
        }
        const auto hat = nn::normalize_adjacency(a);
        for (std::size_t i = 0; i < n; ++i) {
            double di = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                di += a(i, k);
            }
            for (std::size_t j = 0; j < n; ++j) {
                double dj = 1.0;
                for (std::size_t k = 0; k < n; ++k) {
                    dj += a(j, k);
                }
                const double expect = (i == j || a(i, j) != 0.0) ? 1.0 / std::sqrt(di * dj) : 0.0;
                worst = std::max(worst, std::abs(hat(i, j) - expect));
            }
        }
        const auto perm = random_permutation(n, rng);
        nn::Matrix pa(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                pa(i, j) = a(perm[i], perm[j]);
            }
        }
        const auto h = random_matrix(n, 5, rng);
        nn::Matrix ph(n, 5);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < 5; ++c) {
                ph(i, c) = h(perm[i], c);
            }
        }
        const auto w = random_matrix(5, 4, rng);
        const auto out = nn::gcn_forward(h, hat, w, nn::Activation::Relu);
        const auto pout = nn::gcn_forward(ph, nn::normalize_adjacency(pa), w, nn::Activation::Relu);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < 4; ++c) {
                equivariant = equivariant && pout(i, c) == out(perm[i], c);
            }
        }
    }
    return {worst <= 1e-12 && equivariant,
            "closed-form max error " + fmt("%.3g", worst) + ", permutation equivariance " +
                (equivariant ? "exact" : "broken") + " on 100 graphs"};
}

// 3 ------------------------------------------------------------------------
Outcome fom_engine() {
    fom::FomConfig one;
    one.metrics.push_back({"A", 1.0, 0, 10, {}});
    fom::FomConfig two = one;
    two.metrics.push_back({"B", -1.0, 0, 10, {}});
    bool examples = fom::compute_fom({{"A", 0.0}}, one) == 0.0 && fom::compute_fom({{"A", 10.0}}, one) == 1.0 &&
                    std::abs(fom::compute_fom({{"A", 8.0}, {"B", 3.0}}, two) - 0.5) <= 1e-15;
    auto spec = two;
    spec.specs.push_back({"B", fom::Relation::AtMost, 2.0});
    spec.violation_penalty = -1.0;
    examples = examples && fom::compute_fom({{"A", 8.0}, {"B", 3.0}}, spec) == -1.0;

    Rng rng(303);
    std::size_t violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const double a = uniform(rng, -5, 15), b = uniform(rng, -5, 15), d = uniform(rng, 0, 5);
        const double base = fom::compute_fom({{"A", a}, {"B", b}}, two);
        violations += fom::compute_fom({{"A", a + d}, {"B", b}}, two) < base;
        violations += fom::compute_fom({{"A", a}, {"B", b + d}}, two) > base;
    }
    return {examples && violations == 0, std::string("examples ") + (examples ? "exact" : "wrong") + ", " +
                                             std::to_string(violations) + " monotonicity violations in 10^4 perturbations"};
}

// 4 ------------------------------------------------------------------------
Outcome refinement() {
    const auto tech = testing::tech_node("n65");
    const auto topo = testing::fixture("three_tia");
    Rng rng(404);
    std::size_t bad = 0;
    for (int i = 0; i < 10000; ++i) {
        auto raw = params::random_action(topo, rng);
        const auto d = params::action_to_design(raw, topo, tech);
        bad += !params::is_legal(d, topo, tech);
        bad += !(params::refine(d, topo, tech) == d);
    }
    return {bad == 0, std::to_string(bad) + " failures of idempotence/grid/bounds/matching over 10^4 actions"};
}

// 5 ------------------------------------------------------------------------
Outcome mechanics() {
    const auto tech = testing::tech_node("n180");
    const auto topo = testing::fixture("two_tia");
    const auto fom = fom::load_fom_config(testing::data_path("fom/score.json"));
    sim::SyntheticBackend backend(sim::make_benchmark(sim::SyntheticKind::GraphQuadratic, topo, tech, 1));
    auto env = agent::Environment::make(topo, tech, backend, fom, EncodingMode::OneHotIndex);

    agent::AgentConfig cfg;
    cfg.warmup = 100;
    agent::Agent warm(cfg, env.state->cols());
    double sum = 0.0;
    std::size_t draws = 0;
    while (draws < 100000) {
        const auto a = warm.warmup_sample(topo);
        for (std::size_t r = 0; r < topo.size(); ++r) {
            for (std::size_t c = 0; c < circuit::action_arity(topo.component(r).kind); ++c) {
                sum += a(r, c);
                ++draws;
            }
        }
    }
    const double mean = sum / double(draws);

    agent::BaselineTracker b(0.95);
    b.update(1.0);
    const double b1 = b.value();
    b.update(0.0);
    const bool ema = std::abs(b1 - 1.0) <= 1e-12 && std::abs(b.value() - 0.95) <= 1e-12;

    int decreasing = 0;
    int monotone = 0;
    std::vector<double> ratios;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        cfg.seed = seed;
        agent::Agent ag(cfg, env.state->cols());
        Rng rng(seed);
        agent::ReplayBuffer buf(64);
        for (int i = 0; i < 64; ++i) {
            buf.push({env.state, params::random_action(topo, rng), uniform(rng, -1, 0)});
        }
        const auto batch = buf.sample(64, rng);
        std::vector<double> loss;
        for (int s = 0; s < 50; ++s) {
            loss.push_back(ag.critic_step(batch, env.graph, -0.5));
        }
        decreasing += loss.back() < loss.front();
        bool every_step = true;
        for (std::size_t s = 1; s < loss.size(); ++s) {
            every_step = every_step && loss[s] < loss[s - 1];
        }
        monotone += every_step;
        ratios.push_back(loss.back() / loss.front());
    }
    return {std::abs(mean) <= 0.01 && ema && decreasing >= 4,
            "warm-up mean " + fmt("%.5f", mean) + ", baseline " + (ema ? "1.0 -> 0.95" : "wrong") +
                ", critic loss[50] < loss[1] for " + std::to_string(decreasing) + "/5 seeds (loss[50]/loss[1] " +
                list(ratios) + ", every step lower for " + std::to_string(monotone) + "/5)"};
}

// 6 ------------------------------------------------------------------------
Outcome ordering() {
    const auto tech = testing::tech_node("n180");
    const auto topo = testing::fixture("graph_quadratic");
    const auto fom = fom::load_fom_config(testing::data_path("fom/score.json"));
    sim::SyntheticBackend backend(sim::make_benchmark(sim::SyntheticKind::GraphQuadratic, topo, tech, 7, 5.0));
    const baselines::Problem problem{&topo, &tech, &backend, &fom};
    const double s_bf = baselines::random_search(problem, 100000, 999).best_fom;

    std::vector<double> gcn, ng, rnd;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (bool skip : {false, true}) {
            agent::AgentConfig cfg;
            cfg.episodes = 3000;
            cfg.warmup = 100;
            cfg.seed = seed;
            cfg.skip_aggregation = skip;
            auto env = agent::Environment::make(topo, tech, backend, fom, cfg.encoding);
            agent::Agent ag(cfg, env.state->cols());
            (skip ? ng : gcn).push_back(agent::run_agent(ag, env).best_fom);
        }
        rnd.push_back(baselines::random_search(problem, 3000, seed).best_fom);
    }
    const double mg = median(gcn), mn = median(ng), mr = median(rnd);
    const bool order = mg >= mn && mn >= mr;
    const bool close = -mg <= 0.05 * -s_bf;
    return {order && close, "medians GCN-RL " + fmt("%.4g", mg) + " >= NG-RL " + fmt("%.4g", mn) + " >= random " +
                                fmt("%.4g", mr) + (order ? "" : " (violated)") + "; gap to optimum " +
                                fmt("%.3g", -mg) + " vs 5% of brute-force gap " + fmt("%.3g", -0.05 * s_bf) +
                                " (GCN-RL " + list(gcn) + ", NG-RL " + list(ng) + ")"};
}

// 7 ------------------------------------------------------------------------
Outcome ablation() {
    const auto tech = testing::tech_node("n180");
    const auto topo = testing::fixture("graph_quadratic");
    const auto fom = fom::load_fom_config(testing::data_path("fom/score.json"));
    sim::SyntheticBackend backend(sim::make_benchmark(sim::SyntheticKind::GraphQuadratic, topo, tech, 7));
    agent::AgentConfig cfg;
    cfg.episodes = 300;
    cfg.warmup = 50;
    cfg.seed = 4;
    auto env_id = agent::Environment::make(topo, tech, backend, fom, cfg.encoding, /*identity_adjacency=*/true);
    agent::Agent gcn(cfg, env_id.state->cols());
    const auto a = agent::run_agent(gcn, env_id).trace;
    cfg.skip_aggregation = true;
    auto env = agent::Environment::make(topo, tech, backend, fom, cfg.encoding);
    agent::Agent ng(cfg, env.state->cols());
    const auto b = agent::run_agent(ng, env).trace;
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
        same = a.entries()[i].fom == b.entries()[i].fom && a.entries()[i].design_hash == b.entries()[i].design_hash;
    }
    return {same, std::string("GCN-RL with identity adjacency vs NG-RL: ") + std::to_string(a.size()) +
                      " episodes " + (same ? "bit-identical" : "differ")};
}

/// Trains on `source`, then compares transfer and fresh runs on each target.
struct TransferCase {
    std::string label;
    const circuit::CircuitTopology* topology;
    const circuit::TechnologyNode* tech;
};

std::pair<double, double> transfer_medians(const fs::path& ckpt, const TransferCase& tc, EncodingMode mode) {
    sim::AnalyticalAmpModel model;
    const auto fom = calibrated(*tc.topology, *tc.tech);
    auto env = agent::Environment::make(*tc.topology, *tc.tech, model, fom, mode);
    std::vector<double> with, without;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        agent::AgentConfig cfg;
        cfg.episodes = 300;
        cfg.warmup = 100;
        cfg.seed = seed;
        cfg.encoding = mode;
        with.push_back(agent::transfer_run(agent::load_checkpoint(ckpt), env, cfg).best_fom);
        agent::Agent fresh(cfg, env.state->cols());
        without.push_back(agent::run_agent(fresh, env).best_fom);
    }
    return {median(with), median(without)};
}

fs::path train_source(const circuit::CircuitTopology& topo, const circuit::TechnologyNode& tech, EncodingMode mode,
                      const std::string& name) {
    sim::AnalyticalAmpModel model;
    const auto fom = calibrated(topo, tech);
    agent::AgentConfig cfg;
    cfg.episodes = 2000;
    cfg.warmup = 100;
    cfg.seed = 11;
    cfg.encoding = mode;
    auto env = agent::Environment::make(topo, tech, model, fom, mode);
    agent::Agent ag(cfg, env.state->cols());
    agent::run_agent(ag, env);
    const fs::path p = fs::temp_directory_path() / ("sizer_acceptance_" + name + "_" + std::to_string(::getpid()));
    agent::save_checkpoint(p, ag, topo);
    return p;
}

// 8 ------------------------------------------------------------------------
Outcome node_transfer() {
    const auto topo = testing::fixture("two_tia");
    const auto ckpt = train_source(topo, testing::tech_node("n180"), EncodingMode::OneHotIndex, "node");
    int wins = 0;
    std::string detail;
    for (const char* node : {"n45", "n65", "n130", "n250"}) {
        const auto tech = testing::tech_node(node);
        const auto [with, without] = transfer_medians(ckpt, {node, &topo, &tech}, EncodingMode::OneHotIndex);
        wins += with >= without;
        detail += std::string(detail.empty() ? "" : ", ") + node + " " + fmt("%.4g", with) + " vs " +
                  fmt("%.4g", without);
    }
    fs::remove(ckpt);
    return {wins >= 3, std::to_string(wins) + "/4 nodes with transfer >= fresh (" + detail + ")"};
}

// 9 ------------------------------------------------------------------------
Outcome topology_transfer() {
    const auto tech = testing::tech_node("n180");
    const auto two = testing::fixture("two_tia");
    const auto three = testing::fixture("three_tia");
    const auto ckpt = train_source(two, tech, EncodingMode::ScalarIndex, "topo");
    const auto [with, without] = transfer_medians(ckpt, {"three_tia", &three, &tech}, EncodingMode::ScalarIndex);
    fs::remove(ckpt);

    // A one-hot checkpoint of the two-stage circuit must refuse the three-stage one.
    sim::AnalyticalAmpModel model;
    const auto fom = calibrated(two, tech);
    auto env2 = agent::Environment::make(two, tech, model, fom, EncodingMode::OneHotIndex);
    agent::AgentConfig cfg;
    agent::Agent onehot(cfg, env2.state->cols());
    const fs::path p = fs::temp_directory_path() / ("sizer_acceptance_onehot_" + std::to_string(::getpid()));
    agent::save_checkpoint(p, onehot, two);
    auto env3 = agent::Environment::make(three, tech, model, fom, EncodingMode::OneHotIndex);
    bool refused = false;
    try {
        agent::make_transfer_agent(agent::load_checkpoint(p), env3, cfg);
    } catch (const DimensionError&) {
        refused = true;
    }
    fs::remove(p);
    return {with > without && refused, "ScalarIndex transfer median " + fmt("%.4g", with) + " vs fresh " +
                                           fmt("%.4g", without) + "; one-hot load " +
                                           (refused ? "refused with DimensionError" : "not refused")};
}

// 10 -----------------------------------------------------------------------
Outcome determinism() {
    const auto tech = testing::tech_node("n180");
    const auto topo = testing::fixture("two_tia");
    sim::AnalyticalAmpModel model;
    const auto fom = calibrated(topo, tech);
    const fs::path dir = fs::temp_directory_path() / ("sizer_acceptance_det_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    auto run = [&](const fs::path& csv, const fs::path& ckpt) {
        agent::AgentConfig cfg;
        cfg.episodes = 300;
        cfg.warmup = 100;
        cfg.seed = 77;
        auto env = agent::Environment::make(topo, tech, model, fom, cfg.encoding);
        agent::Agent ag(cfg, env.state->cols());
        agent::run_agent(ag, env).trace.write_csv(csv);
        agent::save_checkpoint(ckpt, ag, topo);
        return ag.act(*env.state, env.graph, false);
    };
    const auto act_a = run(dir / "a.csv", dir / "a.bin");
    run(dir / "b.csv", dir / "b.bin");
    const bool traces = read_text_file(dir / "a.csv") == read_text_file(dir / "b.csv");

    auto env = agent::Environment::make(topo, tech, model, fom, EncodingMode::OneHotIndex);
    agent::AgentConfig cfg;
    auto loaded = agent::make_transfer_agent(agent::load_checkpoint(dir / "a.bin"), env, cfg);
    const bool actions = loaded.act(*env.state, env.graph, false).bit_equal(act_a);

    Rng rng(1010);
    std::size_t exported = 0;
    for (int i = 0; i < 100; ++i) {
        const auto d = params::action_to_design(params::random_action(topo, rng), topo, tech);
        const auto doc = circuit::parse_netlist_document(sim::export_netlist(topo, d, tech));
        exported += sim::design_from_param_lines(doc) == d && doc.topology.edges() == topo.edges() &&
                    doc.topology.size() == topo.size();
    }
    fs::remove_all(dir);
    return {traces && actions && exported == 100,
            std::string("traces ") + (traces ? "byte-identical" : "differ") + ", checkpoint actions " +
                (actions ? "bit-identical" : "differ") + ", export round trip " + std::to_string(exported) + "/100"};
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_level(spdlog::level::err);
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"gradient correctness", gradients},
        {"GCN algebra", gcn_algebra},
        {"FoM engine", fom_engine},
        {"refinement", refinement},
        {"agent mechanics", mechanics},
        {"optimizer ordering", ordering},
        {"NG-RL ablation", ablation},
        {"technology-node transfer", node_transfer},
        {"topology transfer", topology_transfer},
        {"determinism and checkpointing", determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        wanted.insert(std::stoi(argv[i]));
    }
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i) + 1;
        if (!wanted.empty() && !wanted.contains(id)) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}

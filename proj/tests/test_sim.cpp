#include "catch_amalgamated.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "sizer/circuit/netlist.hpp"
#include "sizer/sim/analytical.hpp"
#include "sizer/sim/export.hpp"
#include "sizer/sim/external.hpp"
#include "sizer/sim/synthetic.hpp"
#include "sizer/util/error.hpp"
#include "support.hpp"

using namespace sizer;
using namespace sizer::sim;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

params::DesignPoint random_design(const circuit::CircuitTopology& t, const circuit::TechnologyNode& tech, Rng& rng) {
    return params::action_to_design(params::random_action(t, rng), t, tech);
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("sizer_sim_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("single transistor stage", "[sim][analytical]") {
    const auto topo = circuit::parse_netlist("M1 nmos in out\n.stage s driver=M1\n");
    const auto tech = testing::tech_node("n180");
    AnalyticalAmpModel model;
    const params::DesignPoint d{{{10e-6, 1e-6, 2}}};
    const double gm = 1e-3 * std::sqrt(20.0);
    REQUIRE(mos_gm(10e-6, 1e-6, 2, model.constants()) == Approx(gm).epsilon(1e-14));
    const auto m = model.evaluate(topo, tech, d);
    const double ro = 1e6 * 1e-6 / (10e-6 * 2);
    REQUIRE(m.at("Gain") == Approx(gm * ro).epsilon(1e-12));
    REQUIRE(m.at("BW") == Approx(1.0 / (2 * std::numbers::pi * ro * 1e-12)).epsilon(1e-12));
    REQUIRE(m.at("Power") == Approx(1.8 * 20e-6).epsilon(1e-12));
    REQUIRE(m.at("Noise") == Approx(1e-9 * std::sqrt(1.0 / gm)).epsilon(1e-12));
    REQUIRE(m.at("GBW") == Approx(m.at("Gain") * m.at("BW")).epsilon(1e-12));
}

TEST_CASE("doubling the load capacitance halves the bandwidth", "[sim][analytical]") {
    const auto topo = circuit::parse_netlist("M1 nmos in mid\nM2 pmos mid out\nR1 res out\n"
                                             ".stage a driver=M1\n.stage b driver=M2 load=R1\n");
    const auto tech = testing::tech_node("n65");
    AnalyticalConstants c;
    AnalyticalAmpModel base(c);
    c.c_load *= 2;
    AnalyticalAmpModel doubled(c);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto d = random_design(topo, tech, rng);
        const auto a = base.evaluate(topo, tech, d);
        const auto b = doubled.evaluate(topo, tech, d);
        REQUIRE(b.at("BW") == a.at("BW") / 2);
        REQUIRE(b.at("Gain") == a.at("Gain"));
    }
}

TEST_CASE("power increases with every width", "[sim][analytical][property]") {
    const auto topo = testing::fixture("two_tia");
    const auto tech = testing::tech_node("n180");
    AnalyticalAmpModel model;
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto d = random_design(topo, tech, rng);
        const double p = model.evaluate(topo, tech, d).at("Power");
        for (std::size_t k = 0; k < topo.size(); ++k) {
            if (d.values[k].size() != 3) {
                continue;
            }
            auto wider = d;
            wider.values[k][0] *= 1.01;
            REQUIRE(model.evaluate(topo, tech, wider).at("Power") > p);
        }
    }
}

TEST_CASE("analytical metrics are pure, finite and positive", "[sim][analytical][property]") {
    AnalyticalAmpModel model;
    Rng rng(3);
    for (const char* node : {"n250", "n45"}) {
        const auto tech = testing::tech_node(node);
        for (const char* net : {"two_tia", "three_tia"}) {
            const auto topo = testing::fixture(net);
            for (int i = 0; i < 300; ++i) {
                const auto d = random_design(topo, tech, rng);
                const auto a = model.evaluate(topo, tech, d);
                REQUIRE(a == model.evaluate(topo, tech, d));
                REQUIRE(a.size() == 5);
                for (const auto& [name, v] : a) {
                    REQUIRE(std::isfinite(v));
                    REQUIRE(v > 0);
                }
            }
        }
    }
}

TEST_CASE("analytical model configuration errors", "[sim][analytical]") {
    const auto tech = testing::tech_node("n180");
    AnalyticalAmpModel model;
    const auto no_stage = circuit::parse_netlist("M1 nmos a\n");
    REQUIRE_THROWS_AS(model.evaluate(no_stage, tech, {{{1e-6, 1e-6, 1}}}), ConfigError);
    const auto bad_driver = circuit::parse_netlist("R1 res a\n.stage s driver=R1\n");
    REQUIRE_THROWS_AS(model.evaluate(bad_driver, tech, {{{1e4}}}), ConfigError);
    AnalyticalConstants c;
    c.c_load = 0;
    REQUIRE_THROWS_AS(AnalyticalAmpModel(c), ConfigError);
}

TEST_CASE("synthetic benchmark", "[sim][synthetic]") {
    const auto topo = testing::fixture("graph_quadratic");
    const auto tech = testing::tech_node("n180");
    const auto gq = make_benchmark(SyntheticKind::GraphQuadratic, topo, tech, 7);
    REQUIRE(params::is_legal(gq.target, topo, tech));
    REQUIRE(synthetic_score(gq, topo, tech, gq.target) == 0.0);

    auto sphere = make_benchmark(SyntheticKind::Sphere, topo, tech, 7);
    auto zero = gq;
    zero.coupling = 0.0;
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        const auto d = random_design(topo, tech, rng);
        const double s = synthetic_score(gq, topo, tech, d);
        REQUIRE(s < 0.0);
        REQUIRE(synthetic_score(zero, topo, tech, d) == synthetic_score(sphere, topo, tech, d));

        // Independent evaluation of the formula.
        std::vector<std::vector<double>> diff(topo.size());
        double expect = 0.0;
        for (std::size_t k = 0; k < topo.size(); ++k) {
            const auto& specs = tech.param_specs(topo.component(k).kind);
            diff[k].assign(circuit::kMaxArity, 0.0);
            for (std::size_t p = 0; p < specs.size(); ++p) {
                diff[k][p] = params::normalized_coordinate(d.values[k][p], specs[p]) -
                             params::normalized_coordinate(gq.target.values[k][p], specs[p]);
                expect -= diff[k][p] * diff[k][p];
            }
        }
        for (const auto& [a, b] : topo.edges()) {
            for (std::size_t p = 0; p < circuit::kMaxArity; ++p) {
                const double e = diff[a][p] - diff[b][p];
                expect -= gq.coupling * e * e;
            }
        }
        REQUIRE(s == Approx(expect).epsilon(1e-12));
    }
    SyntheticBackend backend(gq);
    REQUIRE(backend.evaluate(topo, tech, gq.target).at("Score") == 0.0);
    REQUIRE(synthetic_kind_from_name("sphere") == SyntheticKind::Sphere);
    REQUIRE_FALSE(synthetic_kind_from_name("rosenbrock").has_value());
}

TEST_CASE("graph quadratic optimum is unique on a brute-force grid", "[sim][synthetic]") {
    auto doc = circuit::technology_to_json(testing::tech_node("n180"));
    doc["params"]["res"]["r"] = {{"lower", 1.0}, {"upper", 101.0}, {"precision", 1.0}, {"scale", "linear"}};
    const auto tech = circuit::technology_from_json(doc);
    const auto topo = circuit::parse_netlist("R1 res a b\nR2 res b c\n");
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto bench = make_benchmark(SyntheticKind::GraphQuadratic, topo, tech, seed, 0.5);
        double best = -1e300;
        std::size_t at_best = 0;
        params::DesignPoint arg;
        for (int i = 1; i <= 101; ++i) {
            for (int j = 1; j <= 101; ++j) {
                const params::DesignPoint d{{{double(i)}, {double(j)}}};
                const double s = synthetic_score(bench, topo, tech, d);
                if (s > best) {
                    best = s;
                    arg = d;
                    at_best = 1;
                } else if (s == best) {
                    ++at_best;
                }
            }
        }
        REQUIRE(at_best == 1);
        REQUIRE(arg == bench.target);
        REQUIRE(best == 0.0);
    }
}

TEST_CASE("engineering notation", "[sim][export]") {
    REQUIRE(engineering(2.2e-6) == "2.2e-6");
    REQUIRE(engineering(1.8e-7) == "180e-9");
    REQUIRE(engineering(15000.0) == "15e3");
    REQUIRE(engineering(3.0) == "3e0");
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::exp(uniform(rng, -35, 25));
        const std::string s = engineering(v);
        REQUIRE(std::stod(s) == v);
        const auto e = s.find('e');
        if (e != std::string::npos) {
            REQUIRE(std::stoi(s.substr(e + 1)) % 3 == 0);
        }
    }
}

TEST_CASE("export and parse back", "[sim][export][property]") {
    Rng rng(6);
    for (const char* node : {"n250", "n130", "n45"}) {
        const auto tech = testing::tech_node(node);
        for (const char* net : {"two_tia", "three_tia", "graph_quadratic"}) {
            const auto topo = testing::fixture(net);
            for (int i = 0; i < 100; ++i) {
                const auto d = random_design(topo, tech, rng);
                const std::string text = export_netlist(topo, d, tech);
                const auto doc = circuit::parse_netlist_document(text);
                REQUIRE(doc.topology.size() == topo.size());
                REQUIRE(doc.topology.edges() == topo.edges());
                REQUIRE(doc.topology.stages().size() == topo.stages().size());
                for (std::size_t k = 0; k < topo.size(); ++k) {
                    REQUIRE(doc.topology.component(k).name == topo.component(k).name);
                    REQUIRE(doc.topology.component(k).kind == topo.component(k).kind);
                    REQUIRE(doc.topology.component(k).matching_group == topo.component(k).matching_group);
                }
                REQUIRE(design_from_param_lines(doc) == d);
            }
        }
    }
    const auto tech = testing::tech_node("n180");
    const auto topo = testing::fixture("two_tia");
    const auto d = random_design(topo, tech, rng);
    const std::string text = export_netlist(topo, d, tech);
    REQUIRE(text.find("param M1 W=" + engineering(d.values[0][0])) != std::string::npos);
    // M1 and M2 share the dp group, so their param values print identically.
    const auto line_of = [&](const std::string& who) {
        const auto p = text.find("param " + who + " ");
        return text.substr(p + who.size() + 7, text.find('\n', p) - p - who.size() - 7);
    };
    REQUIRE(line_of("M1") == line_of("M2"));
}

TEST_CASE("metrics text parsing", "[sim][external]") {
    const auto m = parse_metrics_text("# header\nGain 12.5\n\nBW 1e6  # hz\n");
    REQUIRE(m.at("Gain") == 12.5);
    REQUIRE(m.at("BW") == 1e6);
    REQUIRE_THROWS_AS(parse_metrics_text("Gain\n"), EvaluationError);
    REQUIRE_THROWS_AS(parse_metrics_text("Gain 1 2\n"), EvaluationError);
    REQUIRE_THROWS_AS(parse_metrics_text("Gain 1x\n"), EvaluationError);
    REQUIRE(substitute("a {x} {x} {y}", {{"x", "1"}, {"y", "{x}"}}) == "a 1 1 {x}");
}

TEST_CASE("external adapter", "[sim][external]") {
    const auto tech = testing::tech_node("n180");
    const auto topo = testing::fixture("two_tia");
    Rng rng(7);
    const auto d = random_design(topo, tech, rng);
    const fs::path dir = scratch("ext");

    AdapterConfig cfg;
    cfg.workdir = dir;
    cfg.metrics = {"Gain", "BW"};

    SECTION("stub echoes fixed metrics") {
        cfg.command = "test -s {netlist} && test -s {design} && printf 'Gain 42\\nBW 1.5e6\\nExtra 3\\n' > {out}";
        ExternalBackend backend(cfg);
        const auto m = backend.evaluate(topo, tech, d);
        REQUIRE(m == Metrics{{"Gain", 42.0}, {"BW", 1.5e6}, {"Extra", 3.0}});
        const auto doc = circuit::load_netlist_document(dir / "design.net");
        REQUIRE(design_from_param_lines(doc) == d);
    }
    SECTION("missing metrics file") {
        cfg.command = "true";
        ExternalBackend backend(cfg);
        REQUIRE_THROWS_AS(backend.evaluate(topo, tech, d), EvaluationError);
    }
    SECTION("missing required metric") {
        cfg.command = "echo 'Gain 1' > {out}";
        ExternalBackend backend(cfg);
        REQUIRE_THROWS_AS(backend.evaluate(topo, tech, d), EvaluationError);
    }
    SECTION("nonzero exit") {
        cfg.command = "echo 'Gain 1' > {out}; echo 'BW 1' >> {out}; exit 3";
        ExternalBackend backend(cfg);
        REQUIRE_THROWS_WITH(backend.evaluate(topo, tech, d), Catch::Matchers::ContainsSubstring("status 3"));
    }
    SECTION("timeout") {
        cfg.command = "sleep 30";
        cfg.timeout_seconds = 1.0;
        ExternalBackend backend(cfg);
        const auto t0 = std::chrono::steady_clock::now();
        REQUIRE_THROWS_WITH(backend.evaluate(topo, tech, d), Catch::Matchers::ContainsSubstring("timed out"));
        REQUIRE(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
    }
    fs::remove_all(dir);
}

TEST_CASE("adapter config", "[sim][external]") {
    REQUIRE_THROWS_AS(adapter_config_from_json(Json::object()), ConfigError);
    REQUIRE_THROWS_AS(adapter_config_from_json(Json{{"command", "x"}, {"timeout_seconds", 0}}), ConfigError);
    const auto c = adapter_config_from_json(Json{{"command", "x"}, {"metrics", {"Gain"}}});
    REQUIRE(c.timeout_seconds == 60.0);
    REQUIRE(c.metrics == std::vector<std::string>{"Gain"});
}

TEST_CASE("counting backend", "[sim]") {
    const auto topo = testing::fixture("graph_quadratic");
    const auto tech = testing::tech_node("n180");
    SyntheticBackend inner(make_benchmark(SyntheticKind::Sphere, topo, tech, 1));
    CountingBackend counter(inner);
    Rng rng(8);
    for (int i = 0; i < 7; ++i) {
        counter.evaluate(topo, tech, random_design(topo, tech, rng));
    }
    REQUIRE(counter.calls() == 7);
    REQUIRE(counter.name() == "synthetic");
}

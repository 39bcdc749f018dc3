#include "catch_amalgamated.hpp"

#include <cmath>

#include "sizer/circuit/netlist.hpp"
#include "sizer/params/param_space.hpp"
#include "sizer/util/error.hpp"
#include "support.hpp"

using namespace sizer;
using namespace sizer::params;
using circuit::ComponentKind;
using Catch::Approx;

namespace {

ParamSpec spec(double lo, double hi, double prec, Scale scale) { return {"x", lo, hi, prec, scale}; }

/// n180 with a linear W grid of 0.5 µm anchored at 0, so µm values are easy to reason about.
circuit::TechnologyNode coarse_tech() {
    auto doc = circuit::technology_to_json(testing::tech_node("n180"));
    for (const char* k : {"nmos", "pmos"}) {
        doc["params"][k]["W"] = {{"lower", 0.0}, {"upper", 1e-5}, {"precision", 0.5e-6}, {"scale", "linear"}};
    }
    return circuit::technology_from_json(doc);
}

/// Written from the formulas directly, sharing no code with the library.
double oracle_denormalize(double raw, const ParamSpec& s) {
    const double t = (raw + 1.0) / 2.0;
    if (s.scale == Scale::Log) {
        return std::exp(std::log(s.lower) + t * (std::log(s.upper) - std::log(s.lower)));
    }
    return s.lower + t * (s.upper - s.lower);
}

double oracle_round(double v, const ParamSpec& s) {
    double k = std::round((v - s.lower) / s.precision);
    const double kmax = std::floor((s.upper - s.lower) / s.precision + 1e-9);
    k = std::clamp(k, 0.0, kmax);
    return s.lower + k * s.precision;
}

}  // namespace

TEST_CASE("denormalize examples", "[params]") {
    for (Scale sc : {Scale::Linear, Scale::Log}) {
        const auto s = spec(1e-7, 1e-3, 1e-9, sc);
        REQUIRE(denormalize(-1.0, s) == Approx(1e-7).epsilon(1e-12));
        REQUIRE(denormalize(1.0, s) == Approx(1e-3).epsilon(1e-12));
    }
    REQUIRE(denormalize(0.0, spec(1e-7, 1e-3, 1e-9, Scale::Log)) == Approx(1e-5).epsilon(1e-12));
    REQUIRE(denormalize(0.0, spec(0, 10, 1, Scale::Linear)) == 5.0);
    // Out-of-range raw values are clamped.
    REQUIRE(denormalize(3.0, spec(0, 10, 1, Scale::Linear)) == 10.0);
    REQUIRE(denormalize(-7.0, spec(0, 10, 1, Scale::Linear)) == 0.0);
}

TEST_CASE("denormalize is monotone in raw", "[params][property]") {
    Rng rng(2);
    for (Scale sc : {Scale::Linear, Scale::Log}) {
        const auto s = spec(1e-6, 1e-2, 1e-9, sc);
        for (int i = 0; i < 1000; ++i) {
            const double a = uniform(rng, -1, 1);
            const double b = uniform(rng, -1, 1);
            if (a < b) {
                REQUIRE(denormalize(a, s) <= denormalize(b, s));
            } else {
                REQUIRE(denormalize(a, s) >= denormalize(b, s));
            }
            REQUIRE(denormalize(a, s) == Approx(oracle_denormalize(a, s)).epsilon(1e-12));
        }
    }
}

TEST_CASE("grid snapping", "[params]") {
    const auto s = spec(0, 10, 0.5, Scale::Linear);
    REQUIRE(snap_to_grid(3.14, s) == 3.0);
    REQUIRE(snap_to_grid(3.3, s) == 3.5);
    REQUIRE(snap_to_grid(11.0, s) == 10.0);
    REQUIRE(snap_to_grid(-2.0, s) == 0.0);
    // Grid anchored at lower; upper off-grid keeps values on the grid.
    const auto odd = spec(1, 2.3, 0.5, Scale::Linear);
    REQUIRE(snap_to_grid(2.3, odd) == 2.0);
}

TEST_CASE("rounding error is at most half a step before clamping", "[params][property]") {
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double lo = uniform(rng, 0.1, 5);
        const auto s = spec(lo, lo + uniform(rng, 1, 50), uniform(rng, 0.01, 0.7), Scale::Linear);
        const double v = uniform(rng, s.lower, s.upper - s.precision);
        REQUIRE(std::abs(snap_to_grid(v, s) - v) <= s.precision / 2 + 1e-12);
    }
}

TEST_CASE("refine matches then rounds", "[params][refine]") {
    const auto tech = coarse_tech();
    const auto topo = circuit::parse_netlist("M1 nmos a b group=dp\nM2 nmos a c group=dp\n");
    DesignPoint d{{{2.0e-6, 1e-6, 2}, {3.0e-6, 1e-6, 2}}};
    const auto r = refine(d, topo, tech);
    REQUIRE(r.values[0][0] == Approx(2.0e-6).epsilon(1e-12));
    REQUIRE(r.values[1] == r.values[0]);

    // Oracle: representative, then grid, then clamp, applied independently.
    DesignPoint off{{{2.2e-6, 2.3e-6, 3.4}, {7.7e-6, 1e-6, 9}}};
    const auto got = refine(off, topo, tech);
    for (std::size_t p = 0; p < 3; ++p) {
        const auto& s = tech.param_spec(ComponentKind::Nmos, p);
        const double expect = oracle_round(off.values[0][p], s);
        REQUIRE(got.values[0][p] == Approx(expect).epsilon(1e-12));
        REQUIRE(got.values[1][p] == got.values[0][p]);
    }
}

TEST_CASE("refine is idempotent and lands in the design space", "[params][refine][property]") {
    const auto tech = testing::tech_node("n65");
    const auto topo = testing::fixture("three_tia");
    Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        ActionMatrix raw = random_action(topo, rng);
        if (i % 3 == 0) {
            raw(0, 0) = 1.7;  // out of range, gets clamped
        }
        const auto d = action_to_design(raw, topo, tech);
        REQUIRE(is_legal(d, topo, tech));
        REQUIRE(refine(d, topo, tech) == d);
    }
}

TEST_CASE("action_to_design examples", "[params]") {
    const auto tech = testing::tech_node("n180");
    const auto topo = testing::fixture("two_tia");
    ActionMatrix low(topo.size(), circuit::kMaxArity);
    for (std::size_t i = 0; i < topo.size(); ++i) {
        for (std::size_t a = 0; a < circuit::action_arity(topo.component(i).kind); ++a) {
            low(i, a) = -1.0;
        }
    }
    const auto d = action_to_design(low, topo, tech);
    for (std::size_t i = 0; i < topo.size(); ++i) {
        const auto& specs = tech.param_specs(topo.component(i).kind);
        REQUIRE(d.values[i].size() == specs.size());
        for (std::size_t p = 0; p < specs.size(); ++p) {
            REQUIRE(d.values[i][p] == Approx(specs[p].lower).epsilon(1e-12));
        }
    }

    // Composition oracle on random actions.
    Rng rng(6);
    for (int t = 0; t < 100; ++t) {
        const auto raw = random_action(topo, rng);
        DesignPoint manual;
        for (std::size_t i = 0; i < topo.size(); ++i) {
            std::vector<double> row;
            for (std::size_t p = 0; p < circuit::action_arity(topo.component(i).kind); ++p) {
                row.push_back(oracle_denormalize(raw(i, p), tech.param_spec(topo.component(i).kind, p)));
            }
            manual.values.push_back(row);
        }
        REQUIRE(action_to_design(raw, topo, tech) == refine(manual, topo, tech));
    }
}

TEST_CASE("matched pair with differing raw values", "[params]") {
    const auto tech = testing::tech_node("n180");
    const auto topo = circuit::parse_netlist("M1 nmos a group=g\nM2 nmos a group=g\n");
    ActionMatrix raw(2, circuit::kMaxArity);
    raw(0, 0) = -0.3;
    raw(1, 0) = 0.8;
    raw(1, 2) = 1.0;
    const auto d = action_to_design(raw, topo, tech);
    REQUIRE(d.values[0] == d.values[1]);
}

TEST_CASE("action shape must match the topology", "[params]") {
    const auto tech = testing::tech_node("n180");
    const auto topo = testing::fixture("two_tia");
    REQUIRE_THROWS_AS(action_to_design(ActionMatrix(3, circuit::kMaxArity), topo, tech), DimensionError);
}

TEST_CASE("design JSON round trip and hashing", "[params]") {
    const auto tech = testing::tech_node("n130");
    const auto topo = testing::fixture("two_tia");
    Rng rng(9);
    const auto d = action_to_design(random_action(topo, rng), topo, tech);
    const Json doc = design_to_json(d, topo);
    REQUIRE(doc.contains("M1"));
    REQUIRE(doc["RF"].contains("r"));
    REQUIRE(design_from_json(doc, topo) == d);
    REQUIRE(design_from_json(doc, topo).hash() == d.hash());
    auto other = d;
    other.values[0][0] *= 1.0000001;
    REQUIRE(other.hash() != d.hash());
    REQUIRE(hash_hex(0xabcULL) == "0000000000000abc");
    Json bad = doc;
    bad.erase("M1");
    REQUIRE_THROWS_AS(design_from_json(bad, topo), ConfigError);
}

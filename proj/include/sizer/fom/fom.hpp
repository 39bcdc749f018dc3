#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sizer/sim/backend.hpp"
#include "sizer/util/json_io.hpp"

namespace sizer::fom {

struct MetricSpec {
    std::string name;
    double weight = 1.0;
    double m_min = 0.0;
    double m_max = 1.0;
    std::optional<double> m_bound;
};

enum class Relation { AtLeast, AtMost };

struct HardSpec {
    std::string metric;
    Relation relation = Relation::AtLeast;
    double threshold = 0.0;

    [[nodiscard]] bool satisfied_by(double value) const {
        return relation == Relation::AtLeast ? value >= threshold : value <= threshold;
    }
};

struct FomConfig {
    std::vector<MetricSpec> metrics;
    std::vector<HardSpec> specs;
    double violation_penalty = -1.0;

    /// Names unique, m_max > m_min, bound ≥ m_min, penalty < 0, specs refer to
    /// known metrics. Throws ConfigError.
    void validate() const;
    [[nodiscard]] const MetricSpec* find(const std::string& name) const;
};

/// Σ w_i·(min(m_i, bound_i) − min_i)/(max_i − min_i) when every hard spec
/// holds, the violation penalty otherwise. Throws ConfigError on a missing
/// metric and NumericError on a non-finite one.
double compute_fom(const sim::Metrics& measured, const FomConfig& config);

struct Evaluation {
    double fom = 0.0;
    bool failed = false;
};

/// Simulates and scores one design. A failed simulation or a non-finite
/// metric scores the violation penalty (logged) instead of throwing; a
/// missing metric still throws ConfigError.
Evaluation evaluate_design(sim::SimulatorBackend& backend, const circuit::CircuitTopology& topology,
                           const circuit::TechnologyNode& tech, const params::DesignPoint& design,
                           const FomConfig& config);

struct NormalizerRange {
    double m_min = 0.0;
    double m_max = 0.0;
};

/// Raised when normalizers cannot be calibrated (degenerate range or too
/// many failed evaluations).
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Min and max of every metric over `sample_count` uniformly random refined
/// designs. Deterministic for a fixed seed.
std::map<std::string, NormalizerRange> calibrate_normalizers(sim::SimulatorBackend& backend,
                                                             const circuit::CircuitTopology& topology,
                                                             const circuit::TechnologyNode& tech,
                                                             std::size_t sample_count, std::uint64_t seed);

/// Copy of `config` with m_min/m_max replaced for every calibrated metric.
FomConfig with_normalizers(FomConfig config, const std::map<std::string, NormalizerRange>& ranges);

/// Parses a FoM config document. With `require_normalizers` false, metrics
/// may omit min/max (they are left NaN until calibrated).
FomConfig fom_config_from_json(const Json& doc, bool require_normalizers = true);
Json fom_config_to_json(const FomConfig& config);
FomConfig load_fom_config(const std::filesystem::path& path, bool require_normalizers = true);

}  // namespace sizer::fom

#pragma once

#include "sizer/sim/backend.hpp"

namespace sizer::sim {

struct AnalyticalConstants {
    double k_gm = 1e-3;     // A/V at (W/L)·M = 1
    double k_ro = 1e6;      // Ω at L/(W·M) = 1
    double v_dd = 1.8;      // V
    double c_load = 1e-12;  // F
    double k_noise = 1e-9;
};

/// Square-law surrogate of a multi-stage amplifier.
///
/// Per transistor: gm = k_gm·sqrt((W/L)·M), ro = k_ro·L/(W·M),
/// I = (W/L)·M·1µA. Per stage (from the netlist's `.stage` lines):
/// gm_s and ro_s are the driver means, R_s = ro_s ∥ (load resistors and
/// load-transistor ro), C_s = Σ load capacitors. Then
///
///     Gain  = Π gm_s·R_s
///     BW    = 1 / (2π·(R_last·(C_load + C_last) + Σ_{s<last} R_s·C_s))
///     Power = V_dd·Σ I_k
///     Noise = k_noise·sqrt(Σ 1/gm_k)
///     GBW   = Gain·BW
class AnalyticalAmpModel final : public SimulatorBackend {
public:
    explicit AnalyticalAmpModel(AnalyticalConstants constants = {});

    [[nodiscard]] std::string name() const override { return "analytical"; }
    [[nodiscard]] std::vector<std::string> metric_names() const override;
    Metrics evaluate(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                     const params::DesignPoint& design) override;

    [[nodiscard]] const AnalyticalConstants& constants() const noexcept { return constants_; }

    /// Formula set identifier, bumped whenever the equations above change.
    static constexpr int kFormulaVersion = 1;

private:
    AnalyticalConstants constants_;
};

/// Transconductance / output resistance / bias current of one transistor.
double mos_gm(double w, double l, double m, const AnalyticalConstants& c);
double mos_ro(double w, double l, double m, const AnalyticalConstants& c);
double mos_current(double w, double l, double m);

}  // namespace sizer::sim

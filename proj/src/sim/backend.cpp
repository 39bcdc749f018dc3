#include "sizer/sim/backend.hpp"

namespace sizer::sim {

Metrics CountingBackend::evaluate(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                                  const params::DesignPoint& design) {
    ++calls_;
    return inner_.evaluate(topology, tech, design);
}

}  // namespace sizer::sim

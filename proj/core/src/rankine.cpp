#include "circuflow/rankine.hpp"

#include <cmath>
#include <stdexcept>

namespace circuflow {

CyclePerformance evaluate_rankine(const RankineState& state) {
    const auto& [h1, h2, h3, h4] = state.enthalpy;
    for (double h : state.enthalpy) {
        if (!std::isfinite(h)) throw std::invalid_argument("enthalpies must be finite");
    }
    if (!(state.mass_flow > 0.0) || !std::isfinite(state.mass_flow)) {
        throw std::invalid_argument("mass flow must be positive");
    }
    if (h2 > h1) throw std::invalid_argument("turbine must not consume work (h2 > h1)");
    if (h3 > h4) throw std::invalid_argument("pump must not produce work (h3 > h4)");

    CyclePerformance perf;
    perf.w_turbine = h1 - h2;
    perf.w_pump = h4 - h3;
    perf.q_in = h1 - h4;
    perf.q_out = h2 - h3;
    if (!(perf.q_in > 0.0)) throw std::invalid_argument("boiler heat input must be positive (h1 > h4)");

    const double w_net = perf.w_turbine - perf.w_pump;
    perf.efficiency = w_net / perf.q_in;
    perf.net_power = state.mass_flow * w_net;
    perf.energy_residual = perf.q_in - perf.q_out - w_net;
    perf.compartment_mass_flow.fill(state.mass_flow);
    return perf;
}

}  // namespace circuflow

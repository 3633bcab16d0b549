#pragma once

#include <array>

namespace circuflow {

/// Steady-state Rankine cycle viewed as an 8-compartment loop: four components
/// (turbine, condenser, pump, boiler) joined by four pipes.
///
/// Stations: 1 turbine inlet, 2 turbine exit, 3 pump inlet, 4 pump exit.
/// Enthalpies are user supplied in kJ/kg; no property tables are consulted.
struct RankineState {
    double mass_flow = 1.0;  // kg/s
    std::array<double, 4> enthalpy{};  // h1..h4, kJ/kg
};

struct CyclePerformance {
    double w_turbine = 0.0;  // kJ/kg
    double w_pump = 0.0;
    double q_in = 0.0;
    double q_out = 0.0;
    double efficiency = 0.0;
    double net_power = 0.0;  // kW
    double energy_residual = 0.0;  // q_in - q_out - (w_turbine - w_pump)
    std::array<double, 8> compartment_mass_flow{};  // turbine, pipe, condenser, pipe, pump, pipe, boiler, pipe
};

/// Energy balances of each component with dE/dt = 0. Throws std::invalid_argument
/// when h2 > h1, h3 > h4, q_in <= 0, or the mass flow is not positive.
CyclePerformance evaluate_rankine(const RankineState& state);

}  // namespace circuflow

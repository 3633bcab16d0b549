#pragma once

#include <string>
#include <vector>

#include "circuflow/network.hpp"
#include "circuflow/simulator.hpp"

namespace circuflow {

/// Denominator guard for the circularity index, kg.
inline constexpr double kCircularityEpsilon = 1e-12;

/// Circularity of one simulated network. The scalar objective is the horizon
/// integral of the unsustainable rate, integrated with the simulator's quadrature.
struct CircularityReport {
    std::string network;
    std::vector<double> times;
    std::vector<double> unsustainable_rate;  // kg/s, stage-start samples
    std::vector<double> return_rate;         // kg/s
    double cumulative_unsustainable = 0.0;   // m_u, kg
    double cumulative_extraction = 0.0;      // designated flows leaving a source
    double cumulative_leak = 0.0;            // remaining designated flows
    double cumulative_return = 0.0;
    double circularity_index = 0.0;          // 1 - m_u / max(m_u + returned, eps)
    std::vector<std::string> warnings;
};

/// Sum of the instantaneous rates on the designated unsustainable connections.
/// Throws std::invalid_argument when the record does not cover every connection.
/// With no designated flows the result is 0 and a warning is appended (if given).
double unsustainable_rate(const std::vector<double>& flow_record, const Network& net,
                          std::vector<std::string>* warnings = nullptr);

double cumulative_unsustainable(const Trajectory& traj);

CircularityReport circularity(const Trajectory& traj);

/// Negative when `a` ranks first. Orders by cumulative m_u, then cumulative
/// leak, then cumulative extraction, then network name. Throws
/// std::invalid_argument when horizons or time steps differ.
int compare_objective(const Trajectory& a, const Trajectory& b);
int compare_objective(const CircularityReport& a, const CircularityReport& b);

}  // namespace circuflow

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circuflow/metrics.hpp"
#include "circuflow/network.hpp"
#include "circuflow/simulator.hpp"

namespace circuflow {

struct Variant {
    std::string name;
    Network network;
};

/// Candidate networks compared under one simulation configuration. All
/// variants must declare the same materials.
struct VariantSet {
    std::vector<Variant> variants;
};

struct Selection {
    std::string best;
    std::vector<std::string> ranking;        // best first
    std::vector<CircularityReport> reports;  // in variant order
};

/// Argmin of the cumulative unsustainable flow over the variants. Without an
/// explicit config every variant runs with the first variant's settings.
/// Throws ValidationError naming the first invalid variant.
Selection select_best(const VariantSet& variants, const std::optional<SimConfig>& config = std::nullopt);

struct ParamAxis {
    int k = 0;
    std::string param;
    std::vector<double> grid;
};

struct ParamSpace {
    std::vector<ParamAxis> axes;

    std::size_t grid_size() const;
};

struct OptimizeResult {
    std::vector<double> best_params;  // one value per axis
    double best_objective = 0.0;      // cumulative m_u, kg
    std::size_t evaluations = 0;
    bool exhaustive = false;
};

/// Exhaustive grid search when the grid fits in `budget` simulations,
/// coordinate descent from the grid point nearest the current parameters
/// otherwise. Ties go to the lexicographically smallest parameter tuple.
OptimizeResult optimize_params(const Network& net, const ParamSpace& space, std::size_t budget,
                               const std::optional<SimConfig>& config = std::nullopt);

/// Returns a copy of `net` with the parameter tuple applied.
Network apply_params(const Network& net, const ParamSpace& space, const std::vector<double>& values);

struct SensitivityResult {
    int k = 0;
    std::string param;
    double theta = 0.0;
    double delta = 0.0;
    double derivative = 0.0;  // d m_u / d theta, kg per parameter unit
    bool one_sided = false;
    std::string note;
    double m_u_plus = 0.0;
    double m_u_minus = 0.0;
    Ledger ledger_plus;
    Ledger ledger_minus;
    // Derivative uncertainty from time discretisation (difference between
    // dt and dt/2 runs) plus a round-off allowance, both divided by 2*delta.
    double noise_floor = 0.0;
};

/// Central finite difference of the cumulative unsustainable flow with respect
/// to one compartment parameter, switching to a one-sided difference (flagged)
/// when theta +/- delta leaves the parameter bounds.
SensitivityResult sensitivity(const Network& net, int k, const std::string& param, double rel_delta = 1e-3,
                              const std::optional<SimConfig>& config = std::nullopt);

}  // namespace circuflow

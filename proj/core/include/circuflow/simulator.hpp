#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "circuflow/network.hpp"

namespace circuflow {

/// Rates produced by one compartment during a vector-field evaluation.
struct CompartmentRates {
    double d_store = 0.0;
    std::array<double, 3> out{};  // indexed like output_ports()
    double converted = 0.0;       // mass changing material type (transformers)
};

/// Instrumentation hook applied to every compartment's rates after they are computed.
using RateHook = std::function<void(const Compartment&, CompartmentRates&)>;

struct SimConfig {
    double dt = 1.0;       // s
    double horizon = 1.0;  // s
    Method method = Method::Rk4;
    double guard_time = 0.0;  // drain limit for stores; 0 selects dt
    RateHook rate_hook;

    static SimConfig from(const Network& net);
};

/// Instantaneous vector field of the assembled network.
struct Derivative {
    std::vector<double> d_store;    // per compartment
    std::vector<double> rates;      // per connection, file order
    std::vector<double> converted;  // per compartment
};

struct StepResult {
    NetworkState state;
    std::vector<double> flows;  // connection rates at the start of the step
};

/// Cumulative mass accounting per material (ordered like Network::materials).
/// Identity: stored + sunk - initial_stored - extracted - converted - clamped = 0.
struct Ledger {
    std::vector<double> stored;     // mass inside non-source, non-sink compartments
    std::vector<double> extracted;  // delivered by sources
    std::vector<double> sunk;       // received by sinks
    std::vector<double> converted;  // net gain by material-type conversion
    std::vector<double> clamped;    // added when negative stores were reset to 0
};

struct SimEvent {
    double time = 0.0;
    std::string kind;  // "reserve_exhausted"
    std::string subject;
};

struct Trajectory {
    std::string network_name;
    std::vector<std::string> material_labels;
    std::vector<std::string> connection_ids;
    std::vector<std::size_t> unsustainable;  // connection indices
    std::vector<std::size_t> returns;
    std::vector<bool> from_source;  // per connection
    double dt = 0.0;
    double horizon = 0.0;
    Method method = Method::Rk4;
    std::vector<double> initial_stored;  // per material

    std::vector<double> times;
    std::vector<NetworkState> states;
    std::vector<std::vector<double>> flows;       // stage-start connection rates
    std::vector<std::vector<double>> cumulative;  // integrated connection flow, kg
    std::vector<Ledger> ledger;
    std::vector<SimEvent> events;
    double min_store_before_clamp = 0.0;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

/// Compiled network: resolved wiring plus a fixed evaluation order.
class Simulator {
public:
    /// Throws ValidationError when the network is not structurally valid.
    explicit Simulator(Network net);

    const Network& network() const { return net_; }

    Derivative evaluate(const NetworkState& state, double guard_time, const RateHook& hook = {}) const;

    /// One explicit step. All returned stores are >= 0.
    StepResult step(const NetworkState& state, double dt, Method method, double guard_time = 0.0) const;

    Trajectory run(const SimConfig& config) const;

private:
    struct Compiled;

    Network net_;
    std::shared_ptr<const Compiled> compiled_;
};

StepResult step(const Network& net, const NetworkState& state, double dt, Method method);
Trajectory simulate(const Network& net, const SimConfig& config);
Trajectory simulate(const Network& net);

struct ConservationReport {
    bool passed = true;
    std::size_t steps = 0;
    double tolerance_per_step = 0.0;
    std::vector<double> max_residual;           // per material, kg
    std::vector<double> max_relative_residual;  // per material
    std::optional<std::size_t> first_failure_step;
    std::string failing_material;
};

/// Checks the ledger identity at every recorded step. Residuals are taken
/// relative to the material's mass scale; the run passes iff the largest one is
/// <= tolerance_per_step * steps. first_failure_step is the first step above that bound.
ConservationReport check_conservation(const Trajectory& traj, double tolerance_per_step = 1e-14);

}  // namespace circuflow

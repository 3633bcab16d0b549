#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace circuflow {

struct MaterialType {
    int index = 0;      // q in [1, Q]
    std::string label;  // e.g. "synthetic-plastic"

    bool operator==(const MaterialType&) const = default;
};

/// c^k_{i,j}: k is the global compartment index, (i, j) the stages it joins.
/// Stage compartments are diagonal (i == j == k); transports carry i != j.
struct CompartmentId {
    int k = 0;
    int i = 0;
    int j = 0;

    auto operator<=>(const CompartmentId&) const = default;
};

std::string to_string(const CompartmentId& id);

enum class Kind { Source, Stock, Transport, Transformer, Sorter, Recycler, Sink };

std::string_view kind_name(Kind kind);
std::optional<Kind> parse_kind(std::string_view name);

struct SourceParams {
    std::string material;
    double reserve = 0.0;   // kg, initial extractable mass
    double max_rate = 0.0;  // kg/s
    double demand = 0.0;    // kg/s, nominal extraction demand
    // Extraction demand is reduced by the summed rate on these connections
    // (e.g. recovered material returning to the manufacturer).
    std::vector<std::string> makeup_connections;

    bool operator==(const SourceParams&) const = default;
};

struct StockParams {
    std::string material;
    double demand = 0.0;  // kg/s

    bool operator==(const StockParams&) const = default;
};

struct TransportParams {
    std::string material;
    double time_constant = 1.0;  // s
    double loss_fraction = 0.0;  // [0, 1)

    bool operator==(const TransportParams&) const = default;
};

/// Converts input_material into output_material. Recovered output_material
/// entering the `recycled` port bypasses conversion and takes priority on capacity.
struct TransformerParams {
    std::string input_material;
    std::string output_material;
    double yield = 1.0;          // (0, 1]
    double rate_capacity = 0.0;  // kg/s, total production capacity

    bool operator==(const TransformerParams&) const = default;
};

struct SorterParams {
    std::string material;
    double success_rate = 1.0;  // s in [0, 1]
    double throughput = 0.0;    // kg/s
    double item_mass = 0.0;     // kg/item, 0 when throughput is given directly
    double item_rate = 0.0;     // items/hour, 0 when throughput is given directly
    double alt_fraction = 0.0;  // share of accepted mass routed to `accept_alt`

    bool operator==(const SorterParams&) const = default;
};

struct RecyclerParams {
    std::string material;
    double yield = 1.0;            // rho in [0, 1]
    double processing_time = 1.0;  // t_r, s

    bool operator==(const RecyclerParams&) const = default;
};

struct SinkParams {
    std::string material;

    bool operator==(const SinkParams&) const = default;
};

// Alternative order matches Kind.
using CompartmentParams = std::variant<SourceParams, StockParams, TransportParams, TransformerParams,
                                       SorterParams, RecyclerParams, SinkParams>;

struct Compartment {
    CompartmentId id;
    std::string label;
    CompartmentParams params;
    std::map<std::string, double> initial_mass;  // material label -> kg

    Kind kind() const { return static_cast<Kind>(params.index()); }
    bool operator==(const Compartment&) const = default;
};

/// The single material a compartment stores.
const std::string& stored_material(const Compartment& c);

/// Initial store of a compartment (sources start at their reserve).
double initial_store(const Compartment& c);

enum class PortDirection { Input, Output };

struct Port {
    CompartmentId compartment;
    PortDirection direction = PortDirection::Input;
    std::string name;
    std::string material;
};

std::vector<Port> input_ports(const Compartment& c);
std::vector<Port> output_ports(const Compartment& c);

/// False when the parameters make the output structurally zero, so the port may stay unconnected.
bool output_may_carry_flow(const Compartment& c, std::string_view port);

struct PortRef {
    int k = 0;
    std::string port;

    bool operator==(const PortRef&) const = default;
};

struct Connection {
    std::string id;
    PortRef from;
    PortRef to;

    bool operator==(const Connection&) const = default;
};

enum class Method { Rk4, Euler };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

/// Simulation defaults carried by a network file, in SI seconds.
struct SimulationSettings {
    double dt = 1.0;
    double horizon = 1.0;
    Method method = Method::Rk4;

    bool operator==(const SimulationSettings&) const = default;
};

struct Network {
    std::string name;
    std::string description;
    std::vector<MaterialType> materials;
    std::vector<Compartment> compartments;
    std::vector<Connection> connections;
    std::vector<std::string> unsustainable;  // connection ids ("red" flows)
    std::vector<std::string> returns;        // connection ids ("green" flows)
    SimulationSettings simulation;

    const Compartment* find_compartment(int k) const;
    Compartment* find_compartment(int k);
    const Connection* find_connection(std::string_view id) const;
    std::optional<std::size_t> connection_index(std::string_view id) const;

    bool operator==(const Network&) const = default;
};

/// Stored mass per compartment, aligned with Network::compartments.
struct NetworkState {
    std::vector<double> store;

    bool operator==(const NetworkState&) const = default;
};

NetworkState initial_state(const Network& net);

/// Sum of stored mass over all compartments per material label.
/// Throws std::invalid_argument on a dimension mismatch.
std::map<std::string, double> total_mass(const Network& net, const NetworkState& state);

}  // namespace circuflow

#include "circuflow/network.hpp"

#include <array>
#include <stdexcept>

namespace circuflow {

namespace {

constexpr std::array<std::string_view, 7> kKindNames = {"source",      "stock",  "transport", "transformer",
                                                        "sorter",      "recycler", "sink"};

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Port make_port(const Compartment& c, PortDirection dir, std::string name, const std::string& material) {
    return Port{c.id, dir, std::move(name), material};
}

}  // namespace

std::string to_string(const CompartmentId& id) {
    return "c" + std::to_string(id.k) + "_{" + std::to_string(id.i) + "," + std::to_string(id.j) + "}";
}

std::string_view kind_name(Kind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

std::optional<Kind> parse_kind(std::string_view name) {
    for (std::size_t n = 0; n < kKindNames.size(); ++n) {
        if (kKindNames[n] == name) return static_cast<Kind>(n);
    }
    return std::nullopt;
}

std::string_view method_name(Method m) { return m == Method::Rk4 ? "rk4" : "euler"; }

std::optional<Method> parse_method(std::string_view name) {
    if (name == "rk4") return Method::Rk4;
    if (name == "euler") return Method::Euler;
    return std::nullopt;
}

const std::string& stored_material(const Compartment& c) {
    return std::visit(Overloaded{[](const TransformerParams& p) -> const std::string& { return p.input_material; },
                                 [](const auto& p) -> const std::string& { return p.material; }},
                      c.params);
}

double initial_store(const Compartment& c) {
    if (const auto* src = std::get_if<SourceParams>(&c.params)) return src->reserve;
    auto it = c.initial_mass.find(stored_material(c));
    return it == c.initial_mass.end() ? 0.0 : it->second;
}

std::vector<Port> input_ports(const Compartment& c) {
    using D = PortDirection;
    return std::visit(
        Overloaded{
            [&](const SourceParams&) { return std::vector<Port>{}; },
            [&](const TransformerParams& p) {
                return std::vector<Port>{make_port(c, D::Input, "in", p.input_material),
                                         make_port(c, D::Input, "recycled", p.output_material)};
            },
            [&](const auto& p) { return std::vector<Port>{make_port(c, D::Input, "in", p.material)}; },
        },
        c.params);
}

std::vector<Port> output_ports(const Compartment& c) {
    using D = PortDirection;
    return std::visit(
        Overloaded{
            [&](const SourceParams& p) { return std::vector<Port>{make_port(c, D::Output, "out", p.material)}; },
            [&](const StockParams& p) { return std::vector<Port>{make_port(c, D::Output, "out", p.material)}; },
            [&](const TransportParams& p) {
                return std::vector<Port>{make_port(c, D::Output, "out", p.material),
                                         make_port(c, D::Output, "loss", p.material)};
            },
            [&](const TransformerParams& p) {
                return std::vector<Port>{make_port(c, D::Output, "out", p.output_material),
                                         make_port(c, D::Output, "waste", p.input_material)};
            },
            [&](const SorterParams& p) {
                return std::vector<Port>{make_port(c, D::Output, "accept", p.material),
                                         make_port(c, D::Output, "accept_alt", p.material),
                                         make_port(c, D::Output, "reject", p.material)};
            },
            [&](const RecyclerParams& p) {
                return std::vector<Port>{make_port(c, D::Output, "return", p.material),
                                         make_port(c, D::Output, "leak", p.material)};
            },
            [&](const SinkParams&) { return std::vector<Port>{}; },
        },
        c.params);
}

bool output_may_carry_flow(const Compartment& c, std::string_view port) {
    return std::visit(Overloaded{
                          [&](const SourceParams&) { return true; },
                          [&](const StockParams&) { return true; },
                          [&](const TransportParams& p) { return port != "loss" || p.loss_fraction > 0.0; },
                          [&](const TransformerParams& p) { return port != "waste" || p.yield < 1.0; },
                          [&](const SorterParams& p) {
                              if (port == "reject") return p.success_rate < 1.0;
                              if (port == "accept_alt") return p.alt_fraction > 0.0 && p.success_rate > 0.0;
                              return p.alt_fraction < 1.0 && p.success_rate > 0.0;
                          },
                          [&](const RecyclerParams& p) {
                              return port == "leak" ? p.yield < 1.0 : p.yield > 0.0;
                          },
                          [&](const SinkParams&) { return false; },
                      },
                      c.params);
}

const Compartment* Network::find_compartment(int k) const {
    for (const auto& c : compartments) {
        if (c.id.k == k) return &c;
    }
    return nullptr;
}

Compartment* Network::find_compartment(int k) {
    for (auto& c : compartments) {
        if (c.id.k == k) return &c;
    }
    return nullptr;
}

const Connection* Network::find_connection(std::string_view id) const {
    for (const auto& conn : connections) {
        if (conn.id == id) return &conn;
    }
    return nullptr;
}

std::optional<std::size_t> Network::connection_index(std::string_view id) const {
    for (std::size_t n = 0; n < connections.size(); ++n) {
        if (connections[n].id == id) return n;
    }
    return std::nullopt;
}

NetworkState initial_state(const Network& net) {
    NetworkState state;
    state.store.reserve(net.compartments.size());
    for (const auto& c : net.compartments) state.store.push_back(initial_store(c));
    return state;
}

std::map<std::string, double> total_mass(const Network& net, const NetworkState& state) {
    if (state.store.size() != net.compartments.size()) {
        throw std::invalid_argument("state has " + std::to_string(state.store.size()) + " stores, network has " +
                                    std::to_string(net.compartments.size()) + " compartments");
    }
    std::map<std::string, double> totals;
    for (const auto& m : net.materials) totals[m.label] = 0.0;
    for (std::size_t n = 0; n < net.compartments.size(); ++n) {
        totals[stored_material(net.compartments[n])] += state.store[n];
    }
    return totals;
}

}  // namespace circuflow

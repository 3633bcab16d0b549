#pragma once

#include <filesystem>
#include <string>

#include "circuflow/network.hpp"
#include "circuflow/network_io.hpp"

namespace fx {

using namespace circuflow;

inline std::filesystem::path networks_dir() { return CIRCUFLOW_NETWORKS_DIR; }

inline Network load(const std::string& name) { return load_network(networks_dir() / (name + ".json")); }

inline const char* const kBundled[] = {"closed_loop",        "rankine",         "fig3b_synthetic_linear",
                                       "fig3c_synthetic_circular", "fig3d_bio_circular", "fig3e_bio_reuse",
                                       "fig3f_bio_repair"};

inline Compartment make(int k, int i, int j, CompartmentParams params, double m0 = 0.0) {
    Compartment c;
    c.id = {k, i, j};
    c.params = std::move(params);
    if (m0 != 0.0) c.initial_mass[stored_material(c)] = m0;
    return c;
}

inline Compartment stage(int k, CompartmentParams params, double m0 = 0.0) { return make(k, k, k, std::move(params), m0); }

inline Connection link(const std::string& id, int fk, const std::string& fport, int tk, const std::string& tport) {
    return {id, {fk, fport}, {tk, tport}};
}

inline Network with_water(const std::string& name) {
    Network net;
    net.name = name;
    net.materials = {{1, "water"}};
    return net;
}

/// store A -> pipe -> store B -> store A
inline Network closed_loop(double dt, double horizon) {
    Network net = with_water("loop");
    net.compartments = {stage(1, StockParams{"water", 2.0}, 5.0), stage(2, StockParams{"water", 1.0}, 3.0),
                        make(3, 1, 2, TransportParams{"water", 1.5, 0.0}, 2.0)};
    net.connections = {link("e1", 1, "out", 3, "in"), link("e2", 3, "out", 2, "in"), link("e3", 2, "out", 1, "in")};
    net.simulation = {dt, horizon, Method::Rk4};
    return net;
}

/// source (constant rate `in`) -> stock (demand `out`) -> sink
inline Network fed_stock(double in, double out, double dt, double horizon) {
    Network net = with_water("fed_stock");
    net.compartments = {stage(1, SourceParams{"water", 1e9, in, in, {}}), stage(2, StockParams{"water", out}),
                        stage(3, SinkParams{"water"})};
    net.connections = {link("extract", 1, "out", 2, "in"), link("use", 2, "out", 3, "in")};
    net.unsustainable = {"extract"};
    net.simulation = {dt, horizon, Method::Rk4};
    return net;
}

/// idle stock -> transport (m0, T, no inflow) -> sink
inline Network draining_transport(double m0, double T, double dt, double horizon, Method method = Method::Rk4) {
    Network net = with_water("lag");
    net.compartments = {stage(1, StockParams{"water", 0.0}), stage(2, SinkParams{"water"}),
                        make(3, 1, 2, TransportParams{"water", T, 0.0}, m0)};
    net.connections = {link("feed", 1, "out", 3, "in"), link("drain", 3, "out", 2, "in")};
    net.simulation = {dt, horizon, method};
    return net;
}

}  // namespace fx

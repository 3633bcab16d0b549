#pragma once

#include <cstddef>
#include <vector>

#include "circuflow/network.hpp"

namespace circuflow::detail {

inline constexpr std::size_t kUnconnected = static_cast<std::size_t>(-1);

/// Index-resolved connectivity. Connections whose endpoints cannot be resolved are skipped.
struct Wiring {
    std::vector<std::vector<std::size_t>> out_conn;               // [compartment][output port]
    std::vector<std::vector<std::vector<std::size_t>>> in_conns;  // [compartment][input port]
    std::vector<std::size_t> conn_from;                           // connection -> compartment
    std::vector<std::size_t> conn_to;
    std::vector<std::vector<std::size_t>> makeup;  // source compartment -> connection indices
    std::vector<bool> feedthrough;                 // outputs depend on current inflows
    std::vector<std::size_t> order;                // evaluation order of output rates
    std::vector<std::size_t> cyclic;               // compartments left in an algebraic loop
};

Wiring build_wiring(const Network& net);

}  // namespace circuflow::detail

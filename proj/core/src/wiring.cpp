#include "wiring.hpp"

#include <map>
#include <queue>

namespace circuflow::detail {

namespace {

std::size_t port_index(const std::vector<Port>& ports, const std::string& name) {
    for (std::size_t n = 0; n < ports.size(); ++n) {
        if (ports[n].name == name) return n;
    }
    return kUnconnected;
}

}  // namespace

Wiring build_wiring(const Network& net) {
    const std::size_t nc = net.compartments.size();
    Wiring w;
    w.out_conn.resize(nc);
    w.in_conns.resize(nc);
    w.makeup.resize(nc);
    w.feedthrough.assign(nc, false);
    w.conn_from.assign(net.connections.size(), kUnconnected);
    w.conn_to.assign(net.connections.size(), kUnconnected);

    std::map<int, std::size_t> by_k;
    std::vector<std::vector<Port>> outs(nc), ins(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& comp = net.compartments[c];
        by_k.emplace(comp.id.k, c);
        outs[c] = output_ports(comp);
        ins[c] = input_ports(comp);
        w.out_conn[c].assign(outs[c].size(), kUnconnected);
        w.in_conns[c].resize(ins[c].size());
        const Kind kind = comp.kind();
        w.feedthrough[c] = kind == Kind::Stock || kind == Kind::Transformer || kind == Kind::Sorter;
    }

    for (std::size_t n = 0; n < net.connections.size(); ++n) {
        const auto& conn = net.connections[n];
        auto from = by_k.find(conn.from.k);
        auto to = by_k.find(conn.to.k);
        if (from == by_k.end() || to == by_k.end()) continue;
        const std::size_t op = port_index(outs[from->second], conn.from.port);
        const std::size_t ip = port_index(ins[to->second], conn.to.port);
        if (op == kUnconnected || ip == kUnconnected) continue;
        if (w.out_conn[from->second][op] == kUnconnected) w.out_conn[from->second][op] = n;
        w.in_conns[to->second][ip].push_back(n);
        w.conn_from[n] = from->second;
        w.conn_to[n] = to->second;
    }

    for (std::size_t c = 0; c < nc; ++c) {
        if (const auto* src = std::get_if<SourceParams>(&net.compartments[c].params)) {
            for (const auto& id : src->makeup_connections) {
                if (auto idx = net.connection_index(id); idx && w.conn_from[*idx] != kUnconnected) {
                    w.makeup[c].push_back(*idx);
                }
            }
            w.feedthrough[c] = !w.makeup[c].empty();
        }
    }

    // Kahn's algorithm over "output of u is needed before outputs of v" edges,
    // which exist only when v is feedthrough. Ties resolve by file order.
    std::vector<std::vector<std::size_t>> succ(nc);
    std::vector<std::size_t> indegree(nc, 0);
    auto add_edge = [&](std::size_t u, std::size_t v) {
        succ[u].push_back(v);
        ++indegree[v];
    };
    for (std::size_t v = 0; v < nc; ++v) {
        if (!w.feedthrough[v]) continue;
        for (const auto& port : w.in_conns[v]) {
            for (std::size_t n : port) add_edge(w.conn_from[n], v);
        }
        for (std::size_t n : w.makeup[v]) add_edge(w.conn_from[n], v);
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t c = 0; c < nc; ++c) {
        if (indegree[c] == 0) ready.push(c);
    }
    while (!ready.empty()) {
        const std::size_t u = ready.top();
        ready.pop();
        w.order.push_back(u);
        for (std::size_t v : succ[u]) {
            if (--indegree[v] == 0) ready.push(v);
        }
    }
    for (std::size_t c = 0; c < nc; ++c) {
        if (indegree[c] > 0) w.cyclic.push_back(c);
    }
    return w;
}

}  // namespace circuflow::detail

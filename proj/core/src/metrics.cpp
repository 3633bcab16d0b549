#include "circuflow/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace circuflow {

double unsustainable_rate(const std::vector<double>& flow_record, const Network& net,
                          std::vector<std::string>* warnings) {
    if (flow_record.size() != net.connections.size()) {
        throw std::invalid_argument("flow record has " + std::to_string(flow_record.size()) + " rates for " +
                                    std::to_string(net.connections.size()) + " connections");
    }
    if (net.unsustainable.empty()) {
        if (warnings) warnings->push_back("network '" + net.name + "' designates no unsustainable flows");
        return 0.0;
    }
    double total = 0.0;
    for (const auto& id : net.unsustainable) {
        auto idx = net.connection_index(id);
        if (!idx) throw std::invalid_argument("designated connection '" + id + "' missing from the network");
        total += flow_record[*idx];
    }
    return total;
}

double cumulative_unsustainable(const Trajectory& traj) {
    if (traj.cumulative.empty()) return 0.0;
    const auto& last = traj.cumulative.back();
    double total = 0.0;
    for (std::size_t n : traj.unsustainable) total += last.at(n);
    return total;
}

CircularityReport circularity(const Trajectory& traj) {
    CircularityReport r;
    r.network = traj.network_name;
    r.times = traj.times;
    if (traj.unsustainable.empty()) r.warnings.push_back("network '" + traj.network_name + "' designates no unsustainable flows");
    r.unsustainable_rate.reserve(traj.flows.size());
    r.return_rate.reserve(traj.flows.size());
    for (const auto& rec : traj.flows) {
        double u = 0.0, ret = 0.0;
        for (std::size_t n : traj.unsustainable) u += rec.at(n);
        for (std::size_t n : traj.returns) ret += rec.at(n);
        r.unsustainable_rate.push_back(u);
        r.return_rate.push_back(ret);
    }
    if (!traj.cumulative.empty()) {
        const auto& last = traj.cumulative.back();
        for (std::size_t n : traj.unsustainable) {
            (traj.from_source.at(n) ? r.cumulative_extraction : r.cumulative_leak) += last.at(n);
        }
        for (std::size_t n : traj.returns) r.cumulative_return += last.at(n);
    }
    r.cumulative_unsustainable = cumulative_unsustainable(traj);
    const double throughput = r.cumulative_unsustainable + r.cumulative_return;
    r.circularity_index =
        std::clamp(1.0 - r.cumulative_unsustainable / std::max(throughput, kCircularityEpsilon), 0.0, 1.0);
    return r;
}

namespace {

int three_way(double a, double b) { return a < b ? -1 : (b < a ? 1 : 0); }

}  // namespace

int compare_objective(const CircularityReport& a, const CircularityReport& b) {
    if (int c = three_way(a.cumulative_unsustainable, b.cumulative_unsustainable)) return c;
    if (int c = three_way(a.cumulative_leak, b.cumulative_leak)) return c;
    if (int c = three_way(a.cumulative_extraction, b.cumulative_extraction)) return c;
    return a.network.compare(b.network) < 0 ? -1 : (a.network == b.network ? 0 : 1);
}

int compare_objective(const Trajectory& a, const Trajectory& b) {
    if (a.horizon != b.horizon || a.dt != b.dt) {
        throw std::invalid_argument("trajectories differ in horizon or dt; objectives are not comparable");
    }
    return compare_objective(circularity(a), circularity(b));
}

}  // namespace circuflow

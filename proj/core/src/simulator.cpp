#include "circuflow/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "circuflow/compartments.hpp"
#include "circuflow/errors.hpp"
#include "circuflow/validate.hpp"
#include "wiring.hpp"

namespace circuflow {

SimConfig SimConfig::from(const Network& net) {
    SimConfig cfg;
    cfg.dt = net.simulation.dt;
    cfg.horizon = net.simulation.horizon;
    cfg.method = net.simulation.method;
    return cfg;
}

struct Simulator::Compiled {
    detail::Wiring wiring;
    std::vector<std::size_t> material_of;     // compartment -> material slot
    std::vector<std::size_t> output_material; // transformer output slot (or same as material_of)
    std::vector<bool> in_ledger;              // not a source, not a sink
    std::vector<bool> is_sink;
    std::vector<std::size_t> conn_material;   // connection -> material slot
};

namespace {

std::size_t material_slot(const Network& net, const std::string& label) {
    for (std::size_t n = 0; n < net.materials.size(); ++n) {
        if (net.materials[n].label == label) return n;
    }
    return 0;
}

double sum_inflow(const std::vector<std::size_t>& conns, const std::vector<double>& rates) {
    double total = 0.0;
    for (std::size_t n : conns) total += rates[n];
    return total;
}

bool all_finite(const CompartmentRates& r) {
    return std::isfinite(r.d_store) && std::isfinite(r.converted) &&
           std::all_of(r.out.begin(), r.out.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

Simulator::Simulator(Network net) : net_(std::move(net)) {
    require_valid(net_);
    auto compiled = std::make_shared<Compiled>();
    compiled->wiring = detail::build_wiring(net_);
    const std::size_t nc = net_.compartments.size();
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& comp = net_.compartments[c];
        compiled->material_of.push_back(material_slot(net_, stored_material(comp)));
        if (const auto* t = std::get_if<TransformerParams>(&comp.params)) {
            compiled->output_material.push_back(material_slot(net_, t->output_material));
        } else {
            compiled->output_material.push_back(compiled->material_of.back());
        }
        compiled->in_ledger.push_back(comp.kind() != Kind::Source && comp.kind() != Kind::Sink);
        compiled->is_sink.push_back(comp.kind() == Kind::Sink);
    }
    for (const auto& conn : net_.connections) {
        const auto* from = net_.find_compartment(conn.from.k);
        std::string label;
        for (const auto& p : output_ports(*from)) {
            if (p.name == conn.from.port) label = p.material;
        }
        compiled->conn_material.push_back(material_slot(net_, label));
    }
    compiled_ = std::move(compiled);
}

Derivative Simulator::evaluate(const NetworkState& state, double guard_time, const RateHook& hook) const {
    const auto& w = compiled_->wiring;
    const std::size_t nc = net_.compartments.size();
    if (state.store.size() != nc) {
        throw std::invalid_argument("state dimension " + std::to_string(state.store.size()) + " != " +
                                    std::to_string(nc) + " compartments");
    }

    Derivative d;
    d.d_store.assign(nc, 0.0);
    d.converted.assign(nc, 0.0);
    d.rates.assign(net_.connections.size(), 0.0);

    auto inflow = [&](std::size_t c, std::size_t port) {
        return port < w.in_conns[c].size() ? sum_inflow(w.in_conns[c][port], d.rates) : 0.0;
    };

    auto compute = [&](std::size_t c) {
        const auto& comp = net_.compartments[c];
        const double m = std::max(0.0, state.store[c]);
        CompartmentRates r;
        switch (comp.kind()) {
            case Kind::Source: {
                const auto& p = std::get<SourceParams>(comp.params);
                const double demand = std::max(0.0, p.demand - sum_inflow(w.makeup[c], d.rates));
                const auto s = source_rates(p, m, demand, guard_time);
                r.d_store = s.d_store;
                r.out[0] = s.out;
                break;
            }
            case Kind::Stock: {
                const auto s = stock_rates(m, inflow(c, 0), std::get<StockParams>(comp.params).demand, guard_time);
                r.d_store = s.d_store;
                r.out[0] = s.out;
                break;
            }
            case Kind::Transport: {
                const auto s = transport_rates(std::get<TransportParams>(comp.params), m, inflow(c, 0));
                r.d_store = s.d_store;
                r.out[0] = s.out;
                r.out[1] = s.loss;
                break;
            }
            case Kind::Transformer: {
                const auto s = transformer_rates(std::get<TransformerParams>(comp.params), m, inflow(c, 0),
                                                 inflow(c, 1), guard_time);
                r.d_store = s.d_store;
                r.out[0] = s.out;
                r.out[1] = s.waste;
                r.converted = s.converted;
                break;
            }
            case Kind::Sorter: {
                const auto s = sorter_rates(std::get<SorterParams>(comp.params), m, inflow(c, 0), guard_time);
                r.d_store = s.d_store;
                r.out[0] = s.accept;
                r.out[1] = s.accept_alt;
                r.out[2] = s.reject;
                break;
            }
            case Kind::Recycler: {
                const auto s = recycler_rates(std::get<RecyclerParams>(comp.params), m, inflow(c, 0));
                r.d_store = s.d_store;
                r.out[0] = s.ret;
                r.out[1] = s.leak;
                break;
            }
            case Kind::Sink: r.d_store = inflow(c, 0); break;
        }
        if (hook) hook(comp, r);
        if (!all_finite(r)) {
            throw NumericError("non-finite rate in " + to_string(comp.id) + " (" + std::string(kind_name(comp.kind())) +
                               ")");
        }
        for (std::size_t p = 0; p < w.out_conn[c].size(); ++p) {
            if (w.out_conn[c][p] != detail::kUnconnected) d.rates[w.out_conn[c][p]] = r.out[p];
        }
        d.d_store[c] = r.d_store;
        d.converted[c] = r.converted;
    };

    // Output rates in dependency order; lagged kinds do not read their inflows for this.
    for (std::size_t c : w.order) compute(c);
    // With every connection rate known, refresh the store derivative of lagged kinds.
    for (std::size_t c = 0; c < nc; ++c) {
        if (!w.feedthrough[c]) compute(c);
    }
    return d;
}

StepResult Simulator::step(const NetworkState& state, double dt, Method method, double guard_time) const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double guard = guard_time > 0.0 ? guard_time : dt;
    const std::size_t nc = net_.compartments.size();

    auto axpy = [&](const NetworkState& x, double a, const std::vector<double>& v) {
        NetworkState out = x;
        for (std::size_t c = 0; c < nc; ++c) out.store[c] += a * v[c];
        return out;
    };

    StepResult result;
    const Derivative k1 = evaluate(state, guard);
    result.flows = k1.rates;
    if (method == Method::Euler) {
        result.state = axpy(state, dt, k1.d_store);
    } else {
        const Derivative k2 = evaluate(axpy(state, dt / 2, k1.d_store), guard);
        const Derivative k3 = evaluate(axpy(state, dt / 2, k2.d_store), guard);
        const Derivative k4 = evaluate(axpy(state, dt, k3.d_store), guard);
        result.state = state;
        for (std::size_t c = 0; c < nc; ++c) {
            result.state.store[c] +=
                dt / 6.0 * (k1.d_store[c] + 2.0 * k2.d_store[c] + 2.0 * k3.d_store[c] + k4.d_store[c]);
        }
    }
    for (double& m : result.state.store) m = std::max(0.0, m);
    return result;
}

Trajectory Simulator::run(const SimConfig& cfg) const {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("dt must be positive");
    if (!(cfg.horizon >= cfg.dt)) throw std::invalid_argument("horizon must be >= dt");

    const auto& cc = *compiled_;
    const std::size_t nc = net_.compartments.size();
    const std::size_t nconn = net_.connections.size();
    const std::size_t nm = net_.materials.size();
    const double guard = cfg.guard_time > 0.0 ? cfg.guard_time : cfg.dt;
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));

    Trajectory traj;
    traj.network_name = net_.name;
    for (const auto& m : net_.materials) traj.material_labels.push_back(m.label);
    for (std::size_t n = 0; n < nconn; ++n) {
        const auto& conn = net_.connections[n];
        traj.connection_ids.push_back(conn.id);
        traj.from_source.push_back(net_.compartments[cc.wiring.conn_from[n]].kind() == Kind::Source);
    }
    for (const auto& id : net_.unsustainable) traj.unsustainable.push_back(*net_.connection_index(id));
    for (const auto& id : net_.returns) traj.returns.push_back(*net_.connection_index(id));
    traj.dt = cfg.dt;
    traj.horizon = cfg.horizon;
    traj.method = cfg.method;

    NetworkState x = initial_state(net_);
    const NetworkState x0 = x;
    traj.initial_stored.assign(nm, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        if (cc.in_ledger[c]) traj.initial_stored[cc.material_of[c]] += x0.store[c];
    }

    std::vector<double> cumulative(nconn, 0.0);
    std::vector<double> conv_cum(nc, 0.0);
    std::vector<double> clamped(nm, 0.0);
    std::vector<bool> exhausted(nc, false);

    auto ledger_at = [&](const NetworkState& s) {
        Ledger l;
        l.stored.assign(nm, 0.0);
        l.extracted.assign(nm, 0.0);
        l.sunk.assign(nm, 0.0);
        l.converted.assign(nm, 0.0);
        l.clamped = clamped;
        for (std::size_t c = 0; c < nc; ++c) {
            const std::size_t mat = cc.material_of[c];
            if (cc.in_ledger[c]) l.stored[mat] += s.store[c];
            if (cc.is_sink[c]) l.sunk[mat] += s.store[c] - x0.store[c];
            if (conv_cum[c] != 0.0) {
                l.converted[mat] -= conv_cum[c];
                l.converted[cc.output_material[c]] += conv_cum[c];
            }
        }
        for (std::size_t n = 0; n < nconn; ++n) {
            if (traj.from_source[n]) l.extracted[cc.conn_material[n]] += cumulative[n];
        }
        return l;
    };

    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.flows.reserve(steps + 1);
    traj.cumulative.reserve(steps + 1);
    traj.ledger.reserve(steps + 1);

    const auto& hook = cfg.rate_hook;
    auto axpy = [&](const NetworkState& s, double a, const std::vector<double>& v) {
        NetworkState out = s;
        for (std::size_t c = 0; c < nc; ++c) out.store[c] += a * v[c];
        return out;
    };

    double min_store = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t_now = (i == steps) ? cfg.horizon : static_cast<double>(i) * cfg.dt;
        const Derivative k1 = evaluate(x, guard, hook);
        traj.times.push_back(t_now);
        traj.states.push_back(x);
        traj.flows.push_back(k1.rates);
        traj.cumulative.push_back(cumulative);
        traj.ledger.push_back(ledger_at(x));
        if (i == steps) break;

        const double t_next = (i + 1 == steps) ? cfg.horizon : static_cast<double>(i + 1) * cfg.dt;
        const double h = t_next - t_now;
        NetworkState next = x;
        if (cfg.method == Method::Euler) {
            for (std::size_t c = 0; c < nc; ++c) next.store[c] += h * k1.d_store[c];
            for (std::size_t n = 0; n < nconn; ++n) cumulative[n] += h * k1.rates[n];
            for (std::size_t c = 0; c < nc; ++c) conv_cum[c] += h * k1.converted[c];
        } else {
            const Derivative k2 = evaluate(axpy(x, h / 2, k1.d_store), guard, hook);
            const Derivative k3 = evaluate(axpy(x, h / 2, k2.d_store), guard, hook);
            const Derivative k4 = evaluate(axpy(x, h, k3.d_store), guard, hook);
            auto rk = [h](double a, double b, double c, double d) { return h / 6.0 * (a + 2.0 * b + 2.0 * c + d); };
            for (std::size_t c = 0; c < nc; ++c) {
                next.store[c] += rk(k1.d_store[c], k2.d_store[c], k3.d_store[c], k4.d_store[c]);
                conv_cum[c] += rk(k1.converted[c], k2.converted[c], k3.converted[c], k4.converted[c]);
            }
            for (std::size_t n = 0; n < nconn; ++n) {
                cumulative[n] += rk(k1.rates[n], k2.rates[n], k3.rates[n], k4.rates[n]);
            }
        }

        for (std::size_t c = 0; c < nc; ++c) {
            double& m = next.store[c];
            if (!std::isfinite(m)) {
                throw NumericError("non-finite store in " + to_string(net_.compartments[c].id) + " at t=" +
                                   std::to_string(t_next));
            }
            min_store = std::min(min_store, m);
            if (m < 0.0) {
                if (cc.in_ledger[c] || cc.is_sink[c]) clamped[cc.material_of[c]] += -m;
                m = 0.0;
            }
            const auto& comp = net_.compartments[c];
            if (comp.kind() == Kind::Source && !exhausted[c] && x0.store[c] > 0.0 && m <= 1e-9 * x0.store[c]) {
                exhausted[c] = true;
                traj.events.push_back({t_next, "reserve_exhausted", to_string(comp.id)});
            }
        }
        x = std::move(next);
    }
    traj.min_store_before_clamp = min_store;
    return traj;
}

StepResult step(const Network& net, const NetworkState& state, double dt, Method method) {
    return Simulator(net).step(state, dt, method);
}

Trajectory simulate(const Network& net, const SimConfig& config) { return Simulator(net).run(config); }

Trajectory simulate(const Network& net) { return simulate(net, SimConfig::from(net)); }

ConservationReport check_conservation(const Trajectory& traj, double tolerance_per_step) {
    ConservationReport report;
    report.steps = traj.steps();
    report.tolerance_per_step = tolerance_per_step;
    const std::size_t nm = traj.material_labels.size();
    report.max_residual.assign(nm, 0.0);
    report.max_relative_residual.assign(nm, 0.0);
    const double bound = tolerance_per_step * static_cast<double>(std::max<std::size_t>(report.steps, 1));

    std::vector<double> scale(nm, 0.0);
    for (const auto& l : traj.ledger) {
        for (std::size_t m = 0; m < nm; ++m) {
            scale[m] = std::max({scale[m], std::abs(traj.initial_stored[m]), std::abs(l.stored[m]) + std::abs(l.sunk[m]),
                                 std::abs(l.extracted[m]), std::abs(l.converted[m])});
        }
    }
    for (std::size_t i = 0; i < traj.ledger.size(); ++i) {
        const auto& l = traj.ledger[i];
        for (std::size_t m = 0; m < nm; ++m) {
            const double residual =
                std::abs(l.stored[m] + l.sunk[m] - traj.initial_stored[m] - l.extracted[m] - l.converted[m] - l.clamped[m]);
            const double relative = scale[m] > 0.0 ? residual / scale[m] : residual;
            report.max_residual[m] = std::max(report.max_residual[m], residual);
            report.max_relative_residual[m] = std::max(report.max_relative_residual[m], relative);
            if (!(relative <= bound) && !report.first_failure_step) {
                report.first_failure_step = i;
                report.failing_material = traj.material_labels[m];
            }
        }
    }
    report.passed = !report.first_failure_step.has_value();
    return report;
}

}  // namespace circuflow

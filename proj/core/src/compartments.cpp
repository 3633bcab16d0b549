#include "circuflow/compartments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace circuflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonnegative(double v, const char* what) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + " must be nonnegative");
}

// Rate at which stored mass may be drawn down.
double drawable(double store, double guard_time) {
    if (store <= 0.0) return 0.0;
    return guard_time > 0.0 ? store / guard_time : kInf;
}

}  // namespace

SourceRates source_rates(const SourceParams& p, double store, double demand, double guard_time) {
    require_nonnegative(demand, "demand");
    require_nonnegative(store, "reserve");
    SourceRates r;
    r.out = std::min({demand, p.max_rate, drawable(store, guard_time)});
    r.d_store = -r.out;
    return r;
}

StockRates stock_rates(double store, double in_rate, double demand, double guard_time) {
    require_nonnegative(store, "store");
    require_nonnegative(in_rate, "inflow");
    require_nonnegative(demand, "demand");
    const double passthrough = std::min(demand, in_rate);
    const double drawn = std::min(demand - passthrough, drawable(store, guard_time));
    StockRates r;
    r.out = passthrough + drawn;
    r.d_store = (in_rate - passthrough) - drawn;
    return r;
}

TransportRates transport_rates(const TransportParams& p, double store, double in_rate) {
    require_nonnegative(store, "store");
    require_nonnegative(in_rate, "inflow");
    const double discharge = store / p.time_constant;
    TransportRates r;
    r.out = (1.0 - p.loss_fraction) * discharge;
    r.loss = discharge - r.out;
    r.d_store = in_rate - discharge;
    return r;
}

SorterSplit sorter_split(const SorterParams& p, double processed) {
    require_nonnegative(processed, "processed rate");
    if (processed > p.throughput * (1.0 + 1e-12)) {
        throw std::invalid_argument("processed rate " + std::to_string(processed) + " exceeds sorter throughput " +
                                    std::to_string(p.throughput));
    }
    SorterSplit s;
    s.accept = p.success_rate * processed;
    s.reject = processed - s.accept;
    return s;
}

SorterRates sorter_rates(const SorterParams& p, double store, double in_rate, double guard_time) {
    require_nonnegative(store, "store");
    require_nonnegative(in_rate, "inflow");
    SorterRates r;
    r.processed = std::min(p.throughput, in_rate + drawable(store, guard_time));
    const auto split = sorter_split(p, r.processed);
    r.accept_alt = p.alt_fraction * split.accept;
    r.accept = split.accept - r.accept_alt;
    r.reject = split.reject;
    r.d_store = in_rate - r.processed;
    return r;
}

TransformerRates transformer_rates(const TransformerParams& p, double store, double in_rate, double recycled_rate,
                                   double guard_time) {
    require_nonnegative(store, "store");
    require_nonnegative(in_rate, "inflow");
    require_nonnegative(recycled_rate, "recycled inflow");
    TransformerRates r;
    const double virgin_capacity = std::max(0.0, p.rate_capacity - recycled_rate);
    r.processed = std::min(virgin_capacity, in_rate + drawable(store, guard_time));
    const double made = p.yield * r.processed;
    r.waste = r.processed - made;
    r.out = made + recycled_rate;
    r.converted = p.input_material == p.output_material ? 0.0 : made;
    r.d_store = in_rate - r.processed;
    return r;
}

RecyclerRates recycler_rates(const RecyclerParams& p, double store, double in_rate) {
    require_nonnegative(store, "store");
    require_nonnegative(in_rate, "inflow");
    RecyclerRates r;
    r.processed = store / p.processing_time;
    r.ret = p.yield * r.processed;
    r.leak = r.processed - r.ret;
    r.d_store = in_rate - r.processed;
    return r;
}

double throughput_from_items(double item_rate_per_hour, double item_mass) {
    return item_rate_per_hour * item_mass / 3600.0;
}

bool ParamBounds::contains(double v) const {
    if (!std::isfinite(v)) return false;
    const bool above = lo_open ? v > lo : v >= lo;
    const bool below = hi_open ? v < hi : v <= hi;
    return above && below;
}

std::vector<std::string> numeric_param_names(Kind kind) {
    switch (kind) {
        case Kind::Source: return {"reserve", "max_rate", "demand"};
        case Kind::Stock: return {"demand"};
        case Kind::Transport: return {"time_constant", "loss_fraction"};
        case Kind::Transformer: return {"yield", "rate_capacity"};
        case Kind::Sorter: return {"success_rate", "throughput", "item_mass", "item_rate", "alt_fraction"};
        case Kind::Recycler: return {"yield", "processing_time"};
        case Kind::Sink: return {};
    }
    return {};
}

ParamBounds param_bounds(Kind kind, std::string_view name) {
    const ParamBounds nonneg{0.0, kInf, false, true};
    const ParamBounds positive{0.0, kInf, true, true};
    const ParamBounds unit{0.0, 1.0};
    switch (kind) {
        case Kind::Source:
        case Kind::Stock:
            if (name == "reserve" || name == "max_rate" || name == "demand") return nonneg;
            break;
        case Kind::Transport:
            if (name == "time_constant") return positive;
            if (name == "loss_fraction") return {0.0, 1.0, false, true};
            break;
        case Kind::Transformer:
            if (name == "yield") return {0.0, 1.0, true, false};
            if (name == "rate_capacity") return nonneg;
            break;
        case Kind::Sorter:
            if (name == "success_rate" || name == "alt_fraction") return unit;
            if (name == "throughput" || name == "item_mass" || name == "item_rate") return nonneg;
            break;
        case Kind::Recycler:
            if (name == "yield") return unit;
            if (name == "processing_time") return positive;
            break;
        case Kind::Sink: break;
    }
    throw std::invalid_argument("kind '" + std::string(kind_name(kind)) + "' has no numeric parameter '" +
                                std::string(name) + "'");
}

namespace {

double* param_slot(Compartment& c, std::string_view name) {
    if (auto* p = std::get_if<SourceParams>(&c.params)) {
        if (name == "reserve") return &p->reserve;
        if (name == "max_rate") return &p->max_rate;
        if (name == "demand") return &p->demand;
    } else if (auto* p = std::get_if<StockParams>(&c.params)) {
        if (name == "demand") return &p->demand;
    } else if (auto* p = std::get_if<TransportParams>(&c.params)) {
        if (name == "time_constant") return &p->time_constant;
        if (name == "loss_fraction") return &p->loss_fraction;
    } else if (auto* p = std::get_if<TransformerParams>(&c.params)) {
        if (name == "yield") return &p->yield;
        if (name == "rate_capacity") return &p->rate_capacity;
    } else if (auto* p = std::get_if<SorterParams>(&c.params)) {
        if (name == "success_rate") return &p->success_rate;
        if (name == "throughput") return &p->throughput;
        if (name == "item_mass") return &p->item_mass;
        if (name == "item_rate") return &p->item_rate;
        if (name == "alt_fraction") return &p->alt_fraction;
    } else if (auto* p = std::get_if<RecyclerParams>(&c.params)) {
        if (name == "yield") return &p->yield;
        if (name == "processing_time") return &p->processing_time;
    }
    throw std::invalid_argument(to_string(c.id) + " (" + std::string(kind_name(c.kind())) +
                                ") has no numeric parameter '" + std::string(name) + "'");
}

}  // namespace

double get_param(const Compartment& c, std::string_view name) {
    return *param_slot(const_cast<Compartment&>(c), name);
}

void set_param(Compartment& c, std::string_view name, double value) {
    *param_slot(c, name) = value;
    if (auto* p = std::get_if<SorterParams>(&c.params); p && (name == "item_rate" || name == "item_mass")) {
        if (p->item_rate > 0.0 && p->item_mass > 0.0) p->throughput = throughput_from_items(p->item_rate, p->item_mass);
    }
}

std::vector<std::string> param_violations(const Compartment& c) {
    std::vector<std::string> out;
    for (const auto& name : numeric_param_names(c.kind())) {
        const double v = get_param(c, name);
        if (!param_bounds(c.kind(), name).contains(v)) {
            out.push_back("parameter '" + name + "' = " + std::to_string(v) + " out of bounds");
        }
    }
    if (const auto* p = std::get_if<SorterParams>(&c.params); p && p->item_rate > 0.0 && p->item_mass > 0.0) {
        const double derived = throughput_from_items(p->item_rate, p->item_mass);
        if (std::abs(derived - p->throughput) > 1e-9 * std::max(derived, 1e-300)) {
            out.push_back("throughput " + std::to_string(p->throughput) +
                          " inconsistent with item_rate * item_mass / 3600 = " + std::to_string(derived));
        }
    }
    return out;
}

}  // namespace circuflow

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "circuflow/network.hpp"

namespace circuflow {

// Mass-balance rate laws for each compartment kind. Every function maps
// (stored mass, inflow rates, parameters) to (dStore/dt, outflow rates) and
// conserves mass instantaneously: inflows = outflows + dStore/dt.
//
// `guard_time` bounds how fast a store can be drained: an outflow that must be
// drawn from storage is limited to store / guard_time, so explicit steps of
// length guard_time never drive a store negative.

struct SourceRates {
    double d_store = 0.0;
    double out = 0.0;
};

/// Extraction from a finite reserve. Throws std::invalid_argument on negative demand.
SourceRates source_rates(const SourceParams& p, double store, double demand, double guard_time);

struct StockRates {
    double d_store = 0.0;
    double out = 0.0;
};

/// Demand-driven stock: emits `demand` while it holds mass, otherwise only what flows in.
StockRates stock_rates(double store, double in_rate, double demand, double guard_time);

struct TransportRates {
    double d_store = 0.0;
    double out = 0.0;
    double loss = 0.0;
};

/// First-order lag dm/dt = u - m/T with a fraction of the discharge lost.
TransportRates transport_rates(const TransportParams& p, double store, double in_rate);

struct SorterSplit {
    double accept = 0.0;
    double reject = 0.0;
};

/// Exact partition of a processed rate. Throws std::invalid_argument when
/// processed exceeds the sorter throughput.
SorterSplit sorter_split(const SorterParams& p, double processed);

struct SorterRates {
    double d_store = 0.0;
    double processed = 0.0;
    double accept = 0.0;
    double accept_alt = 0.0;
    double reject = 0.0;
};

/// Buffered sorter: processes min(throughput, available) and splits it.
SorterRates sorter_rates(const SorterParams& p, double store, double in_rate, double guard_time);

struct TransformerRates {
    double d_store = 0.0;    // change of the input-material buffer
    double processed = 0.0;  // input material drawn into conversion
    double out = 0.0;        // output material, including recycled pass-through
    double waste = 0.0;      // unconverted input material
    double converted = 0.0;  // mass moved from input to output material type
};

TransformerRates transformer_rates(const TransformerParams& p, double store, double in_rate,
                                   double recycled_rate, double guard_time);

struct RecyclerRates {
    double d_store = 0.0;
    double processed = 0.0;
    double ret = 0.0;
    double leak = 0.0;
};

/// First-order lag with time constant t_r whose discharge splits into return and leak.
RecyclerRates recycler_rates(const RecyclerParams& p, double store, double in_rate);

/// Sorter throughput implied by an item rate (items/hour) and item mass (kg).
double throughput_from_items(double item_rate_per_hour, double item_mass);

// Named numeric parameters, lower_snake_case as in network files.

struct ParamBounds {
    double lo;
    double hi;
    bool lo_open = false;
    bool hi_open = false;

    bool contains(double v) const;
};

std::vector<std::string> numeric_param_names(Kind kind);
ParamBounds param_bounds(Kind kind, std::string_view name);
double get_param(const Compartment& c, std::string_view name);
/// Sets a numeric parameter. Setting item_rate/item_mass re-derives the sorter throughput.
void set_param(Compartment& c, std::string_view name, double value);

/// Human-readable list of out-of-bounds parameters (empty when valid).
std::vector<std::string> param_violations(const Compartment& c);

}  // namespace circuflow

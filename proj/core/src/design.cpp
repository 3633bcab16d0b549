#include "circuflow/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "circuflow/compartments.hpp"
#include "circuflow/errors.hpp"
#include "circuflow/parallel.hpp"
#include "circuflow/validate.hpp"

namespace circuflow {

Selection select_best(const VariantSet& set, const std::optional<SimConfig>& config) {
    if (set.variants.empty()) throw std::invalid_argument("variant set is empty");
    const auto& first = set.variants.front().network;
    for (const auto& v : set.variants) {
        auto report = validate(v.network);
        if (!report.ok()) throw ValidationError("variant '" + v.name + "' failed validation", report.lines());
        if (v.network.materials != first.materials) {
            throw std::invalid_argument("variant '" + v.name + "' declares different materials than '" +
                                        set.variants.front().name + "'");
        }
    }
    const SimConfig cfg = config.value_or(SimConfig::from(first));

    Selection sel;
    sel.reports.resize(set.variants.size());
    parallel_for(set.variants.size(), [&](std::size_t n) {
        Network net = set.variants[n].network;
        net.name = set.variants[n].name;
        sel.reports[n] = circularity(simulate(net, cfg));
    });

    std::vector<std::size_t> order(set.variants.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return compare_objective(sel.reports[a], sel.reports[b]) < 0;
    });
    for (std::size_t n : order) sel.ranking.push_back(set.variants[n].name);
    sel.best = sel.ranking.front();
    return sel;
}

std::size_t ParamSpace::grid_size() const {
    if (axes.empty()) return 0;
    std::size_t total = 1;
    for (const auto& a : axes) {
        if (a.grid.empty()) return 0;
        if (total > std::numeric_limits<std::size_t>::max() / a.grid.size()) {
            return std::numeric_limits<std::size_t>::max();
        }
        total *= a.grid.size();
    }
    return total;
}

Network apply_params(const Network& net, const ParamSpace& space, const std::vector<double>& values) {
    if (values.size() != space.axes.size()) throw std::invalid_argument("parameter tuple has the wrong arity");
    Network out = net;
    for (std::size_t a = 0; a < space.axes.size(); ++a) {
        Compartment* c = out.find_compartment(space.axes[a].k);
        if (c == nullptr) throw std::invalid_argument("no compartment k=" + std::to_string(space.axes[a].k));
        set_param(*c, space.axes[a].param, values[a]);
    }
    return out;
}

namespace {

void check_space(const Network& net, const ParamSpace& space) {
    if (space.axes.empty()) throw std::invalid_argument("parameter space is empty");
    for (const auto& axis : space.axes) {
        const Compartment* c = net.find_compartment(axis.k);
        if (c == nullptr) throw std::invalid_argument("no compartment k=" + std::to_string(axis.k));
        if (axis.grid.empty()) {
            throw std::invalid_argument("grid for " + to_string(c->id) + "." + axis.param + " is empty");
        }
        const auto bounds = param_bounds(c->kind(), axis.param);
        for (double v : axis.grid) {
            if (!bounds.contains(v)) {
                throw std::invalid_argument("grid value " + std::to_string(v) + " for " + to_string(c->id) + "." +
                                            axis.param + " is outside the parameter bounds");
            }
        }
    }
}

double objective(const Network& net, const SimConfig& cfg) { return cumulative_unsustainable(simulate(net, cfg)); }

// Smaller objective wins; equal objectives go to the lexicographically smaller tuple.
bool better(double obj, const std::vector<double>& params, double best_obj, const std::vector<double>& best_params) {
    if (obj != best_obj) return obj < best_obj;
    return std::lexicographical_compare(params.begin(), params.end(), best_params.begin(), best_params.end());
}

}  // namespace

OptimizeResult optimize_params(const Network& net, const ParamSpace& space, std::size_t budget,
                               const std::optional<SimConfig>& config) {
    check_space(net, space);
    if (budget == 0) throw std::invalid_argument("budget must allow at least one simulation");
    require_valid(net);
    const SimConfig cfg = config.value_or(SimConfig::from(net));
    const std::size_t dims = space.axes.size();

    auto values_of = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> v(dims);
        for (std::size_t a = 0; a < dims; ++a) v[a] = space.axes[a].grid[idx[a]];
        return v;
    };

    OptimizeResult result;
    const std::size_t total = space.grid_size();
    if (total <= budget) {
        result.exhaustive = true;
        std::vector<std::vector<double>> tuples;
        tuples.reserve(total);
        std::vector<std::size_t> idx(dims, 0);
        for (std::size_t n = 0; n < total; ++n) {
            tuples.push_back(values_of(idx));
            for (std::size_t a = dims; a-- > 0;) {
                if (++idx[a] < space.axes[a].grid.size()) break;
                idx[a] = 0;
            }
        }
        std::vector<double> objectives(total);
        parallel_for(total, [&](std::size_t n) { objectives[n] = objective(apply_params(net, space, tuples[n]), cfg); });
        std::size_t best = 0;
        for (std::size_t n = 1; n < total; ++n) {
            if (better(objectives[n], tuples[n], objectives[best], tuples[best])) best = n;
        }
        result.best_params = tuples[best];
        result.best_objective = objectives[best];
        result.evaluations = total;
        return result;
    }

    // Coordinate descent over the grids with memoised evaluations.
    std::map<std::vector<std::size_t>, double> memo;
    auto eval = [&](const std::vector<std::size_t>& idx) -> std::optional<double> {
        if (auto it = memo.find(idx); it != memo.end()) return it->second;
        if (memo.size() >= budget) return std::nullopt;
        const double obj = objective(apply_params(net, space, values_of(idx)), cfg);
        memo.emplace(idx, obj);
        return obj;
    };

    std::vector<std::size_t> current(dims);
    for (std::size_t a = 0; a < dims; ++a) {
        const double theta = get_param(*net.find_compartment(space.axes[a].k), space.axes[a].param);
        const auto& grid = space.axes[a].grid;
        std::size_t nearest = 0;
        for (std::size_t g = 1; g < grid.size(); ++g) {
            if (std::abs(grid[g] - theta) < std::abs(grid[nearest] - theta)) nearest = g;
        }
        current[a] = nearest;
    }
    double best_obj = *eval(current);
    bool improved = true;
    bool exhausted = false;
    while (improved && !exhausted) {
        improved = false;
        for (std::size_t a = 0; a < dims && !exhausted; ++a) {
            for (std::size_t g = 0; g < space.axes[a].grid.size(); ++g) {
                auto candidate = current;
                candidate[a] = g;
                auto obj = eval(candidate);
                if (!obj) {
                    exhausted = true;
                    break;
                }
                if (better(*obj, values_of(candidate), best_obj, values_of(current))) {
                    best_obj = *obj;
                    current = candidate;
                    improved = true;
                }
            }
        }
    }
    result.best_params = values_of(current);
    result.best_objective = best_obj;
    result.evaluations = memo.size();
    return result;
}

SensitivityResult sensitivity(const Network& net, int k, const std::string& param, double rel_delta,
                              const std::optional<SimConfig>& config) {
    if (!(rel_delta > 0.0 && rel_delta <= 0.1)) throw std::invalid_argument("relative delta must lie in (0, 0.1]");
    require_valid(net);
    const Compartment* c = net.find_compartment(k);
    if (c == nullptr) throw std::invalid_argument("no compartment k=" + std::to_string(k));
    const auto bounds = param_bounds(c->kind(), param);
    const SimConfig cfg = config.value_or(SimConfig::from(net));

    SensitivityResult r;
    r.k = k;
    r.param = param;
    r.theta = get_param(*c, param);
    r.delta = r.theta != 0.0 ? rel_delta * std::abs(r.theta) : rel_delta;

    const bool up_ok = bounds.contains(r.theta + r.delta);
    const bool down_ok = bounds.contains(r.theta - r.delta);
    if (!up_ok && !down_ok) throw std::invalid_argument("parameter cannot be perturbed within its bounds");

    auto run = [&](double theta, const SimConfig& run_cfg) {
        Network perturbed = net;
        set_param(*perturbed.find_compartment(k), param, theta);
        return simulate(perturbed, run_cfg);
    };

    const double hi = up_ok ? r.theta + r.delta : r.theta;
    const double lo = down_ok ? r.theta - r.delta : r.theta;
    r.one_sided = !(up_ok && down_ok);
    if (r.one_sided) {
        r.note = up_ok ? "lower bound reached; forward difference used" : "upper bound reached; backward difference used";
    }

    SimConfig fine = cfg;
    fine.dt = cfg.dt / 2;
    std::vector<Trajectory> runs(4);
    const std::vector<std::pair<double, SimConfig>> jobs = {{hi, cfg}, {lo, cfg}, {r.theta, cfg}, {r.theta, fine}};
    parallel_for(jobs.size(), [&](std::size_t n) { runs[n] = run(jobs[n].first, jobs[n].second); });

    r.m_u_plus = cumulative_unsustainable(runs[0]);
    r.m_u_minus = cumulative_unsustainable(runs[1]);
    r.ledger_plus = runs[0].ledger.back();
    r.ledger_minus = runs[1].ledger.back();
    r.derivative = (r.m_u_plus - r.m_u_minus) / (hi - lo);

    const double base = cumulative_unsustainable(runs[2]);
    const double refined = cumulative_unsustainable(runs[3]);
    const double eps = std::numeric_limits<double>::epsilon();
    r.noise_floor = (std::abs(base - refined) + 8.0 * eps * std::abs(base)) / (2.0 * r.delta);
    return r;
}

}  // namespace circuflow

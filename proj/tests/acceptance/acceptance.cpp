// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion; exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "circuflow/compartments.hpp"
#include "circuflow/design.hpp"
#include "circuflow/metrics.hpp"
#include "circuflow/network_io.hpp"
#include "circuflow/rankine.hpp"
#include "circuflow/robot/manipulator.hpp"
#include "circuflow/robot/policy.hpp"
#include "circuflow/robot/training.hpp"
#include "circuflow/simulator.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace circuflow;
using namespace circuflow::robot;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double brute_objective(const Network& net) {
    const auto traj = simulate(net);
    double total = 0.0;
    for (const auto& id : net.unsustainable) {
        for (std::size_t n = 0; n < net.connections.size(); ++n)
            if (net.connections[n].id == id) total += traj.cumulative.back()[n];
    }
    return total;
}

Network with_param(Network net, int k, const std::string& name, double v) {
    set_param(*net.find_compartment(k), name, v);
    return net;
}

double store_of(const Network& net, const NetworkState& s, int k) {
    for (std::size_t c = 0; c < net.compartments.size(); ++c)
        if (net.compartments[c].id.k == k) return s.store[c];
    return std::numeric_limits<double>::quiet_NaN();
}

Verdict conservation() {
    const Network net = fx::load("closed_loop");
    const double m0 = total_mass(net, initial_state(net)).at("water");
    const auto start = Clock::now();
    const auto traj = simulate(net);
    const double elapsed = seconds_since(start);
    double drift = 0.0;
    for (const auto& s : traj.states) drift = std::max(drift, std::abs(total_mass(net, s).at("water") - m0) / m0);
    const bool ok = traj.steps() == 100000 && drift <= 1e-9 && elapsed <= 5.0 && check_conservation(traj).passed;
    return {ok, std::to_string(traj.steps()) + " steps, max relative drift " + fmt("%.3g", drift) + ", " +
                    fmt("%.2f s", elapsed)};
}

Verdict integrator_order() {
    std::vector<double> err;
    for (double dt : {0.2, 0.1, 0.05}) {
        const Network net = fx::draining_transport(1.0, 1.0, dt, 2.0);
        const auto traj = simulate(net);
        err.push_back(std::abs(store_of(net, traj.states.back(), 3) - oracle::lag_decay(1.0, 1.0, 2.0)));
    }
    const double p1 = std::log2(err[0] / err[1]), p2 = std::log2(err[1] / err[2]);
    return {std::min(p1, p2) >= 3.7, "observed orders " + fmt("%.3f", p1) + ", " + fmt("%.3f", p2)};
}

Verdict rankine_closure() {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const double h3 = 30 + 300 * u(gen);
        const double h4 = h3 + 30 * u(gen);
        const double h1 = h4 + 50 + 3500 * u(gen);
        const double h2 = h3 + (h1 - h3) * u(gen);
        const auto p = evaluate_rankine({0.01 + 500 * u(gen), {h1, h2, h3, h4}});
        worst = std::max(worst, std::abs(p.q_in - p.q_out - (p.w_turbine - p.w_pump)) / p.q_in);
    }
    const double eta = evaluate_rankine({1.0, {3000.0, 2000.0, 100.0, 110.0}}).efficiency;
    const double hand = 990.0 / 2890.0;  // (1000 - 10) / (3000 - 110)
    const bool ok = worst <= 1e-9 && std::abs(eta - hand) <= 1e-12;
    return {ok, "worst residual/q_in " + fmt("%.3g", worst) + ", eta " + fmt("%.12f", eta)};
}

Verdict ordering() {
    const double linear = brute_objective(fx::load("fig3b_synthetic_linear"));
    const Network circ = fx::load("fig3c_synthetic_circular");
    const std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
    std::vector<std::vector<double>> mu(grid.size(), std::vector<double>(grid.size()));
    bool lower = true, monotone = true;
    double worst_gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < grid.size(); ++a) {
        for (std::size_t b = 0; b < grid.size(); ++b) {
            mu[a][b] = brute_objective(with_param(with_param(circ, 4, "success_rate", grid[a]), 5, "yield", grid[b]));
            lower = lower && mu[a][b] < linear;
            worst_gap = std::min(worst_gap, linear - mu[a][b]);
        }
    }
    for (std::size_t a = 0; a < grid.size(); ++a) {
        for (std::size_t b = 0; b < grid.size(); ++b) {
            if (a + 1 < grid.size()) monotone = monotone && mu[a + 1][b] <= mu[a][b];
            if (b + 1 < grid.size()) monotone = monotone && mu[a][b + 1] <= mu[a][b];
        }
    }
    return {lower && monotone, "linear m_u " + fmt("%.4f kg", linear) + ", smallest margin " +
                                   fmt("%.4f kg", worst_gap) + (monotone ? ", monotone" : ", NOT monotone")};
}

Verdict design_oracle() {
    const auto manifest = fx::networks_dir() / "plastics_manifest.json";
    VariantSet set;
    for (const auto& e : load_manifest(manifest)) set.variants.push_back({e.name, load_network(e.path)});
    std::string argmin;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : set.variants) {
        const double obj = brute_objective(v.network);
        if (obj < best) {
            best = obj;
            argmin = v.name;
        }
    }
    const auto sel = select_best(set);

    const Network net = fx::load("fig3c_synthetic_circular");
    const ParamSpace space{{{4, "success_rate", {0.6, 0.8, 0.9597, 1.0}}, {5, "yield", {0.4, 0.6, 0.8, 1.0}},
                            {11, "time_constant", {86400.0, 2 * 86400.0}}}};
    double grid_min = std::numeric_limits<double>::infinity();
    std::vector<double> grid_arg;
    for (double s : space.axes[0].grid)
        for (double r : space.axes[1].grid)
            for (double t : space.axes[2].grid) {
                const double obj = brute_objective(
                    with_param(with_param(with_param(net, 4, "success_rate", s), 5, "yield", r), 11, "time_constant", t));
                if (obj < grid_min) {
                    grid_min = obj;
                    grid_arg = {s, r, t};
                }
            }
    const auto opt = optimize_params(net, space, space.grid_size());
    const bool ok = sel.best == argmin && opt.exhaustive && opt.best_objective == grid_min && opt.best_params == grid_arg;
    return {ok, "selectBest " + sel.best + " vs oracle " + argmin + "; grid minimum " + fmt("%.10g", grid_min) +
                    " vs " + fmt("%.10g", opt.best_objective)};
}

Verdict sensitivity_check() {
    const Network net = fx::load("fig3c_synthetic_circular");
    const auto ds = sensitivity(net, 4, "success_rate");

    Network iso = net;
    iso.materials.push_back({3, "water"});
    iso.compartments.push_back(fx::stage(16, StockParams{"water", 1e-5}, 1.0));
    iso.compartments.push_back(fx::stage(17, StockParams{"water", 2e-5}, 1.0));
    iso.compartments.push_back(fx::make(18, 16, 17, TransportParams{"water", 432000.0, 0.0}, 1.0));
    iso.connections.push_back(fx::link("w1", 16, "out", 18, "in"));
    iso.connections.push_back(fx::link("w2", 18, "out", 17, "in"));
    iso.connections.push_back(fx::link("w3", 17, "out", 16, "in"));
    const auto dd = sensitivity(iso, 18, "time_constant");

    const bool ok = !ds.one_sided && ds.derivative < 0.0 && std::abs(dd.derivative) <= 10.0 * dd.noise_floor;
    return {ok, "dm_u/ds " + fmt("%.5g", ds.derivative) + "; disconnected " + fmt("%.3g", dd.derivative) +
                    " vs noise floor " + fmt("%.3g", dd.noise_floor)};
}

Verdict manipulator() {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI), vel(-10.0, 10.0);
    bool spd = true;
    double skew = 0.0, passivity = 0.0;
    for (auto model : {InertiaModel::PointMassTip, InertiaModel::UniformRod}) {
        ManipulatorParams p;
        p.inertia = model;
        for (int n = 0; n < 10000; ++n) {
            const Mat2 m = mass_matrix({ang(gen), ang(gen)}, p);
            spd = spd && m.a12 == m.a21 && oracle::min_eigenvalue(m.a11, m.a12, m.a22) > 0.0;
        }
        for (int n = 0; n < 1000; ++n) {
            const Vec2 q{ang(gen), ang(gen)}, qd{vel(gen), vel(gen)};
            const double h = 1e-6;
            const Mat2 mp = mass_matrix({q[0] + h * qd[0], q[1] + h * qd[1]}, p);
            const Mat2 mm = mass_matrix({q[0] - h * qd[0], q[1] - h * qd[1]}, p);
            const Mat2 c = coriolis_matrix(q, qd, p);
            const double n11 = (mp.a11 - mm.a11) / (2 * h) - 2 * c.a11;
            const double n22 = (mp.a22 - mm.a22) / (2 * h) - 2 * c.a22;
            const double n12 = (mp.a12 - mm.a12) / (2 * h) - 2 * c.a12;
            const double n21 = (mp.a21 - mm.a21) / (2 * h) - 2 * c.a21;
            skew = std::max({skew, std::abs(n11), std::abs(n22), std::abs(n12 + n21)});
        }
        for (double g : {0.0, 9.81}) {
            p.gravity = g;
            const TorqueLaw law = [&](double t, const Vec2& q, const Vec2& qd) {
                return clip_torque({0.04 * std::sin(2.3 * t) - 0.01 * q[0], 0.03 * std::cos(1.7 * t) - 0.002 * qd[1]},
                                   p.torque_limit);
            };
            const auto trace = integrate_with_energy({{0.4, -0.9}, {2.0, -1.0}, {}, 0.0}, law, p, 1e-3, 10.0);
            double emax = 0.0, worst = 0.0;
            for (std::size_t i = 0; i < trace.energy.size(); ++i) {
                emax = std::max(emax, std::abs(trace.energy[i]));
                worst = std::max(worst, std::abs(trace.energy[i] - trace.energy[0] - trace.net_work[i]));
            }
            passivity = std::max(passivity, worst / emax);
        }
    }
    const bool ok = spd && skew <= 1e-8 && passivity <= 1e-6;
    return {ok, std::string(spd ? "SPD on 2x10^4 samples" : "NOT SPD") + ", skew residual " + fmt("%.3g", skew) +
                    ", passivity residual/max(E) " + fmt("%.3g", passivity)};
}

Verdict success_evaluator() {
    const ReacherConfig cfg;
    const ZeroPolicy zero;
    const auto a = evaluate_policy(zero, 100000, cfg, 8);
    const auto b = evaluate_policy(zero, 100000, cfg, 8);
    const Vec2 tip = fingertip(cfg.initial_q, cfg.arm);
    const double geometric = oracle::disk_hit_probability({tip[0], tip[1]}, cfg.criterion.distance_threshold,
                                                          cfg.spawn_min_radius, cfg.spawn_radius, 1000000, 99);
    const bool identical = a.successes == b.successes && a.mean_final_distance == b.mean_final_distance &&
                           a.mean_return == b.mean_return;

    const ServoPolicy servo(cfg.arm);
    const auto start = Clock::now();
    evaluate_policy(servo, 10000, cfg, 9);
    const double elapsed = seconds_since(start);

    const bool ok = std::abs(a.success_rate - geometric) <= 0.005 && identical && elapsed <= 60.0;
    return {ok, "zero-torque " + fmt("%.5f", a.success_rate) + " vs oracle " + fmt("%.5f", geometric) +
                    (identical ? ", repeat identical" : ", repeat DIFFERS") + ", 10^4 episodes in " +
                    fmt("%.2f s", elapsed)};
}

Verdict training_effect() {
    const ReacherConfig env;
    const TrainerConfig trainer;
    constexpr std::size_t kEval = 2000;
    double sum = 0.0, worst = 1.0, train_seconds = 0.0;
    std::string per_seed;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto start = Clock::now();
        const auto result = train_cem(env, trainer, seed);
        train_seconds += seconds_since(start);
        const std::uint64_t eval_seed = 1000 + seed;
        const double trained = evaluate_policy(result.policy, kEval, env, eval_seed).success_rate;
        const double initial = evaluate_policy(result.initial_policy, kEval, env, eval_seed).success_rate;
        const double gain = trained - initial;
        sum += gain;
        worst = std::min(worst, gain);
        per_seed += (seed ? " " : "") + fmt("%+.1f", 100 * gain);
    }
    const double mean = sum / 5;
    const bool ok = worst >= 0.20 && train_seconds <= 600.0;
    return {ok, "gain per seed [" + per_seed + "] points, mean " + fmt("%.1f", 100 * mean) + ", training " +
                    fmt("%.1f s", train_seconds)};
}

Verdict coupling() {
    const auto c = success_to_sorter(0.9597, 0.05, 600.0, "plastic");
    Network net = fx::load("fig3c_synthetic_circular");
    Compartment& sorter = *net.find_compartment(4);
    const double alt = std::get<SorterParams>(sorter.params).alt_fraction;
    sorter.params = c.sorter;
    std::get<SorterParams>(sorter.params).alt_fraction = alt;
    sorter.initial_mass["plastic"] = 1000.0;  // keeps the sorter saturated for the whole day
    set_param(*net.find_compartment(5), "yield", 1.0);
    set_param(*net.find_compartment(6), "success_rate", 1.0);
    net.simulation.horizon = 86400.0;

    const auto traj = simulate(net);
    const double expected = oracle::reject_mass(0.9597, 600.0, 0.05, 86400.0);
    const double landfill = store_of(net, traj.states.back(), 7);
    const double e17 = traj.cumulative.back()[*net.connection_index("e17")];
    const double rel = std::max(std::abs(landfill - expected), std::abs(e17 - expected)) / expected;
    return {rel <= 1e-9, "landfill " + fmt("%.12g kg", landfill) + " vs closed form " + fmt("%.12g kg", expected) +
                             ", relative error " + fmt("%.3g", rel)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"conservation", conservation},
        {"integrator order", integrator_order},
        {"rankine closure", rankine_closure},
        {"linear vs circular ordering", ordering},
        {"design search oracle", design_oracle},
        {"sensitivity", sensitivity_check},
        {"manipulator physics", manipulator},
        {"success evaluator", success_evaluator},
        {"training effect", training_effect},
        {"robot-sorter coupling", coupling},
    };
    int failures = 0;
    for (std::size_t n = 0; n < criteria.size(); ++n) {
        Verdict v{false, ""};
        try {
            v = criteria[n].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", n + 1, criteria[n].first, v.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}

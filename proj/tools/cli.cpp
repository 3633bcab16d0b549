#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "circuflow/design.hpp"
#include "circuflow/errors.hpp"
#include "circuflow/metrics.hpp"
#include "circuflow/network_io.hpp"
#include "circuflow/rankine.hpp"
#include "circuflow/robot/training.hpp"
#include "circuflow/simulator.hpp"
#include "circuflow/validate.hpp"

#ifndef CIRCUFLOW_VERSION
#define CIRCUFLOW_VERSION "0.0.0"
#endif

namespace circuflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version() { return CIRCUFLOW_VERSION; }

namespace {

/// Bad flag values discovered after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct SimOverrides {
    std::optional<double> dt;
    std::optional<double> horizon;
    std::string method;

    void add_to(CLI::App* app) {
        app->add_option("--dt", dt, "Time step in seconds (overrides the file)");
        app->add_option("--horizon", horizon, "Simulated time in seconds (overrides the file)");
        app->add_option("--method", method, "Integrator")->check(CLI::IsMember({"rk4", "euler"}));
    }

    SimConfig apply(const Network& net) const {
        SimConfig cfg = SimConfig::from(net);
        if (dt) cfg.dt = *dt;
        if (horizon) cfg.horizon = *horizon;
        if (!method.empty()) cfg.method = *parse_method(method);
        if (!(cfg.dt > 0.0)) throw UsageError("--dt must be positive");
        if (!(cfg.horizon >= cfg.dt)) throw UsageError("--horizon must be at least one time step");
        return cfg;
    }
};

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f << text;
}

std::vector<std::size_t> order_by_k(const Network& net) {
    std::vector<std::size_t> idx(net.compartments.size());
    for (std::size_t n = 0; n < idx.size(); ++n) idx[n] = n;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return net.compartments[a].id.k < net.compartments[b].id.k; });
    return idx;
}

std::string trajectory_csv(const Network& net, const Trajectory& traj) {
    const auto by_k = order_by_k(net);
    std::string s = "time";
    for (std::size_t c : by_k) s += "," + to_string(net.compartments[c].id);
    for (const auto& id : traj.connection_ids) s += "," + id;
    s += ",m_u_rate\n";
    for (std::size_t n = 0; n < traj.times.size(); ++n) {
        s += fmt17(traj.times[n]);
        for (std::size_t c : by_k) s += "," + fmt17(traj.states[n].store[c]);
        double mu = 0.0;
        for (std::size_t e : traj.unsustainable) mu += traj.flows[n][e];
        for (double f : traj.flows[n]) s += "," + fmt17(f);
        s += "," + fmt17(mu) + "\n";
    }
    return s;
}

json report_json(const CircularityReport& r) {
    return {{"network", r.network},
            {"cumulative_unsustainable_kg", r.cumulative_unsustainable},
            {"cumulative_extraction_kg", r.cumulative_extraction},
            {"cumulative_leak_kg", r.cumulative_leak},
            {"cumulative_return_kg", r.cumulative_return},
            {"circularity_index", r.circularity_index},
            {"warnings", r.warnings}};
}

json provenance(const fs::path& input) {
    return {{"tool", "circuflow"},
            {"version", version()},
            {"input", input.string()},
            {"input_hash", content_hash(read_text_file(input))}};
}

json simulation_summary(const fs::path& input, const Network& net, const SimConfig& cfg, const Trajectory& traj,
                        std::optional<std::uint64_t> seed) {
    json j = provenance(input);
    j["network"] = net.name;
    j["dt"] = cfg.dt;
    j["horizon"] = cfg.horizon;
    j["method"] = std::string(method_name(cfg.method));
    j["steps"] = traj.steps();
    if (seed) j["seed"] = *seed;
    const Ledger& l = traj.ledger.back();
    json ledger = json::object();
    for (std::size_t m = 0; m < traj.material_labels.size(); ++m) {
        ledger[traj.material_labels[m]] = {{"initial_stored", traj.initial_stored[m]},
                                           {"stored", l.stored[m]},
                                           {"extracted", l.extracted[m]},
                                           {"sunk", l.sunk[m]},
                                           {"converted", l.converted[m]},
                                           {"clamped", l.clamped[m]}};
    }
    j["final_ledger"] = ledger;
    json flows = json::object();
    for (std::size_t e = 0; e < traj.connection_ids.size(); ++e) flows[traj.connection_ids[e]] = traj.cumulative.back()[e];
    j["cumulative_flow_kg"] = flows;
    j["metrics"] = report_json(circularity(traj));
    const auto cons = check_conservation(traj);
    j["conservation"] = {{"passed", cons.passed},
                         {"max_relative_residual", *std::max_element(cons.max_relative_residual.begin(),
                                                                     cons.max_relative_residual.end())},
                         {"tolerance", cons.tolerance_per_step * static_cast<double>(cons.steps)}};
    json events = json::array();
    for (const auto& e : traj.events) events.push_back({{"time", e.time}, {"kind", e.kind}, {"subject", e.subject}});
    j["events"] = events;
    return j;
}

int cmd_simulate(const std::string& path, const SimOverrides& ov, const std::string& format, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, std::ostream& out) {
    const Network net = load_network(path);
    const SimConfig cfg = ov.apply(net);
    const Trajectory traj = simulate(net, cfg);
    const std::string csv = trajectory_csv(net, traj);
    const std::string summary = simulation_summary(path, net, cfg, traj, seed).dump(2) + "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const std::string stem = net.name.empty() ? fs::path(path).stem().string() : net.name;
        write_output(csv, (fs::path(out_dir) / (stem + ".csv")).string(), out);
        write_output(summary, (fs::path(out_dir) / (stem + ".summary.json")).string(), out);
        out << "wrote " << (fs::path(out_dir) / (stem + ".csv")).string() << " and "
            << (fs::path(out_dir) / (stem + ".summary.json")).string() << "\n";
        return kExitOk;
    }
    out << (format == "csv" ? csv : summary);
    return kExitOk;
}

int cmd_compare(const std::string& manifest, const SimOverrides& ov, const std::string& format, const std::string& out_path,
                std::ostream& out) {
    VariantSet set;
    for (const auto& entry : load_manifest(manifest)) set.variants.push_back({entry.name, load_network(entry.path)});
    if (set.variants.empty()) throw UsageError("manifest lists no variants");
    const SimConfig cfg = ov.apply(set.variants.front().network);
    const Selection sel = select_best(set, cfg);

    std::map<std::string, std::size_t> index;
    for (std::size_t n = 0; n < set.variants.size(); ++n) index[set.variants[n].name] = n;

    std::string text;
    if (format == "json-summary") {
        json j = provenance(manifest);
        j["dt"] = cfg.dt;
        j["horizon"] = cfg.horizon;
        j["method"] = std::string(method_name(cfg.method));
        j["best"] = sel.best;
        json rows = json::array();
        for (const auto& name : sel.ranking) rows.push_back(report_json(sel.reports[index[name]]));
        j["ranking"] = rows;
        text = j.dump(2) + "\n";
    } else if (format == "csv") {
        text = "rank,network,cumulative_unsustainable_kg,cumulative_extraction_kg,cumulative_leak_kg,"
               "cumulative_return_kg,circularity_index,best\n";
        for (std::size_t r = 0; r < sel.ranking.size(); ++r) {
            const auto& rep = sel.reports[index[sel.ranking[r]]];
            text += std::to_string(r + 1) + "," + rep.network + "," + fmt17(rep.cumulative_unsustainable) + "," +
                    fmt17(rep.cumulative_extraction) + "," + fmt17(rep.cumulative_leak) + "," +
                    fmt17(rep.cumulative_return) + "," + fmt17(rep.circularity_index) + "," + (r == 0 ? "1" : "0") +
                    "\n";
        }
    } else {
        char line[256];
        std::snprintf(line, sizeof line, "%-5s %-28s %14s %14s %14s %14s %12s\n", "rank", "network", "m_u [kg]",
                      "extract [kg]", "leak [kg]", "return [kg]", "circularity");
        text += line;
        for (std::size_t r = 0; r < sel.ranking.size(); ++r) {
            const auto& rep = sel.reports[index[sel.ranking[r]]];
            const std::string rank = std::to_string(r + 1) + (r == 0 ? " *" : "");
            std::snprintf(line, sizeof line, "%-5s %-28s %14s %14s %14s %14s %12s\n", rank.c_str(), rep.network.c_str(),
                          fmt6(rep.cumulative_unsustainable).c_str(), fmt6(rep.cumulative_extraction).c_str(),
                          fmt6(rep.cumulative_leak).c_str(), fmt6(rep.cumulative_return).c_str(),
                          fmt6(rep.circularity_index).c_str());
            text += line;
        }
        text += "* argmin of cumulative unsustainable flow: " + sel.best + "\n";
    }
    write_output(text, out_path, out);
    return kExitOk;
}

// "4.success_rate" or "4.success_rate=0.6,0.8,1"
ParamAxis parse_selector(const std::string& text, bool want_grid) {
    const auto dot = text.find('.');
    const auto eq = text.find('=');
    if (dot == std::string::npos || dot == 0) throw UsageError("parameter selector '" + text + "' must look like K.NAME");
    ParamAxis axis;
    try {
        std::size_t used = 0;
        axis.k = std::stoi(text.substr(0, dot), &used);
        if (used != dot) throw std::invalid_argument("k");
    } catch (const std::exception&) {
        throw UsageError("parameter selector '" + text + "' has a non-integer compartment index");
    }
    axis.param = text.substr(dot + 1, eq == std::string::npos ? std::string::npos : eq - dot - 1);
    if (axis.param.empty()) throw UsageError("parameter selector '" + text + "' names no parameter");
    if (want_grid) {
        if (eq == std::string::npos) throw UsageError("parameter selector '" + text + "' needs a grid: K.NAME=v1,v2,...");
        std::stringstream ss(text.substr(eq + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                axis.grid.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument("v");
            } catch (const std::exception&) {
                throw UsageError("grid value '" + item + "' in '" + text + "' is not a number");
            }
        }
        if (axis.grid.empty()) throw UsageError("parameter selector '" + text + "' has an empty grid");
    } else if (eq != std::string::npos) {
        throw UsageError("parameter selector '" + text + "' must not carry a grid here");
    }
    return axis;
}

void check_axis(const Network& net, const ParamAxis& axis) {
    const Compartment* c = net.find_compartment(axis.k);
    if (c == nullptr) throw UsageError("no compartment with k=" + std::to_string(axis.k));
    const auto names = numeric_param_names(c->kind());
    if (std::find(names.begin(), names.end(), axis.param) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw UsageError("compartment " + to_string(c->id) + " (" + std::string(kind_name(c->kind())) +
                         ") has no parameter '" + axis.param + "' (expected one of: " + list + ")");
    }
}

int cmd_optimize(const std::string& path, const SimOverrides& ov, const std::vector<std::string>& params,
                 std::size_t budget, const std::string& out_path, std::ostream& out) {
    const Network net = load_network(path);
    const SimConfig cfg = ov.apply(net);
    ParamSpace space;
    for (const auto& p : params) {
        space.axes.push_back(parse_selector(p, true));
        check_axis(net, space.axes.back());
    }
    OptimizeResult res;
    try {
        res = optimize_params(net, space, budget, cfg);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    json j = provenance(path);
    j["network"] = net.name;
    j["budget"] = budget;
    j["evaluations"] = res.evaluations;
    j["strategy"] = res.exhaustive ? "exhaustive" : "coordinate_descent";
    json best = json::array();
    for (std::size_t a = 0; a < space.axes.size(); ++a) {
        best.push_back({{"k", space.axes[a].k}, {"param", space.axes[a].param}, {"value", res.best_params[a]}});
    }
    j["best_params"] = best;
    j["best_cumulative_unsustainable_kg"] = res.best_objective;
    write_output(j.dump(2) + "\n", out_path, out);
    return kExitOk;
}

int cmd_sensitivity(const std::string& path, const SimOverrides& ov, const std::string& selector, double rel_delta,
                    const std::string& out_path, std::ostream& out) {
    const Network net = load_network(path);
    const SimConfig cfg = ov.apply(net);
    const ParamAxis axis = parse_selector(selector, false);
    check_axis(net, axis);
    SensitivityResult r;
    try {
        r = sensitivity(net, axis.k, axis.param, rel_delta, cfg);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    json j = provenance(path);
    j["network"] = net.name;
    j["k"] = r.k;
    j["param"] = r.param;
    j["theta"] = r.theta;
    j["delta"] = r.delta;
    j["derivative"] = r.derivative;
    j["one_sided"] = r.one_sided;
    if (!r.note.empty()) j["note"] = r.note;
    j["noise_floor"] = r.noise_floor;
    j["m_u_plus_kg"] = r.m_u_plus;
    j["m_u_minus_kg"] = r.m_u_minus;
    write_output(j.dump(2) + "\n", out_path, out);
    return kExitOk;
}

int cmd_rankine(const std::string& path, const std::vector<double>& enthalpy, std::optional<double> mass_flow,
                const std::string& format, std::ostream& out) {
    RankineState st;
    if (!path.empty()) {
        auto loaded = load_rankine(path);
        if (!loaded) throw LoadError("no rankine section", {path + ": $.rankine: missing"});
        st = *loaded;
    } else if (enthalpy.empty()) {
        throw UsageError("give a network file with a rankine section or --enthalpy h1,h2,h3,h4");
    }
    if (!enthalpy.empty()) {
        if (enthalpy.size() != 4) throw UsageError("--enthalpy takes exactly four values");
        std::copy(enthalpy.begin(), enthalpy.end(), st.enthalpy.begin());
    }
    if (mass_flow) st.mass_flow = *mass_flow;
    CyclePerformance p;
    try {
        p = evaluate_rankine(st);
    } catch (const std::invalid_argument& e) {
        throw LoadError("invalid cycle state", {e.what()});
    }
    if (format == "json-summary") {
        json j = {{"tool", "circuflow"},
                  {"version", version()},
                  {"mass_flow", st.mass_flow},
                  {"enthalpy", st.enthalpy},
                  {"w_turbine", p.w_turbine},
                  {"w_pump", p.w_pump},
                  {"q_in", p.q_in},
                  {"q_out", p.q_out},
                  {"efficiency", p.efficiency},
                  {"net_power_kw", p.net_power},
                  {"energy_residual", p.energy_residual},
                  {"compartment_mass_flow", p.compartment_mass_flow}};
        if (!path.empty()) j["input_hash"] = content_hash(read_text_file(path));
        out << j.dump(2) << "\n";
        return kExitOk;
    }
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "w_turbine   %.10g kJ/kg\nw_pump      %.10g kJ/kg\nq_in        %.10g kJ/kg\nq_out       %.10g kJ/kg\n"
                  "efficiency  %.5f\nnet_power   %.10g kW\nresidual    %.3g kJ/kg\nmass_flow   %.10g kg/s on all 8 compartments\n",
                  p.w_turbine, p.w_pump, p.q_in, p.q_out, p.efficiency, p.net_power, p.energy_residual, st.mass_flow);
    out << buf;
    return kExitOk;
}

json criterion_json(const robot::EpisodeCriterion& c) {
    return {{"distance_threshold_m", c.distance_threshold},
            {"torque_threshold_nm", c.torque_threshold},
            {"max_steps", c.max_steps},
            {"dt", c.dt},
            {"window", c.window}};
}

json references_json() {
    json j = json::object();
    for (const auto& a : robot::kReferenceAgents) j[a.name] = a.success_rate;
    return j;
}

struct RobotEvalArgs {
    std::string policy;
    std::size_t episodes = 10000;
    std::uint64_t seed = 0;
    int window = 1;
    std::optional<double> item_mass;
    std::optional<double> item_rate;
    std::string format = "json-summary";
    std::string out;
};

int cmd_robot_eval(const RobotEvalArgs& a, std::ostream& out) {
    robot::ReacherConfig cfg;
    cfg.criterion.window = a.window;
    if (a.episodes < 1) throw UsageError("--episodes must be at least 1");
    if (a.window < 1) throw UsageError("--window must be at least 1");
    std::unique_ptr<robot::Policy> policy = robot::make_policy(a.policy, cfg.arm);
    const auto rep = robot::evaluate_policy(*policy, a.episodes, cfg, a.seed);

    std::string text;
    if (a.format == "csv") {
        text = "policy,episodes,seed,successes,success_rate,mean_final_distance,mean_return,aborted\n" + a.policy + "," +
               std::to_string(rep.episodes) + "," + std::to_string(a.seed) + "," + std::to_string(rep.successes) + "," +
               fmt17(rep.success_rate) + "," + fmt17(rep.mean_final_distance) + "," + fmt17(rep.mean_return) + "," +
               std::to_string(rep.aborted) + "\n";
    } else {
        json j = {{"tool", "circuflow"}, {"version", version()}, {"policy", a.policy}, {"seed", a.seed}};
        if (a.policy != "zero" && a.policy != "servo") j["policy_hash"] = content_hash(read_text_file(a.policy));
        j["episodes"] = rep.episodes;
        j["successes"] = rep.successes;
        j["success_rate"] = rep.success_rate;
        j["mean_final_distance_m"] = rep.mean_final_distance;
        j["mean_return"] = rep.mean_return;
        j["mean_step_time_s"] = rep.mean_step_time;
        j["aborted"] = rep.aborted;
        j["criterion"] = criterion_json(cfg.criterion);
        j["reference_success_rates"] = references_json();
        if (a.item_mass || a.item_rate) {
            if (!a.item_mass || !a.item_rate) throw UsageError("--item-mass and --item-rate go together");
            if (!(*a.item_mass > 0 && *a.item_rate > 0)) throw UsageError("--item-mass and --item-rate must be positive");
            const auto c = robot::success_to_sorter(rep, *a.item_mass, *a.item_rate, "plastic");
            j["sorter"] = {{"success_rate", c.sorter.success_rate},
                           {"throughput_kg_per_s", c.sorter.throughput},
                           {"item_mass", c.sorter.item_mass},
                           {"item_rate", c.sorter.item_rate},
                           {"sorted_kg_per_day", c.sorted_per_day},
                           {"rejected_kg_per_day", c.rejected_per_day}};
        }
        text = j.dump(2) + "\n";
    }
    write_output(text, a.out, out);
    return kExitOk;
}

struct RobotTrainArgs {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    robot::TrainerConfig trainer;
};

int cmd_robot_train(const RobotTrainArgs& a, std::ostream& out) {
    robot::ReacherConfig env;
    try {
        a.trainer.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto result = robot::train_cem(env, a.trainer, a.seed);
    fs::create_directories(a.out_dir);
    const fs::path policy_path = fs::path(a.out_dir) / "policy.json";
    const fs::path log_path = fs::path(a.out_dir) / "training_log.csv";
    result.policy.save(policy_path.string());
    write_output(robot::training_log_csv(result.log), log_path.string(), out);
    json j = {{"tool", "circuflow"},
              {"version", version()},
              {"seed", a.seed},
              {"policy", policy_path.string()},
              {"training_log", log_path.string()},
              {"generations", a.trainer.generations},
              {"improved", result.improved()},
              {"best_generation", result.best_generation},
              {"initial_validation_return", result.initial_validation_return},
              {"best_validation_return", result.best_validation_return},
              {"reference_success_rates", references_json()}};
    out << j.dump(2) << "\n";
    return kExitOk;
}

void print_diagnostics(std::ostream& err, const std::string& what, const std::vector<std::string>& lines) {
    err << "error: " << what << "\n";
    for (const auto& l : lines) err << "  " << l << "\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"circuflow: circular material-flow networks, design search and a robotic sorting compartment",
                 "circuflow"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    SimOverrides ov;
    std::string input, format, out_path;
    std::optional<std::uint64_t> seed;

    auto* sim = app.add_subcommand("simulate", "Simulate a network; CSV trajectory or JSON summary");
    sim->add_option("network", input, "Network file")->required();
    ov.add_to(sim);
    sim->add_option("--format", format, "Output on stdout")->check(CLI::IsMember({"csv", "json-summary"}));
    sim->add_option("--out", out_path, "Directory for <name>.csv and <name>.summary.json");
    sim->add_option("--seed", seed, "Recorded in the summary; simulation is deterministic");

    auto* cmp = app.add_subcommand("compare", "Rank the variants of a manifest by cumulative unsustainable flow");
    cmp->add_option("manifest", input, "Manifest file")->required();
    ov.add_to(cmp);
    cmp->add_option("--format", format, "table (default), csv or json-summary")
        ->check(CLI::IsMember({"table", "csv", "json-summary"}));
    cmp->add_option("--out", out_path, "Write to this file instead of stdout");

    std::vector<std::string> params;
    std::size_t budget = 1000;
    auto* opt = app.add_subcommand("optimize", "Minimise cumulative unsustainable flow over parameter grids");
    opt->add_option("network", input, "Network file")->required();
    opt->add_option("--param", params, "K.NAME=v1,v2,... (repeatable)")->required();
    opt->add_option("--budget", budget, "Maximum number of simulations")->check(CLI::PositiveNumber);
    ov.add_to(opt);
    opt->add_option("--out", out_path, "Write to this file instead of stdout");

    std::string selector;
    double rel_delta = 1e-3;
    auto* sens = app.add_subcommand("sensitivity", "Finite-difference derivative of cumulative unsustainable flow");
    sens->add_option("network", input, "Network file")->required();
    sens->add_option("--param", selector, "K.NAME")->required();
    sens->add_option("--rel-delta", rel_delta, "Relative perturbation in (0, 0.1]");
    ov.add_to(sens);
    sens->add_option("--out", out_path, "Write to this file instead of stdout");

    std::vector<double> enthalpy;
    std::optional<double> mass_flow;
    auto* rk = app.add_subcommand("rankine", "Steady-state Rankine cycle performance");
    rk->add_option("network", input, "Network file with a rankine section");
    rk->add_option("--enthalpy", enthalpy, "h1,h2,h3,h4 in kJ/kg")->delimiter(',');
    rk->add_option("--mass-flow", mass_flow, "kg/s");
    rk->add_option("--format", format, "text (default) or json-summary")
        ->check(CLI::IsMember({"text", "json-summary"}));

    RobotEvalArgs ev;
    auto* reval = app.add_subcommand("robot-eval", "Success rate of a reaching policy");
    reval->add_option("--policy", ev.policy, "Policy file, or 'zero' / 'servo'")->required();
    reval->add_option("--episodes", ev.episodes, "Number of episodes");
    reval->add_option("--seed", ev.seed, "Master seed");
    reval->add_option("--window", ev.window, "Consecutive steps the success thresholds must hold");
    reval->add_option("--item-mass", ev.item_mass, "kg per item; adds the coupled sorter to the report");
    reval->add_option("--item-rate", ev.item_rate, "items per hour; adds the coupled sorter to the report");
    reval->add_option("--format", ev.format, "json-summary (default) or csv")
        ->check(CLI::IsMember({"csv", "json-summary"}));
    reval->add_option("--out", ev.out, "Write to this file instead of stdout");

    RobotTrainArgs tr;
    int hidden = tr.trainer.hidden.front();
    auto* rtrain = app.add_subcommand("robot-train", "Cross-entropy training of a reaching policy");
    rtrain->add_option("--out", tr.out_dir, "Directory for policy.json and training_log.csv");
    rtrain->add_option("--seed", tr.seed, "Master seed");
    rtrain->add_option("--generations", tr.trainer.generations, "CEM generations");
    rtrain->add_option("--population", tr.trainer.population, "Candidates per generation");
    rtrain->add_option("--elites", tr.trainer.elites, "Elite count");
    rtrain->add_option("--episodes", tr.trainer.episodes_per_candidate, "Training episodes per candidate");
    rtrain->add_option("--validation-episodes", tr.trainer.validation_episodes, "Validation episodes");
    rtrain->add_option("--hidden", hidden, "Hidden layer width");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(input, ov, format.empty() ? "csv" : format, out_path, seed, out);
        if (cmp->parsed()) return cmd_compare(input, ov, format, out_path, out);
        if (opt->parsed()) return cmd_optimize(input, ov, params, budget, out_path, out);
        if (sens->parsed()) return cmd_sensitivity(input, ov, selector, rel_delta, out_path, out);
        if (rk->parsed()) return cmd_rankine(input, enthalpy, mass_flow, format, out);
        if (reval->parsed()) return cmd_robot_eval(ev, out);
        if (rtrain->parsed()) {
            tr.trainer.hidden = {hidden};
            return cmd_robot_train(tr, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        print_diagnostics(err, e.what(), e.details());
        return kExitInvalid;
    } catch (const LoadError& e) {
        print_diagnostics(err, e.what(), e.diagnostics());
        return kExitInvalid;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace circuflow::cli

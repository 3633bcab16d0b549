#include "circuflow/validate.hpp"

#include <cmath>
#include <map>
#include <set>

#include "circuflow/compartments.hpp"
#include "circuflow/errors.hpp"
#include "wiring.hpp"

namespace circuflow {

std::string Violation::to_string() const { return code + " [" + subject + "]: " + message; }

bool ValidationReport::has(const std::string& code) const {
    for (const auto& v : violations) {
        if (v.code == code) return true;
    }
    return false;
}

std::vector<std::string> ValidationReport::lines() const {
    std::vector<std::string> out;
    out.reserve(violations.size());
    for (const auto& v : violations) out.push_back(v.to_string());
    return out;
}

namespace {

class Checker {
public:
    explicit Checker(const Network& net) : net_(net) {}

    ValidationReport run() {
        check_materials();
        check_compartments();
        check_connections();
        check_designations();
        check_simulation();
        return std::move(report_);
    }

private:
    void add(std::string code, std::string subject, std::string message) {
        report_.violations.push_back({std::move(code), std::move(subject), std::move(message)});
    }

    bool known_material(const std::string& label) const { return labels_.count(label) > 0; }

    void check_materials() {
        const int q_count = static_cast<int>(net_.materials.size());
        std::set<int> seen;
        for (const auto& m : net_.materials) {
            const std::string subject = "material " + std::to_string(m.index);
            if (!seen.insert(m.index).second) add("duplicate_material_index", subject, "material index repeats");
            if (m.index < 1 || m.index > q_count) {
                add("material_index_range", subject, "index must lie in [1, " + std::to_string(q_count) + "]");
            }
            if (m.label.empty()) add("empty_material_label", subject, "material label is empty");
            if (!m.label.empty() && !labels_.insert(m.label).second) {
                add("duplicate_material_label", subject, "label '" + m.label + "' repeats");
            }
        }
    }

    void check_material_ref(const Compartment& c, const std::string& label, const char* field) {
        if (!known_material(label)) {
            add("unknown_material", to_string(c.id), std::string(field) + " '" + label + "' is not a declared material");
        }
    }

    void check_compartments() {
        const int nc = static_cast<int>(net_.compartments.size());
        std::map<int, int> count;
        for (const auto& c : net_.compartments) ++count[c.id.k];
        for (const auto& [k, n] : count) {
            if (n > 1) {
                add("duplicate_compartment_index", "k=" + std::to_string(k),
                    std::to_string(n) + " compartments share index k=" + std::to_string(k));
            }
        }
        for (const auto& c : net_.compartments) {
            const std::string subject = to_string(c.id);
            if (c.id.k < 1 || c.id.k > nc) {
                add("compartment_index_range", subject, "k must lie in [1, " + std::to_string(nc) + "]");
            }
            if (c.kind() == Kind::Transport) {
                if (c.id.i == c.id.j) add("transport_indices", subject, "transport compartments need i != j");
                for (int stage : {c.id.i, c.id.j}) {
                    const Compartment* s = net_.find_compartment(stage);
                    if (s == nullptr || s->kind() == Kind::Transport) {
                        add("transport_stage_missing", subject,
                            "stage " + std::to_string(stage) + " is not an existing stage compartment");
                    }
                }
            } else if (c.id.i != c.id.k || c.id.j != c.id.k) {
                add("stage_indices", subject, "non-transport compartments need i = j = k");
            }

            if (const auto* p = std::get_if<TransformerParams>(&c.params)) {
                check_material_ref(c, p->input_material, "input_material");
                check_material_ref(c, p->output_material, "output_material");
            } else {
                check_material_ref(c, stored_material(c), "material");
            }
            for (const auto& msg : param_violations(c)) add("invalid_parameter", subject, msg);

            for (const auto& [label, mass] : c.initial_mass) {
                if (!std::isfinite(mass) || mass < 0.0) {
                    add("invalid_initial_mass", subject, "initial mass of '" + label + "' must be finite and >= 0");
                }
                if (label != stored_material(c)) {
                    add("invalid_initial_mass", subject,
                        "compartment stores only '" + stored_material(c) + "', not '" + label + "'");
                }
            }
            if (const auto* src = std::get_if<SourceParams>(&c.params)) {
                auto it = c.initial_mass.find(src->material);
                if (it != c.initial_mass.end() && it->second != src->reserve) {
                    add("source_initial_mass", subject, "initial mass of a source must equal its reserve");
                }
                for (const auto& id : src->makeup_connections) {
                    if (net_.find_connection(id) == nullptr) {
                        add("unknown_makeup_connection", subject, "makeup connection '" + id + "' does not exist");
                    }
                }
            }
        }
    }

    void check_connections() {
        std::set<std::string> ids;
        std::map<std::pair<int, std::string>, int> output_use;
        for (const auto& conn : net_.connections) {
            const std::string subject = "connection " + conn.id;
            if (!ids.insert(conn.id).second) add("duplicate_connection_id", subject, "connection id repeats");

            const Compartment* from = net_.find_compartment(conn.from.k);
            const Compartment* to = net_.find_compartment(conn.to.k);
            if (from == nullptr) add("unknown_compartment", subject, "source k=" + std::to_string(conn.from.k) + " missing");
            if (to == nullptr) add("unknown_compartment", subject, "target k=" + std::to_string(conn.to.k) + " missing");
            if (from == nullptr || to == nullptr) continue;

            const Port* out = nullptr;
            const auto outs = output_ports(*from);
            for (const auto& p : outs) {
                if (p.name == conn.from.port) out = &p;
            }
            const Port* in = nullptr;
            const auto ins = input_ports(*to);
            for (const auto& p : ins) {
                if (p.name == conn.to.port) in = &p;
            }
            if (out == nullptr) {
                add("unknown_port", subject,
                    to_string(from->id) + " has no output port '" + conn.from.port + "'");
            }
            if (in == nullptr) {
                add("unknown_port", subject, to_string(to->id) + " has no input port '" + conn.to.port + "'");
            }
            if (out != nullptr && in != nullptr && out->material != in->material) {
                add("material_mismatch", subject,
                    "output carries '" + out->material + "' but input expects '" + in->material + "'");
            }
            if (out != nullptr && ++output_use[{conn.from.k, conn.from.port}] == 2) {
                add("output_port_reused", subject,
                    "output port " + to_string(from->id) + "." + conn.from.port + " feeds more than one connection");
            }
        }

        for (const auto& c : net_.compartments) {
            for (const auto& p : output_ports(c)) {
                if (output_use.count({c.id.k, p.name}) == 0 && output_may_carry_flow(c, p.name)) {
                    add("unconnected_output", to_string(c.id), "output port '" + p.name + "' can carry flow but is unconnected");
                }
            }
        }

        const auto wiring = detail::build_wiring(net_);
        if (!wiring.cyclic.empty()) {
            std::string members;
            for (std::size_t c : wiring.cyclic) members += " " + to_string(net_.compartments[c].id);
            add("algebraic_loop", "network",
                "feedthrough compartments form a loop without a lagged compartment:" + members);
        }
    }

    void check_designations() {
        auto check = [&](const std::vector<std::string>& ids, const char* what) {
            std::set<std::string> seen;
            for (const auto& id : ids) {
                if (net_.find_connection(id) == nullptr) {
                    add("unknown_designated_connection", "connection " + id,
                        std::string(what) + " designation names a missing connection");
                }
                if (!seen.insert(id).second) {
                    add("duplicate_designation", "connection " + id, std::string(what) + " designation repeats");
                }
            }
        };
        check(net_.unsustainable, "unsustainable");
        check(net_.returns, "return");
    }

    void check_simulation() {
        const auto& s = net_.simulation;
        if (!(s.dt > 0.0) || !std::isfinite(s.dt)) add("invalid_simulation", "simulation", "dt must be > 0");
        if (!(s.horizon >= s.dt) || !std::isfinite(s.horizon)) {
            add("invalid_simulation", "simulation", "horizon must be >= dt");
        }
    }

    const Network& net_;
    std::set<std::string> labels_;
    ValidationReport report_;
};

}  // namespace

ValidationReport validate(const Network& net) { return Checker(net).run(); }

void require_valid(const Network& net) {
    auto report = validate(net);
    if (!report.ok()) {
        throw ValidationError("network '" + net.name + "' failed validation with " +
                                  std::to_string(report.violations.size()) + " violation(s)",
                              report.lines());
    }
}

}  // namespace circuflow

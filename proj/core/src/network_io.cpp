#include "circuflow/network_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "circuflow/compartments.hpp"
#include "circuflow/errors.hpp"
#include "circuflow/validate.hpp"

namespace circuflow {

using nlohmann::json;

namespace {

// How a numeric parameter responds to the file's time scale.
enum class Dim { None, Time, Rate };

struct ParamSpec {
    const char* key;
    Dim dim;
    bool required;
    double fallback;
};

const std::vector<ParamSpec>& numeric_specs(Kind kind) {
    static const std::vector<ParamSpec> source = {
        {"reserve", Dim::None, true, 0}, {"max_rate", Dim::Rate, true, 0}, {"demand", Dim::Rate, true, 0}};
    static const std::vector<ParamSpec> stock = {{"demand", Dim::Rate, true, 0}};
    static const std::vector<ParamSpec> transport = {{"time_constant", Dim::Time, true, 0},
                                                     {"loss_fraction", Dim::None, false, 0}};
    static const std::vector<ParamSpec> transformer = {{"yield", Dim::None, false, 1},
                                                       {"rate_capacity", Dim::Rate, true, 0}};
    static const std::vector<ParamSpec> sorter = {{"success_rate", Dim::None, true, 0},
                                                  {"throughput", Dim::Rate, false, 0},
                                                  {"item_mass", Dim::None, false, 0},
                                                  {"item_rate", Dim::None, false, 0},
                                                  {"alt_fraction", Dim::None, false, 0}};
    static const std::vector<ParamSpec> recycler = {{"yield", Dim::None, true, 0},
                                                    {"processing_time", Dim::Time, true, 0}};
    static const std::vector<ParamSpec> sink = {};
    switch (kind) {
        case Kind::Source: return source;
        case Kind::Stock: return stock;
        case Kind::Transport: return transport;
        case Kind::Transformer: return transformer;
        case Kind::Sorter: return sorter;
        case Kind::Recycler: return recycler;
        case Kind::Sink: return sink;
    }
    return sink;
}

std::vector<const char*> string_keys(Kind kind) {
    if (kind == Kind::Transformer) return {"input_material", "output_material"};
    return {"material"};
}

CompartmentParams default_params(Kind kind) {
    switch (kind) {
        case Kind::Source: return SourceParams{};
        case Kind::Stock: return StockParams{};
        case Kind::Transport: return TransportParams{};
        case Kind::Transformer: return TransformerParams{};
        case Kind::Sorter: return SorterParams{};
        case Kind::Recycler: return RecyclerParams{};
        case Kind::Sink: return SinkParams{};
    }
    return SinkParams{};
}

std::string kinds_list() {
    std::string out;
    for (Kind k : {Kind::Source, Kind::Stock, Kind::Transport, Kind::Transformer, Kind::Sorter, Kind::Recycler,
                   Kind::Sink}) {
        if (!out.empty()) out += ", ";
        out += kind_name(k);
    }
    return out;
}

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    void error(const std::string& path, const std::string& msg) { diags_.push_back(origin_ + ": " + path + ": " + msg); }
    const std::vector<std::string>& diagnostics() const { return diags_; }

    bool expect_object(const json& j, const std::string& path) {
        if (j.is_object()) return true;
        error(path, "expected an object");
        return false;
    }

    void unknown_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
        for (const auto& [key, value] : obj.items()) {
            if (allowed.count(key) == 0) error(path + "." + key, "unknown field");
        }
    }

    std::optional<double> number(const json& obj, const std::string& path, const char* key, bool required) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) error(path + "." + key, "missing required field");
            return std::nullopt;
        }
        if (!it->is_number()) {
            error(path + "." + key, "expected a number");
            return std::nullopt;
        }
        return it->get<double>();
    }

    std::optional<int> integer(const json& obj, const std::string& path, const char* key) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            error(path + "." + key, "missing required field");
            return std::nullopt;
        }
        if (!it->is_number_integer()) {
            error(path + "." + key, "expected an integer");
            return std::nullopt;
        }
        return it->get<int>();
    }

    std::optional<std::string> string(const json& obj, const std::string& path, const char* key, bool required) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) error(path + "." + key, "missing required field");
            return std::nullopt;
        }
        if (!it->is_string()) {
            error(path + "." + key, "expected a string");
            return std::nullopt;
        }
        return it->get<std::string>();
    }

    std::vector<std::string> string_list(const json& obj, const std::string& path, const char* key) {
        std::vector<std::string> out;
        auto it = obj.find(key);
        if (it == obj.end()) return out;
        if (!it->is_array()) {
            error(path + "." + key, "expected an array of strings");
            return out;
        }
        for (std::size_t n = 0; n < it->size(); ++n) {
            const auto& item = (*it)[n];
            if (!item.is_string()) {
                error(path + "." + key + "[" + std::to_string(n) + "]", "expected a string");
                continue;
            }
            out.push_back(item.get<std::string>());
        }
        return out;
    }

private:
    std::string origin_;
    std::vector<std::string> diags_;
};

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t n = 0; n < byte && n < text.size(); ++n) {
        if (text[n] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

json parse_json(std::string_view text, const std::string& origin) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::string where = origin + ":" + line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw LoadError("syntax error in " + origin, {where + ": " + e.what()});
    }
}

PortRef read_port_ref(Reader& rd, const json& j, const std::string& path) {
    PortRef ref;
    if (!rd.expect_object(j, path)) return ref;
    rd.unknown_keys(j, path, {"k", "port"});
    if (auto k = rd.integer(j, path, "k")) ref.k = *k;
    if (auto p = rd.string(j, path, "port", true)) ref.port = *p;
    return ref;
}

Compartment read_compartment(Reader& rd, const json& j, const std::string& path, double time_scale) {
    Compartment c;
    if (!rd.expect_object(j, path)) return c;
    rd.unknown_keys(j, path, {"k", "i", "j", "kind", "label", "params", "initial_mass"});
    if (auto v = rd.integer(j, path, "k")) c.id.k = *v;
    if (auto v = rd.integer(j, path, "i")) c.id.i = *v;
    if (auto v = rd.integer(j, path, "j")) c.id.j = *v;
    if (auto v = rd.string(j, path, "label", false)) c.label = *v;

    std::optional<Kind> kind;
    if (auto name = rd.string(j, path, "kind", true)) {
        kind = parse_kind(*name);
        if (!kind) rd.error(path + ".kind", "unknown kind '" + *name + "' (expected one of: " + kinds_list() + ")");
    }

    auto im = j.find("initial_mass");
    if (im == j.end()) {
        rd.error(path + ".initial_mass", "missing required field");
    } else if (!im->is_object()) {
        rd.error(path + ".initial_mass", "expected an object mapping material label to kg");
    } else {
        for (const auto& [label, mass] : im->items()) {
            if (!mass.is_number()) {
                rd.error(path + ".initial_mass." + label, "expected a number");
                continue;
            }
            c.initial_mass[label] = mass.get<double>();
        }
    }

    if (!kind) return c;
    c.params = default_params(*kind);

    auto pj = j.find("params");
    if (pj == j.end()) {
        rd.error(path + ".params", "missing required field");
        return c;
    }
    const std::string ppath = path + ".params";
    if (!rd.expect_object(*pj, ppath)) return c;

    std::set<std::string> allowed;
    for (const char* key : string_keys(*kind)) allowed.insert(key);
    for (const auto& spec : numeric_specs(*kind)) allowed.insert(spec.key);
    if (*kind == Kind::Source) allowed.insert("makeup_connections");
    rd.unknown_keys(*pj, ppath, allowed);

    if (*kind == Kind::Transformer) {
        auto& p = std::get<TransformerParams>(c.params);
        if (auto v = rd.string(*pj, ppath, "input_material", true)) p.input_material = *v;
        if (auto v = rd.string(*pj, ppath, "output_material", true)) p.output_material = *v;
    } else if (auto v = rd.string(*pj, ppath, "material", true)) {
        std::visit(
            [&](auto& p) {
                if constexpr (requires { p.material; }) p.material = *v;
            },
            c.params);
    }
    if (auto* src = std::get_if<SourceParams>(&c.params)) {
        src->makeup_connections = rd.string_list(*pj, ppath, "makeup_connections");
    }

    for (const auto& spec : numeric_specs(*kind)) {
        auto v = rd.number(*pj, ppath, spec.key, spec.required);
        double value = v.value_or(spec.fallback);
        if (v && spec.dim == Dim::Time) value *= time_scale;
        if (v && spec.dim == Dim::Rate) value /= time_scale;
        set_param(c, spec.key, value);
    }
    if (auto* s = std::get_if<SorterParams>(&c.params)) {
        const bool has_tp = pj->contains("throughput");
        const bool has_items = pj->contains("item_rate") && pj->contains("item_mass");
        if (!has_tp && !has_items) {
            rd.error(ppath, "sorter needs either 'throughput' or both 'item_rate' and 'item_mass'");
        } else if (!has_tp && s->item_rate > 0.0 && s->item_mass > 0.0) {
            s->throughput = throughput_from_items(s->item_rate, s->item_mass);
        }
    }
    return c;
}

}  // namespace

Network parse_network(std::string_view text, std::string_view origin_view, LoadOptions options) {
    const std::string origin(origin_view);
    const json doc = parse_json(text, origin);
    Reader rd(origin);
    Network net;

    if (!doc.is_object()) throw LoadError("schema error in " + origin, {origin + ": $: expected a JSON object"});
    rd.unknown_keys(doc, "$", {"name", "description", "materials", "compartments", "connections", "unsustainable",
                               "return", "simulation", "rankine"});
    if (auto v = rd.string(doc, "$", "name", false)) net.name = *v;
    if (auto v = rd.string(doc, "$", "description", false)) net.description = *v;

    double time_scale = 1.0;
    if (auto sim = doc.find("simulation"); sim == doc.end()) {
        rd.error("$.simulation", "missing required field");
    } else if (rd.expect_object(*sim, "$.simulation")) {
        rd.unknown_keys(*sim, "$.simulation", {"dt", "horizon", "method", "time_unit_seconds"});
        if (auto v = rd.number(*sim, "$.simulation", "time_unit_seconds", false)) {
            if (*v > 0.0) {
                time_scale = *v;
            } else {
                rd.error("$.simulation.time_unit_seconds", "must be positive");
            }
        }
        if (auto v = rd.number(*sim, "$.simulation", "dt", true)) net.simulation.dt = *v * time_scale;
        if (auto v = rd.number(*sim, "$.simulation", "horizon", true)) net.simulation.horizon = *v * time_scale;
        if (auto v = rd.string(*sim, "$.simulation", "method", false)) {
            if (auto m = parse_method(*v)) {
                net.simulation.method = *m;
            } else {
                rd.error("$.simulation.method", "unknown method '" + *v + "' (expected rk4 or euler)");
            }
        }
    }

    auto array_at = [&](const char* key) -> const json* {
        auto it = doc.find(key);
        if (it == doc.end()) {
            rd.error(std::string("$.") + key, "missing required field");
            return nullptr;
        }
        if (!it->is_array()) {
            rd.error(std::string("$.") + key, "expected an array");
            return nullptr;
        }
        return &*it;
    };

    if (const json* mats = array_at("materials")) {
        for (std::size_t n = 0; n < mats->size(); ++n) {
            const std::string path = "$.materials[" + std::to_string(n) + "]";
            const auto& mj = (*mats)[n];
            if (!rd.expect_object(mj, path)) continue;
            rd.unknown_keys(mj, path, {"index", "label"});
            MaterialType m;
            if (auto v = rd.integer(mj, path, "index")) m.index = *v;
            if (auto v = rd.string(mj, path, "label", true)) m.label = *v;
            net.materials.push_back(std::move(m));
        }
    }
    if (const json* comps = array_at("compartments")) {
        for (std::size_t n = 0; n < comps->size(); ++n) {
            net.compartments.push_back(
                read_compartment(rd, (*comps)[n], "$.compartments[" + std::to_string(n) + "]", time_scale));
        }
    }
    if (const json* conns = array_at("connections")) {
        for (std::size_t n = 0; n < conns->size(); ++n) {
            const std::string path = "$.connections[" + std::to_string(n) + "]";
            const auto& cj = (*conns)[n];
            if (!rd.expect_object(cj, path)) continue;
            rd.unknown_keys(cj, path, {"id", "from", "to"});
            Connection conn;
            if (auto v = rd.string(cj, path, "id", true)) conn.id = *v;
            if (cj.contains("from")) {
                conn.from = read_port_ref(rd, cj["from"], path + ".from");
            } else {
                rd.error(path + ".from", "missing required field");
            }
            if (cj.contains("to")) {
                conn.to = read_port_ref(rd, cj["to"], path + ".to");
            } else {
                rd.error(path + ".to", "missing required field");
            }
            net.connections.push_back(std::move(conn));
        }
    }
    if (array_at("unsustainable")) net.unsustainable = rd.string_list(doc, "$", "unsustainable");
    if (array_at("return")) net.returns = rd.string_list(doc, "$", "return");

    if (!rd.diagnostics().empty()) {
        throw LoadError("schema error in " + origin + " (" + std::to_string(rd.diagnostics().size()) + " problem(s))",
                        rd.diagnostics());
    }
    if (options.validate) {
        auto report = validate(net);
        if (!report.ok()) {
            std::vector<std::string> lines;
            for (const auto& l : report.lines()) lines.push_back(origin + ": " + l);
            throw ValidationError("network '" + net.name + "' in " + origin + " failed validation", std::move(lines));
        }
    }
    return net;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot read " + path.string(), {path.string() + ": cannot open file"});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Network load_network(const std::filesystem::path& path, LoadOptions options) {
    return parse_network(read_text_file(path), path.string(), options);
}

std::string serialize_network(const Network& net) {
    json doc;
    doc["name"] = net.name;
    if (!net.description.empty()) doc["description"] = net.description;
    doc["materials"] = json::array();
    for (const auto& m : net.materials) doc["materials"].push_back({{"index", m.index}, {"label", m.label}});
    doc["compartments"] = json::array();
    for (const auto& c : net.compartments) {
        json cj;
        cj["k"] = c.id.k;
        cj["i"] = c.id.i;
        cj["j"] = c.id.j;
        cj["kind"] = std::string(kind_name(c.kind()));
        if (!c.label.empty()) cj["label"] = c.label;
        json params = json::object();
        if (const auto* t = std::get_if<TransformerParams>(&c.params)) {
            params["input_material"] = t->input_material;
            params["output_material"] = t->output_material;
        } else {
            params["material"] = stored_material(c);
        }
        if (const auto* s = std::get_if<SourceParams>(&c.params); s && !s->makeup_connections.empty()) {
            params["makeup_connections"] = s->makeup_connections;
        }
        for (const auto& name : numeric_param_names(c.kind())) params[name] = get_param(c, name);
        cj["params"] = std::move(params);
        cj["initial_mass"] = json::object();
        for (const auto& [label, mass] : c.initial_mass) cj["initial_mass"][label] = mass;
        doc["compartments"].push_back(std::move(cj));
    }
    doc["connections"] = json::array();
    for (const auto& conn : net.connections) {
        doc["connections"].push_back({{"id", conn.id},
                                      {"from", {{"k", conn.from.k}, {"port", conn.from.port}}},
                                      {"to", {{"k", conn.to.k}, {"port", conn.to.port}}}});
    }
    doc["unsustainable"] = net.unsustainable;
    doc["return"] = net.returns;
    doc["simulation"] = {{"dt", net.simulation.dt},
                         {"horizon", net.simulation.horizon},
                         {"method", std::string(method_name(net.simulation.method))}};
    return doc.dump(2) + "\n";
}

std::optional<RankineState> load_rankine(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const json doc = parse_json(text, path.string());
    auto it = doc.find("rankine");
    if (it == doc.end()) return std::nullopt;
    Reader rd(path.string());
    RankineState st;
    if (rd.expect_object(*it, "$.rankine")) {
        rd.unknown_keys(*it, "$.rankine", {"mass_flow", "enthalpy"});
        if (auto v = rd.number(*it, "$.rankine", "mass_flow", true)) st.mass_flow = *v;
        auto h = it->find("enthalpy");
        if (h == it->end() || !h->is_array() || h->size() != 4) {
            rd.error("$.rankine.enthalpy", "expected an array of four numbers [h1, h2, h3, h4]");
        } else {
            for (std::size_t n = 0; n < 4; ++n) {
                if (!(*h)[n].is_number()) {
                    rd.error("$.rankine.enthalpy[" + std::to_string(n) + "]", "expected a number");
                } else {
                    st.enthalpy[n] = (*h)[n].get<double>();
                }
            }
        }
    }
    if (!rd.diagnostics().empty()) throw LoadError("schema error in " + path.string(), rd.diagnostics());
    return st;
}

std::vector<VariantEntry> load_manifest(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const json doc = parse_json(text, path.string());
    Reader rd(path.string());
    std::vector<VariantEntry> out;
    auto it = doc.find("variants");
    if (!doc.is_object() || it == doc.end() || !it->is_array()) {
        throw LoadError("schema error in " + path.string(), {path.string() + ": $.variants: expected an array"});
    }
    for (std::size_t n = 0; n < it->size(); ++n) {
        const std::string p = "$.variants[" + std::to_string(n) + "]";
        const auto& vj = (*it)[n];
        if (!rd.expect_object(vj, p)) continue;
        rd.unknown_keys(vj, p, {"name", "path"});
        VariantEntry e;
        if (auto v = rd.string(vj, p, "name", true)) e.name = *v;
        if (auto v = rd.string(vj, p, "path", true)) e.path = path.parent_path() / *v;
        out.push_back(std::move(e));
    }
    if (!rd.diagnostics().empty()) throw LoadError("schema error in " + path.string(), rd.diagnostics());
    return out;
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace circuflow

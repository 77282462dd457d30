#include "dynprice/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "dynprice/errors.hpp"
#include "json.hpp"

namespace dynprice {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace {

std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

std::string idx(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

void only_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw InputError(path + " must be an object", path);
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw InputError(join(path, key) + " is not a recognized field", join(path, key));
    }
}

const Json& required(const Json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw InputError(join(path, key) + " missing", join(path, key));
    return *it;
}

double number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw InputError(path + " must be a number", path);
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(path + " must be finite", path);
    return x;
}

double req_number(const Json& obj, const std::string& path, const char* key) {
    return number(required(obj, path, key), join(path, key));
}

std::string req_string(const Json& obj, const std::string& path, const char* key) {
    const auto& v = required(obj, path, key);
    if (!v.is_string()) throw InputError(join(path, key) + " must be a string", join(path, key));
    return v.get<std::string>();
}

std::vector<double> number_array(const Json& v, const std::string& path) {
    if (!v.is_array()) throw InputError(path + " must be an array", path);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], idx(path, i)));
    return out;
}

std::vector<std::optional<double>> optional_array(const Json& v, const std::string& path,
                                                  std::size_t expected) {
    if (!v.is_array()) throw InputError(path + " must be an array", path);
    if (v.size() != expected) {
        throw InputError(path + " must have " + std::to_string(expected) +
                             " entries (one per time point)",
                         path);
    }
    std::vector<std::optional<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_null()) {
            out.emplace_back();
        } else {
            out.emplace_back(number(v[i], idx(path, i)));
        }
    }
    return out;
}

/// Reads optional law fields over `law`; `require` demands a and b.
LinearDemandParams read_law(const Json& obj, const std::string& path, LinearDemandParams law,
                            bool require) {
    auto field = [&](const char* key, double& out, bool needed = false) {
        if (obj.contains(key)) {
            const bool open_ended = std::string_view(key) == "price_hi" && obj[key].is_null();
            out = open_ended ? std::numeric_limits<double>::infinity()
                             : number(obj[key], join(path, key));
        } else if (require && needed) {
            throw InputError(join(path, key) + " missing", join(path, key));
        }
    };
    field("a", law.a, true);
    field("b", law.b, true);
    field("scale", law.scale);
    field("price_lo", law.price_lo);
    field("price_hi", law.price_hi);
    if (obj.contains("cap")) {
        law.cap = obj["cap"].is_null() ? std::numeric_limits<double>::infinity()
                                       : number(obj["cap"], join(path, "cap"));
    }
    try {
        law.validate();
    } catch (const DomainError& e) {
        throw InputError(path + ": " + e.what(), path);
    }
    return law;
}

ValueCurve read_curve(const Json& v, const std::string& path) {
    const std::string kind = req_string(v, path, "kind");
    if (kind == "constant") {
        only_keys(v, path, {"kind", "level"});
        return ValueCurve::constant(req_number(v, path, "level"));
    }
    if (kind == "exponential") {
        only_keys(v, path, {"kind", "level", "rate"});
        return ValueCurve::exponential(req_number(v, path, "level"), req_number(v, path, "rate"));
    }
    if (kind == "table") {
        only_keys(v, path, {"kind", "times", "values"});
        auto t = number_array(required(v, path, "times"), join(path, "times"));
        auto y = number_array(required(v, path, "values"), join(path, "values"));
        try {
            return ValueCurve::table(std::move(t), std::move(y));
        } catch (const DomainError& e) {
            throw InputError(path + ": " + e.what(), path);
        }
    }
    throw InputError(join(path, "kind") + " must be constant, exponential or table",
                     join(path, "kind"));
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

OrderedJson number_or_null(double x) {
    return std::isfinite(x) ? OrderedJson(x) : OrderedJson(nullptr);
}

OrderedJson optional_json(const std::vector<std::optional<double>>& v) {
    OrderedJson a = OrderedJson::array();
    for (const auto& x : v) a.push_back(x ? OrderedJson(*x) : OrderedJson(nullptr));
    return a;
}

OrderedJson curve_json(const ValueCurve& c) {
    OrderedJson o;
    switch (c.kind()) {
        case ValueCurve::Kind::constant:
            o["kind"] = "constant";
            o["level"] = c.level();
            break;
        case ValueCurve::Kind::exponential:
            o["kind"] = "exponential";
            o["level"] = c.level();
            o["rate"] = c.rate();
            break;
        case ValueCurve::Kind::table:
            o["kind"] = "table";
            o["times"] = c.knot_times();
            o["values"] = c.knot_values();
            break;
    }
    return o;
}

void law_json(OrderedJson& o, const LinearDemandParams& law) {
    o["a"] = law.a;
    o["b"] = law.b;
    o["scale"] = law.scale;
    o["cap"] = number_or_null(law.cap);
    o["price_lo"] = law.price_lo;
    o["price_hi"] = number_or_null(law.price_hi);
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw InputError("syntax error at line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ": " + e.what(),
                         "", line, col);
    }
    only_keys(doc, "", {"schema_version", "name", "planner", "distribution", "grid_step", "times",
                        "groups", "revenue_floors", "time_value", "events"});
    const double version = req_number(doc, "", "schema_version");
    if (version != scenario_schema_version) {
        throw InputError("schema_version " + std::to_string(static_cast<int>(version)) +
                             " is not supported (expected " +
                             std::to_string(scenario_schema_version) + ")",
                         "schema_version");
    }

    Scenario s;
    if (doc.contains("name")) s.name = req_string(doc, "", "name");
    if (doc.contains("planner")) {
        const auto p = parse_planner_kind(req_string(doc, "", "planner"));
        if (!p) throw InputError("planner must be base or tvm", "planner");
        s.planner = *p;
    }
    if (doc.contains("distribution")) {
        const auto m = parse_distribution_method(req_string(doc, "", "distribution"));
        if (!m) throw InputError("distribution must be headroom or revshare", "distribution");
        s.method = *m;
    }
    if (doc.contains("grid_step")) s.grid_step = req_number(doc, "", "grid_step");

    s.schedule.times = number_array(required(doc, "", "times"), "times");
    const std::size_t n_times = s.schedule.times.size();
    if (n_times < 2) throw InputError("times needs at least two points", "times");

    const auto& groups = required(doc, "", "groups");
    if (!groups.is_array() || groups.empty()) {
        throw InputError("groups must be a non-empty array", "groups");
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const std::string path = idx("groups", i);
        const auto& g = groups[i];
        only_keys(g, path, {"name", "initial_price", "a", "b", "scale", "cap", "price_lo",
                            "price_hi", "final_sales", "sales_floors"});
        GroupSpec spec;
        spec.name = g.contains("name") ? req_string(g, path, "name") : "group" + std::to_string(i);
        spec.demand = read_law(g, path, {}, true);
        spec.initial_price = req_number(g, path, "initial_price");
        s.groups.push_back(spec);
        s.schedule.final_sales.push_back(req_number(g, path, "final_sales"));
        if (g.contains("sales_floors")) {
            s.schedule.sales_floors.push_back(
                optional_array(g["sales_floors"], join(path, "sales_floors"), n_times));
        } else {
            s.schedule.sales_floors.emplace_back(n_times);
        }
    }
    if (doc.contains("revenue_floors")) {
        s.schedule.revenue_floors = optional_array(doc["revenue_floors"], "revenue_floors", n_times);
    } else {
        s.schedule.revenue_floors.assign(n_times, std::nullopt);
    }

    if (doc.contains("time_value")) {
        const auto& tv = doc["time_value"];
        only_keys(tv, "time_value", {"phi", "kappa"});
        if (tv.contains("phi")) s.time_value.phi = read_curve(tv["phi"], "time_value.phi");
        if (tv.contains("kappa")) s.time_value.kappa = read_curve(tv["kappa"], "time_value.kappa");
    }

    if (doc.contains("events")) {
        const auto& evs = doc["events"];
        if (!evs.is_array()) throw InputError("events must be an array", "events");
        std::vector<LinearDemandParams> current = s.initial_laws();
        for (std::size_t e = 0; e < evs.size(); ++e) {
            const std::string path = idx("events", e);
            only_keys(evs[e], path, {"time", "group", "a", "b", "scale", "cap", "price_lo", "price_hi"});
            DemandEvent ev;
            ev.time = req_number(evs[e], path, "time");
            const double g = req_number(evs[e], path, "group");
            if (g < 0 || g != std::floor(g) || g >= static_cast<double>(s.groups.size())) {
                throw InputError(join(path, "group") + " must be a group index", join(path, "group"));
            }
            ev.group = static_cast<std::size_t>(g);
            ev.law = read_law(evs[e], path, current[ev.group], false);
            current[ev.group] = ev.law;
            s.events.push_back(ev);
        }
    }

    try {
        s.validate();
    } catch (const DomainError& e) {
        throw InputError(e.what());
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open scenario file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s) {
    OrderedJson doc;
    doc["schema_version"] = scenario_schema_version;
    doc["name"] = s.name;
    doc["planner"] = to_string(s.planner);
    doc["distribution"] = to_string(s.method);
    doc["grid_step"] = s.grid_step;
    doc["times"] = s.schedule.times;
    doc["groups"] = OrderedJson::array();
    for (std::size_t i = 0; i < s.groups.size(); ++i) {
        OrderedJson g;
        g["name"] = s.groups[i].name;
        g["initial_price"] = s.groups[i].initial_price;
        law_json(g, s.groups[i].demand);
        g["final_sales"] = s.schedule.final_sales[i];
        g["sales_floors"] = optional_json(s.schedule.sales_floors[i]);
        doc["groups"].push_back(g);
    }
    doc["revenue_floors"] = optional_json(s.schedule.revenue_floors);
    doc["time_value"] = {{"phi", curve_json(s.time_value.phi)},
                         {"kappa", curve_json(s.time_value.kappa)}};
    doc["events"] = OrderedJson::array();
    for (const auto& ev : s.events) {
        OrderedJson e;
        e["time"] = ev.time;
        e["group"] = ev.group;
        law_json(e, ev.law);
        doc["events"].push_back(e);
    }
    return doc.dump(2) + "\n";
}

}  // namespace dynprice

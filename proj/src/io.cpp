#include "loopsmith/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace loopsmith {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const json& field(const json& j, const char* key) {
    if (!j.is_object()) fail("expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(std::string("missing field '") + key + "'");
    return *it;
}

int as_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) fail(what + " must be an integer");
    return j.get<int>();
}

std::vector<int> int_list(const json& j, const std::string& what) {
    if (!j.is_array()) fail(what + " must be an array");
    std::vector<int> out;
    for (auto& x : j) out.push_back(as_int(x, what));
    return out;
}

std::vector<std::vector<int>> int_lists(const json& j, const std::string& what) {
    if (!j.is_array()) fail(what + " must be an array");
    std::vector<std::vector<int>> out;
    for (auto& x : j) out.push_back(int_list(x, what));
    return out;
}

json formula_json(const PPFormula& f) {
    json atoms = json::array();
    for (auto& a : f.atoms) atoms.push_back({{"rel", a.rel}, {"vars", a.vars}});
    json params = json::array();
    for (auto& [v, e] : f.params) params.push_back({v, e});
    return {{"free", f.free}, {"num_vars", f.num_vars}, {"atoms", atoms}, {"params", params}};
}

PPFormula formula_from(const json& j) {
    PPFormula f;
    f.free = int_list(field(j, "free"), "free");
    f.num_vars = as_int(field(j, "num_vars"), "num_vars");
    if (f.num_vars < 0) fail("num_vars must be non-negative");
    const json& atoms = field(j, "atoms");
    if (!atoms.is_array()) fail("atoms must be an array");
    for (auto& a : atoms) {
        const json& rel = field(a, "rel");
        if (!rel.is_string()) fail("atom relation must be a string");
        f.atoms.push_back({rel.get<std::string>(), int_list(field(a, "vars"), "atom vars")});
    }
    if (j.contains("params"))
        for (auto& p : int_lists(j["params"], "params")) {
            if (p.size() != 2) fail("a parameter is a (variable, element) pair");
            f.params.push_back({p[0], p[1]});
        }
    auto in_range = [&](int v) { return v >= 0 && v < f.num_vars; };
    for (int v : f.free)
        if (!in_range(v)) fail("free variable out of range");
    for (auto& a : f.atoms)
        for (int v : a.vars)
            if (!in_range(v)) fail("atom variable out of range");
    for (auto& [v, e] : f.params)
        if (!in_range(v) || e < 0) fail("parameter out of range");
    return f;
}

json script_json(const PPScript& s) {
    json defs = json::array();
    for (auto& d : s.defs) {
        json jd = {{"name", d.name}, {"arity", d.arity}};
        if (d.prim) {
            json p = {{"kind", prim_name(d.prim->kind)}, {"args", d.prim->args}};
            if (!d.prim->input.empty()) p["input"] = d.prim->input;
            jd["prim"] = p;
        } else {
            jd["formula"] = formula_json(d.formula);
        }
        defs.push_back(jd);
    }
    return {{"defs", defs}, {"output", s.output}};
}

PPScript script_from(const json& j) {
    PPScript s;
    const json& defs = field(j, "defs");
    if (!defs.is_array()) fail("defs must be an array");
    for (auto& jd : defs) {
        Definition d;
        const json& nm = field(jd, "name");
        if (!nm.is_string()) fail("definition name must be a string");
        d.name = nm.get<std::string>();
        d.arity = as_int(field(jd, "arity"), "arity");
        if (jd.contains("prim")) {
            const json& p = jd["prim"];
            const json& kind = field(p, "kind");
            if (!kind.is_string()) fail("primitive kind must be a string");
            auto k = prim_from_name(kind.get<std::string>());
            if (!k) fail("unknown primitive kind '" + kind.get<std::string>() + "'");
            Primitive pr{*k, int_list(field(p, "args"), "primitive args"), ""};
            if (p.contains("input")) {
                if (!p["input"].is_string()) fail("primitive input must be a string");
                pr.input = p["input"].get<std::string>();
            }
            d.prim = pr;
        } else if (jd.contains("formula")) {
            d.formula = formula_from(jd["formula"]);
        } else {
            fail("definition '" + d.name + "' has neither prim nor formula");
        }
        s.defs.push_back(std::move(d));
    }
    const json& out = field(j, "output");
    if (!out.is_string()) fail("output must be a string");
    s.output = out.get<std::string>();
    return s;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string instance_to_json(const Instance& in) {
    json edges = json::array();
    for (auto [a, b] : in.g.edges()) edges.push_back({a, b});
    json j = {{"name", in.name}, {"n", in.g.size()}, {"edges", edges}, {"generators", in.gp.generators()}};
    if (!in.fixtures.empty()) {
        json fx = json::object();
        for (auto& [name, rel] : in.fixtures) {
            json ts = json::array();
            for (size_t i = 0; i < rel.size(); ++i) ts.push_back(rel.at(i));
            fx[name] = {{"arity", rel.arity()}, {"tuples", ts}};
        }
        j["fixtures"] = fx;
    }
    return dump(j);
}

Instance instance_from_json(const std::string& text) {
    try {
        json j = parse(text);
        Instance in;
        if (j.contains("name")) {
            if (!j["name"].is_string()) fail("name must be a string");
            in.name = j["name"].get<std::string>();
        }
        int n = as_int(field(j, "n"), "n");
        if (n < 0) fail("n must be non-negative");
        in.g = Digraph(n);
        for (auto& e : int_lists(field(j, "edges"), "edges")) {
            if (e.size() != 2) fail("an edge is a pair of vertices");
            if (e[0] < 0 || e[0] >= n || e[1] < 0 || e[1] >= n) fail("edge endpoint out of range");
            in.g.add_edge(e[0], e[1]);
        }
        std::vector<Perm> gens;
        if (j.contains("generators"))
            for (auto& p : int_lists(j["generators"], "generators")) {
                if (!is_bijection(p, n)) fail("generator is not a permutation of 0..n-1");
                gens.push_back(p);
            }
        in.gp = PermGroup(n, gens);
        if (!in.gp.is_automorphism_group_of(in.g)) fail("generator is not an automorphism of the digraph");
        if (j.contains("fixtures")) {
            const json& fx = j["fixtures"];
            if (!fx.is_object()) fail("fixtures must be an object");
            for (auto& [name, rel] : fx.items()) {
                int ar = as_int(field(rel, "arity"), "fixture arity");
                if (ar < 0) fail("fixture arity must be non-negative");
                auto ts = int_lists(field(rel, "tuples"), "fixture tuples");
                for (auto& t : ts) {
                    if (int(t.size()) != ar) fail("fixture tuple has the wrong arity");
                    for (int x : t)
                        if (x < 0 || x >= n) fail("fixture element out of range");
                }
                in.fixtures[name] = ar == 0 ? KaryRel::nullary(n, !ts.empty()) : KaryRel::from_tuples(n, ar, ts);
            }
        }
        return in;
    } catch (const json::exception& e) {
        fail(std::string("malformed instance: ") + e.what());
    }
}

std::string script_to_json(const PPScript& s) { return dump(script_json(s)); }

PPScript script_from_json(const std::string& text) {
    try {
        return script_from(parse(text));
    } catch (const json::exception& e) {
        fail(std::string("malformed script: ") + e.what());
    }
}

std::string certificate_to_json(const Certificate& c) {
    json j;
    if (c.kind == Certificate::Kind::Pseudoloop) {
        j = {{"kind", "pseudoloop"}, {"orbit", c.orbit}, {"edge", {c.edge.first, c.edge.second}}};
    } else {
        j = {{"kind", "hardness"},
             {"component", c.component},
             {"classes", c.classes},
             {"sigma", c.sigma},
             {"script", script_json(c.script)},
             {"digests", c.digests}};
    }
    j["trace"] = c.trace;
    return dump(j);
}

Certificate certificate_from_json(const std::string& text) {
    try {
        json j = parse(text);
        Certificate c;
        const json& kind = field(j, "kind");
        if (kind == "pseudoloop") {
            c.kind = Certificate::Kind::Pseudoloop;
            c.orbit = as_int(field(j, "orbit"), "orbit");
            auto e = int_list(field(j, "edge"), "edge");
            if (e.size() != 2) fail("edge must be a pair");
            c.edge = {e[0], e[1]};
        } else if (kind == "hardness") {
            c.kind = Certificate::Kind::Hardness;
            c.component = int_list(field(j, "component"), "component");
            c.classes = int_lists(field(j, "classes"), "classes");
            c.sigma = int_lists(field(j, "sigma"), "sigma");
            c.script = script_from(field(j, "script"));
            if (j.contains("digests")) {
                const json& dg = j["digests"];
                if (!dg.is_object()) fail("digests must be an object");
                for (auto& [name, v] : dg.items()) {
                    if (!v.is_string()) fail("digest values must be strings");
                    c.digests[name] = v.get<std::string>();
                }
            }
        } else {
            fail("unknown certificate kind");
        }
        if (j.contains("trace")) {
            if (!j["trace"].is_array()) fail("trace must be an array");
            for (auto& t : j["trace"]) {
                if (!t.is_string()) fail("trace entries must be strings");
                c.trace.push_back(t.get<std::string>());
            }
        }
        return c;
    } catch (const json::exception& e) {
        fail(std::string("malformed certificate: ") + e.what());
    }
}

std::string alpha_to_json(const Alpha& a) {
    json orbits = json::array();
    for (int o = 0; o < a.num_orbits; ++o) orbits.push_back(a.orbit_set(o).elements());
    return dump({{"n", a.n}, {"orbits", orbits}, {"classes", a.classes}, {"class_orbit", a.class_orbit}});
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string to_dot(const Digraph& g, const std::string& name, const std::vector<std::string>& labels) {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n";
    for (int v = 0; v < g.size(); ++v) {
        os << "  " << v;
        if (v < int(labels.size())) os << " [label=\"" << labels[v] << "\"]";
        os << ";\n";
    }
    for (auto [a, b] : g.edges()) os << "  " << a << " -> " << b << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace loopsmith

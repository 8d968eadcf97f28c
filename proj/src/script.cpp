#include "loopsmith/script.hpp"

#include <cstdint>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace loopsmith {

const char* prim_name(PrimKind k) {
    switch (k) {
        case PrimKind::Edge: return "edge";
        case PrimKind::OrbitUnion: return "orbit_union";
        case PrimKind::AlphaPair: return "alpha_pair";
        case PrimKind::AlphaClass: return "alpha_class";
        case PrimKind::TupleOrbit: return "tuple_orbit";
        case PrimKind::Singleton: return "singleton";
        case PrimKind::Input: return "input";
    }
    return "?";
}

std::optional<PrimKind> prim_from_name(const std::string& s) {
    for (auto k : {PrimKind::Edge, PrimKind::OrbitUnion, PrimKind::AlphaPair, PrimKind::AlphaClass,
                   PrimKind::TupleOrbit, PrimKind::Singleton, PrimKind::Input})
        if (s == prim_name(k)) return k;
    return std::nullopt;
}

const Definition* PPScript::find(const std::string& name) const {
    for (auto& d : defs)
        if (d.name == name) return &d;
    return nullptr;
}

const std::string& PPScript::add_primitive(const std::string& name, PrimKind kind, std::vector<int> args,
                                           const std::string& input) {
    Definition d;
    d.name = name;
    d.prim = Primitive{kind, std::move(args), input};
    switch (kind) {
        case PrimKind::Edge:
        case PrimKind::AlphaPair: d.arity = 2; break;
        case PrimKind::OrbitUnion:
        case PrimKind::AlphaClass:
        case PrimKind::Singleton: d.arity = 1; break;
        case PrimKind::TupleOrbit: d.arity = int(d.prim->args.size()); break;
        case PrimKind::Input: d.arity = -1; break;
    }
    defs.push_back(std::move(d));
    return defs.back().name;
}

const std::string& PPScript::add_formula(const std::string& name, PPFormula f) {
    Definition d;
    d.name = name;
    d.arity = int(f.free.size());
    d.formula = std::move(f);
    defs.push_back(std::move(d));
    return defs.back().name;
}

std::vector<std::string> PPScript::validate() const {
    std::vector<std::string> errs;
    std::map<std::string, int> seen;
    for (auto& d : defs) {
        if (seen.count(d.name)) errs.push_back("duplicate definition '" + d.name + "'");
        if (!d.prim) {
            auto& f = d.formula;
            if (int(f.free.size()) != d.arity) errs.push_back("arity of '" + d.name + "' disagrees with its formula");
            for (int v : f.free)
                if (v < 0 || v >= f.num_vars) errs.push_back("free variable out of range in '" + d.name + "'");
            for (auto& a : f.atoms) {
                auto it = seen.find(a.rel);
                if (it == seen.end()) {
                    errs.push_back("'" + d.name + "' refers to undefined '" + a.rel + "'");
                    continue;
                }
                if (it->second >= 0 && it->second != int(a.vars.size()))
                    errs.push_back("'" + d.name + "' uses '" + a.rel + "' with wrong arity");
                for (int v : a.vars)
                    if (v < 0 || v >= f.num_vars) errs.push_back("atom variable out of range in '" + d.name + "'");
            }
        }
        seen[d.name] = d.arity;
    }
    if (!output.empty() && !seen.count(output)) errs.push_back("output '" + output + "' is not defined");
    return errs;
}

PPScript PPScript::pruned() const {
    std::set<std::string> live{output};
    std::vector<bool> keep(defs.size(), false);
    for (size_t i = defs.size(); i-- > 0;) {
        const Definition& d = defs[i];
        if (!live.count(d.name)) continue;
        keep[i] = true;
        if (d.prim) {
            if (!d.prim->input.empty()) live.insert(d.prim->input);
        } else {
            for (auto& a : d.formula.atoms) live.insert(a.rel);
        }
    }
    PPScript out;
    out.output = output;
    for (size_t i = 0; i < defs.size(); ++i)
        if (keep[i]) out.defs.push_back(defs[i]);
    return out;
}

ScriptEvaluator::ScriptEvaluator(const Digraph& g, const PermGroup& gp, const Alpha& alpha,
                                 const NamedStructure* inputs)
    : g_(&g), gp_(&gp), alpha_(&alpha), inputs_(inputs), orbit_of_(alpha.orbit_of) {}

const ScriptEvaluator::Entry& ScriptEvaluator::entry(const std::string& name) const {
    auto it = rels_.find(name);
    if (it == rels_.end()) throw std::invalid_argument("unknown relation '" + name + "'");
    return it->second;
}

const KaryRel& ScriptEvaluator::value(const std::string& name) const {
    const Entry& e = entry(name);
    if (!e.expl) e.expl = blow_up(e.quot, *alpha_);
    return *e.expl;
}

const KaryRel& ScriptEvaluator::quotient(const std::string& name) const {
    const Entry& e = entry(name);
    if (!e.stable) throw std::logic_error("relation '" + name + "' is not alpha-stable");
    return e.quot;
}

void ScriptEvaluator::store(const std::string& name, KaryRel r, bool check_stable) {
    Entry e;
    e.arity = r.arity();
    if (check_stable && r.arity() > 0 && is_alpha_stable(r, *alpha_)) {
        e.stable = true;
        e.quot = project_quotient(r, *alpha_);
    }
    e.expl = std::move(r);
    rels_[name] = std::move(e);
}

void ScriptEvaluator::store_quotient(const std::string& name, KaryRel q) {
    Entry e;
    e.arity = q.arity();
    e.stable = true;
    e.quot = std::move(q);
    rels_[name] = std::move(e);
}

KaryRel ScriptEvaluator::primitive(const Primitive& p, int arity) const {
    int n = g_->size();
    auto vertex = [&](int v) {
        if (v < 0 || v >= n) throw std::invalid_argument("primitive vertex out of range");
        return v;
    };
    switch (p.kind) {
        case PrimKind::Edge: return KaryRel::from_bin(g_->relation());
        case PrimKind::OrbitUnion: {
            if (p.args.empty() || p.args.size() > 2) throw std::invalid_argument("orbit_union takes 1 or 2 orbits");
            Bits s(n);
            for (int v : p.args) s |= alpha_->orbit_set(orbit_of_[vertex(v)]);
            return KaryRel::from_set(s);
        }
        case PrimKind::AlphaPair: {
            if (p.args.size() != 2) throw std::invalid_argument("alpha_pair takes two orbits");
            Bits s = alpha_->orbit_set(orbit_of_[vertex(p.args[0])]) | alpha_->orbit_set(orbit_of_[vertex(p.args[1])]);
            BinRel r(n);
            s.for_each([&](int a) { r.row(a) = alpha_->class_set(alpha_->class_of[a]); });
            return KaryRel::from_bin(r);
        }
        case PrimKind::AlphaClass:
            if (p.args.size() != 1) throw std::invalid_argument("alpha_class takes one vertex");
            return KaryRel::from_set(alpha_->class_set(alpha_->class_of[vertex(p.args[0])]));
        case PrimKind::Singleton: {
            if (p.args.size() != 1) throw std::invalid_argument("singleton takes one vertex");
            Bits s(n);
            s.set(vertex(p.args[0]));
            return KaryRel::from_set(s);
        }
        case PrimKind::TupleOrbit:
            if (p.args.empty()) throw std::invalid_argument("tuple_orbit needs a tuple");
            for (int v : p.args) vertex(v);
            return gp_->orbit_of_tuple(p.args);
        case PrimKind::Input: {
            if (!inputs_ || !inputs_->has(p.input)) throw std::invalid_argument("missing input relation '" + p.input + "'");
            const KaryRel& r = inputs_->get(p.input);
            if (arity >= 0 && r.arity() != arity) throw std::invalid_argument("input arity mismatch");
            return r;
        }
    }
    throw std::logic_error("unhandled primitive");
}

void ScriptEvaluator::define(const Definition& d) {
    if (rels_.count(d.name)) throw std::invalid_argument("duplicate definition '" + d.name + "'");
    if (d.prim) {
        store(d.name, primitive(*d.prim, d.arity));
        return;
    }
    const PPFormula& f = d.formula;
    if (int(f.free.size()) != d.arity) throw std::invalid_argument("arity of '" + d.name + "' disagrees with formula");
    bool quotient_mode = f.params.empty() && !f.free.empty();
    for (auto& a : f.atoms) {
        const Entry& e = entry(a.rel);
        if (e.arity != int(a.vars.size()))
            throw std::invalid_argument("'" + d.name + "' uses '" + a.rel + "' with wrong arity");
        quotient_mode = quotient_mode && e.stable;
    }
    if (quotient_mode) {
        // the class map is a surjective homomorphism between blown-up atoms and quotient atoms
        KaryRel q = evaluate(
            alpha_->num_classes(), [&](const std::string& nm) -> const KaryRel& { return entry(nm).quot; }, f);
        store_quotient(d.name, std::move(q));
        return;
    }
    KaryRel r = evaluate(g_->size(), [&](const std::string& nm) -> const KaryRel& { return value(nm); }, f);
    store(d.name, std::move(r));
}

void ScriptEvaluator::run(const PPScript& s) {
    auto errs = s.validate();
    if (!errs.empty()) throw std::invalid_argument("invalid script: " + errs.front());
    for (auto& d : s.defs) define(d);
}

std::string ScriptEvaluator::digest(const std::string& name) const {
    const Entry& e = entry(name);
    const KaryRel& r = e.stable ? e.quot : value(name);
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](uint64_t x) {
        for (int b = 0; b < 8; ++b) {
            h ^= (x >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(e.stable);
    mix(uint64_t(r.domain()));
    mix(uint64_t(r.arity()));
    mix(r.size());
    for (size_t i = 0; i < r.size(); ++i)
        for (int j = 0; j < r.arity(); ++j) mix(uint64_t(r.tuple(i)[j]));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace loopsmith

#include "loopsmith/pipeline.hpp"
#include "loopsmith/paths.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace loopsmith {

namespace {

int least(const std::vector<int>& c) { return *std::min_element(c.begin(), c.end()); }

}  // namespace

Pipeline::Pipeline(const Digraph& g, const PermGroup& gp, PipelineOptions opt)
    : g_(g), gp_(gp), opt_(opt), alpha_(compute_alpha(g, gp)), ev_(g, gp, alpha_) {
    set_domain(Bits(g.size(), true), "");
}

void Pipeline::expect(bool ok, const std::string& what) const {
    if (!ok) throw std::logic_error("construction check failed: " + what);
}

std::string Pipeline::fresh(const std::string& hint) {
    for (;;) {
        int& n = names_[hint];
        std::string name = n == 0 ? hint : hint + "_" + std::to_string(n);
        ++n;
        if (!script_.has(name)) return name;
    }
}

std::string Pipeline::define(const std::string& hint, const PPFormula& f) {
    Definition d;
    d.name = fresh(hint);
    d.arity = int(f.free.size());
    d.formula = f;
    ev_.define(d);
    script_.add_formula(d.name, f);
    return d.name;
}

std::string Pipeline::primitive(PrimKind kind, const std::vector<int>& args, const std::string& hint) {
    std::string key = prim_name(kind);
    for (int a : args) key += "," + std::to_string(a);
    auto it = prim_cache_.find(key);
    if (it != prim_cache_.end()) return it->second;
    Definition d;
    d.name = fresh(hint);
    d.prim = Primitive{kind, args, ""};
    d.arity = kind == PrimKind::TupleOrbit ? int(args.size())
              : (kind == PrimKind::Edge || kind == PrimKind::AlphaPair) ? 2
                                                                         : 1;
    ev_.define(d);
    script_.add_primitive(d.name, kind, args);
    prim_cache_[key] = d.name;
    return d.name;
}

void Pipeline::dom_atom(PPFormula& f, int v) {
    if (!dom_name_.empty()) f.add(dom_name_, {v});
}

std::string Pipeline::E() {
    std::string e = primitive(PrimKind::Edge, {}, "E");
    if (dom_name_.empty()) return e;
    auto it = dom_cache_.find("E");
    if (it != dom_cache_.end()) return it->second;
    PPFormula f;
    f.num_vars = 2;
    f.free = {0, 1};
    f.add(e, {0, 1});
    dom_atom(f, 0);
    dom_atom(f, 1);
    return dom_cache_["E"] = define("E_d" + std::to_string(stage_), f);
}

std::string Pipeline::orb(int o) {
    std::string p = primitive(PrimKind::OrbitUnion, {alpha_.orbit_set(o).first()}, "O" + std::to_string(o));
    if (dom_name_.empty()) return p;
    std::string key = "O" + std::to_string(o);
    auto it = dom_cache_.find(key);
    if (it != dom_cache_.end()) return it->second;
    PPFormula f;
    f.num_vars = 1;
    f.free = {0};
    f.add(p, {0});
    dom_atom(f, 0);
    return dom_cache_[key] = define(key + "_d" + std::to_string(stage_), f);
}

std::string Pipeline::orb_union(int o, int p) {
    if (o == p) return orb(o);
    if (o > p) std::swap(o, p);
    std::string tag = "O" + std::to_string(o) + "u" + std::to_string(p);
    std::string prim =
        primitive(PrimKind::OrbitUnion, {alpha_.orbit_set(o).first(), alpha_.orbit_set(p).first()}, tag);
    if (dom_name_.empty()) return prim;
    auto it = dom_cache_.find(tag);
    if (it != dom_cache_.end()) return it->second;
    PPFormula f;
    f.num_vars = 1;
    f.free = {0};
    f.add(prim, {0});
    dom_atom(f, 0);
    return dom_cache_[tag] = define(tag + "_d" + std::to_string(stage_), f);
}

std::string Pipeline::cls(int c) {
    return primitive(PrimKind::AlphaClass, {least(alpha_.classes[c])}, "A" + std::to_string(c));
}

std::string Pipeline::alpha_op(int o, int p) {
    if (o == p) return alpha_o(o);
    if (o > p) std::swap(o, p);
    std::string tag = "alpha" + std::to_string(o) + "_" + std::to_string(p);
    std::string prim =
        primitive(PrimKind::AlphaPair, {alpha_.orbit_set(o).first(), alpha_.orbit_set(p).first()}, tag);
    if (dom_name_.empty()) return prim;
    auto it = dom_cache_.find(tag);
    if (it != dom_cache_.end()) return it->second;
    PPFormula f;
    f.num_vars = 2;
    f.free = {0, 1};
    f.add(prim, {0, 1});
    dom_atom(f, 0);
    dom_atom(f, 1);
    return dom_cache_[tag] = define(tag + "_d" + std::to_string(stage_), f);
}

std::string Pipeline::alpha_o(int o) {
    std::string key = "alpha" + std::to_string(o);
    auto it = dom_cache_.find(key);
    if (it != dom_cache_.end()) return it->second;
    OrbitView v(g_, alpha_.orbit_of);
    int p = -1;
    for (int q = 0; q < v.num_orbits() && p < 0; ++q)
        if (q != o && (v.quotient().has_edge(o, q) || v.quotient().has_edge(q, o))) p = q;
    expect(p >= 0, "orbit without a neighbour");
    int a = std::min(o, p), b = std::max(o, p);
    std::string prim = primitive(PrimKind::AlphaPair, {alpha_.orbit_set(a).first(), alpha_.orbit_set(b).first()},
                                 "alpha" + std::to_string(a) + "_" + std::to_string(b));
    PPFormula f;
    f.num_vars = 2;
    f.free = {0, 1};
    f.add(prim, {0, 1});
    f.add(orb(o), {0});
    f.add(orb(o), {1});
    return dom_cache_[key] = define(key + "_d" + std::to_string(stage_), f);
}

std::string Pipeline::tuple_orbit(const std::vector<int>& t) {
    std::string prim = primitive(PrimKind::TupleOrbit, t, "Orb" + std::to_string(t.size()));
    if (dom_name_.empty()) return prim;
    std::string key = "T";
    for (int x : t) key += "," + std::to_string(x);
    auto it = dom_cache_.find(key);
    if (it != dom_cache_.end()) return it->second;
    PPFormula f;
    f.num_vars = int(t.size());
    for (int i = 0; i < f.num_vars; ++i) f.free.push_back(i);
    f.add(prim, f.free);
    dom_atom(f, 0);
    return dom_cache_[key] = define("Orb" + std::to_string(t.size()) + "_d" + std::to_string(stage_), f);
}

std::string Pipeline::ig() {
    auto it = dom_cache_.find("I");
    if (it != dom_cache_.end()) return it->second;
    const auto& cl = view_.cls;
    int m = int(cl.size());
    std::vector<int> reps;
    for (int c : cl) reps.push_back(least(alpha_.classes[c]));
    std::string orbit = tuple_orbit(reps);
    PPFormula f;
    f.num_vars = 2 * m;
    for (int i = 0; i < m; ++i) f.free.push_back(i);
    f.add(orbit, [&] {
        std::vector<int> vs;
        for (int i = 0; i < m; ++i) vs.push_back(m + i);
        return vs;
    }());
    for (int i = 0; i < m; ++i) f.add(alpha_o(alpha_.class_orbit[cl[i]]), {m + i, i});
    return dom_cache_["I"] = define("I_d" + std::to_string(stage_), f);
}

int Pipeline::add_path(PPFormula& f, int start, const AbstractPath& p, const std::vector<std::string>& constrain) {
    std::string e = E();
    int cur = start;
    for (Dir d : p.steps) {
        int v = f.fresh();
        if (d == Dir::Fwd)
            f.add(e, {cur, v});
        else
            f.add(e, {v, cur});
        for (auto& c : constrain) f.add(c, {v});
        cur = v;
    }
    return cur;
}

Pipeline::ClassView Pipeline::view_of(const Bits& d) const {
    ClassView v;
    v.local.assign(alpha_.num_classes(), -1);
    for (int c = 0; c < alpha_.num_classes(); ++c)
        if (d.test(alpha_.classes[c][0])) {
            v.local[c] = int(v.cls.size());
            v.cls.push_back(c);
        }
    v.quotient = Digraph(int(v.cls.size()));
    for (auto [a, b] : g_.edges())
        if (d.test(a) && d.test(b)) {
            int x = v.local[alpha_.class_of[a]], y = v.local[alpha_.class_of[b]];
            if (!v.quotient.has_edge(x, y)) v.quotient.add_edge(x, y);
        }
    std::set<int> orbs;
    d.for_each([&](int x) { orbs.insert(alpha_.orbit_of[x]); });
    v.orbits.assign(orbs.begin(), orbs.end());
    return v;
}

Bits Pipeline::blow(const Bits& local_set, const ClassView& v) const {
    Bits r(g_.size());
    local_set.for_each([&](int i) { r |= alpha_.class_set(v.cls[i]); });
    return r;
}

Bits Pipeline::local_classes(const Bits& vertices, const ClassView& v) const {
    Bits r(int(v.cls.size()));
    vertices.for_each([&](int x) {
        int l = v.local[alpha_.class_of[x]];
        if (l >= 0) r.set(l);
    });
    return r;
}

BinRel Pipeline::to_quotient(const BinRel& r, const ClassView& v) const {
    BinRel q(int(v.cls.size()));
    for (int a = 0; a < r.size(); ++a) {
        int x = v.local[alpha_.class_of[a]];
        if (x < 0) continue;
        r.row(a).for_each([&](int b) {
            int y = v.local[alpha_.class_of[b]];
            if (y >= 0) q.set(x, y);
        });
    }
    return q;
}

bool Pipeline::omega_stable(const Bits& s) const {
    for (int o : view_.orbits) {
        Bits os = orbit_set_in(o);
        if (os.intersects(s) && !os.subset_of(s)) return false;
    }
    return s.subset_of(dom_);
}

void Pipeline::set_domain(const Bits& d, const std::string& name) {
    dom_ = d;
    dom_name_ = name;
    ++stage_;
    dom_cache_.clear();
    action_.reset();
    view_ = view_of(d);
    int m = int(view_.cls.size());
    k_ = smallest_linked_k(view_.quotient, 2 * m * m + 2);
}

bool Pipeline::full_power() const { return view_.quotient.relation().power(k_).is_full(); }

const std::vector<Pipeline::GroupElt>& Pipeline::class_action() {
    if (action_) return *action_;
    std::vector<Perm> gens = dom_.all() ? gp_.generators() : setwise_stabiliser(gp_, dom_);
    int nc = alpha_.num_classes();
    auto cls_perm = [&](const Perm& p) {
        std::vector<int> r(nc);
        for (int c = 0; c < nc; ++c) r[c] = alpha_.class_of[p[alpha_.classes[c][0]]];
        return r;
    };
    std::vector<GroupElt> elts;
    std::map<std::vector<int>, int> seen;
    GroupElt id{cls_perm(perm_identity(g_.size())), perm_identity(g_.size())};
    seen[id.cls] = 0;
    elts.push_back(id);
    for (size_t i = 0; i < elts.size(); ++i)
        for (auto& gn : gens) {
            Perm p = perm_compose(gn, elts[i].perm);
            auto c = cls_perm(p);
            if (seen.count(c)) continue;
            if (elts.size() >= opt_.max_group) throw ResourceLimit("class action exceeds --max-group-closure");
            seen[c] = int(elts.size());
            elts.push_back({std::move(c), std::move(p)});
        }
    action_ = std::move(elts);
    return *action_;
}

// ---------------------------------------------------------------------------- smooth subsets

Pipeline::SmoothDef Pipeline::smooth_subset(const Bits& c) {
    SmoothDef s;
    std::vector<Bits> sets{c};
    s.nodes.push_back({UExpr::Base});
    std::map<Bits, int> seen{{c, 0}};
    BinRel e = g_.relation().restrict(dom_);
    auto orbit_count = [&](const Bits& x) {
        std::set<int> o;
        x.for_each([&](int v) { o.insert(alpha_.orbit_of[v]); });
        return int(o.size());
    };
    for (size_t i = 0; i < sets.size() && sets.size() < 4096; ++i) {
        Bits x = sets[i];
        Bits sm = smooth_part(g_, x);
        if (sm.any() && sm != dom_) {
            s.nodes.push_back({UExpr::Smooth, int(i), -1, orbit_count(x)});
            s.root = int(s.nodes.size()) - 1;
            s.set = sm;
            return s;
        }
        auto push = [&](const Bits& y, UExpr ex) {
            if (y.none() || seen.count(y)) return;
            seen[y] = int(sets.size());
            sets.push_back(y);
            s.nodes.push_back(ex);
        };
        push(e.image(x), {UExpr::Fwd, int(i)});
        push(e.preimage(x), {UExpr::Bwd, int(i)});
        for (size_t j = 0; j < i; ++j) push(x & sets[j], {UExpr::Meet, int(i), int(j)});
    }
    throw std::logic_error("no smooth proper subset is tree-definable from the given set");
}

void Pipeline::inline_expr(PPFormula& f, const SmoothDef& s, int node, int var, const std::string& base,
                           std::vector<size_t>* base_atoms) {
    const UExpr& ex = s.nodes[node];
    switch (ex.op) {
        case UExpr::Base:
            if (base_atoms) base_atoms->push_back(f.atoms.size());
            f.add(base, {var});
            return;
        case UExpr::Fwd: {
            int z = f.fresh();
            inline_expr(f, s, ex.a, z, base, base_atoms);
            f.add(E(), {z, var});
            return;
        }
        case UExpr::Bwd: {
            int z = f.fresh();
            inline_expr(f, s, ex.a, z, base, base_atoms);
            f.add(E(), {var, z});
            return;
        }
        case UExpr::Meet:
            inline_expr(f, s, ex.a, var, base, base_atoms);
            inline_expr(f, s, ex.b, var, base, base_atoms);
            return;
        case UExpr::Smooth: {
            inline_expr(f, s, ex.a, var, base, base_atoms);
            for (int dir = 0; dir < 2; ++dir) {
                int prev = var;
                for (int i = 0; i < ex.len; ++i) {
                    int z = f.fresh();
                    if (dir == 0)
                        f.add(E(), {prev, z});
                    else
                        f.add(E(), {z, prev});
                    inline_expr(f, s, ex.a, z, base, base_atoms);
                    prev = z;
                }
            }
            return;
        }
    }
}

std::string Pipeline::define_set_expr(const SmoothDef& s, const std::string& base, const std::string& hint) {
    PPFormula f;
    int x = f.fresh();
    f.free = {x};
    inline_expr(f, s, s.root, x, base, nullptr);
    std::string name = define(hint, f);
    expect(unary(name) == s.set, "tree definition of the smooth subset");
    return name;
}

Pipeline::Fence Pipeline::restricted_fence(const SmoothDef& s, const std::string& base, const std::string& hname,
                                           int m) {
    Fence fe;
    PPFormula& f = fe.f;
    int x0 = f.fresh();
    f.add(hname, {x0});
    std::string e = E();
    int cur = x0;
    AbstractPath p = AbstractPath::fence(k_, m);
    for (size_t i = 0; i < p.steps.size(); ++i) {
        int v = f.fresh();
        if (p.steps[i] == Dir::Fwd)
            f.add(e, {cur, v});
        else
            f.add(e, {v, cur});
        if (i + 1 < p.steps.size()) inline_expr(f, s, s.root, v, base, &fe.base_atoms);
        cur = v;
    }
    f.add(hname, {cur});
    f.free = {x0, cur};
    return fe;
}

// ---------------------------------------------------------------------------- master

namespace {

// Drops every formula atom whose removal leaves the defined relation unchanged.
PPScript drop_redundant_atoms(const Digraph& g, const PermGroup& gp, const Alpha& alpha, const PPScript& s,
                               std::map<std::string, std::string>& digests) {
    PPScript out;
    out.output = s.output;
    ScriptEvaluator ev(g, gp, alpha);
    const std::string probe = "\x01probe";
    for (Definition d : s.defs) {
        if (!d.prim && d.formula.atoms.size() > 1) {
            ev.define(d);
            std::string want = ev.digest(d.name);
            ev.undefine(d.name);
            for (size_t i = d.formula.atoms.size(); i-- > 0 && d.formula.atoms.size() > 1;) {
                Definition t = d;
                t.name = probe;
                t.formula.atoms.erase(t.formula.atoms.begin() + long(i));
                ev.define(t);
                bool same = ev.digest(probe) == want;
                ev.undefine(probe);
                if (same) d.formula = t.formula;
            }
        }
        ev.define(d);
        digests[d.name] = ev.digest(d.name);
        out.defs.push_back(std::move(d));
    }
    return out;
}

}  // namespace

Certificate run_master(const Digraph& g, const PermGroup& gp, const PipelineOptions& opt) {
    Certificate c;
    OrbitQuotient oq = orbit_digraph(g, gp);
    if (oq.loop_witness) {
        c.kind = Certificate::Kind::Pseudoloop;
        c.edge = *oq.loop_witness;
        c.orbit = oq.orbit_of[c.edge.first];
        return c;
    }
    if (!is_smooth(g)) throw PreconditionError("digraph is not smooth");
    auto walk = find_unit_walk(g);
    if (!walk) throw PreconditionError("no closed walk of algebraic length 1");
    Pipeline p(g, gp, opt);
    int start = walk->vertices.front();
    Bits comp(g.size());
    for (auto& wc : weak_components(g))
        if (std::find(wc.begin(), wc.end(), start) != wc.end())
            for (int v : wc) comp.set(v);
    if (!comp.all()) {
        Reduction r = p.component_domain(comp, start);
        p.set_domain(r.domain, r.name);
    }
    SigmaOr s = p.run_loop();
    c.kind = Certificate::Kind::Hardness;
    PPScript full = p.script();
    full.output = s.name;
    std::map<std::string, std::string> dg;
    c.script = drop_redundant_atoms(g, gp, p.alpha(), full.pruned(), dg).pruned();
    for (auto& d : c.script.defs) c.digests[d.name] = dg[d.name];
    c.sigma = s.blocks;
    c.component = comp.elements();
    c.classes = p.alpha().classes;
    c.trace = p.trace();
    return c;
}

Reduction Pipeline::component_domain(const Bits& comp, int vertex) {
    ClassView v = view_of(comp);
    int m = int(v.cls.size());
    int k = smallest_linked_k(v.quotient, 2 * m * m + 2);
    expect(k >= 1, "component quotient is not linked");
    Linkedness l = linkedness(v.quotient, k);
    PPFormula f;
    int a = f.fresh();
    f.add(cls(alpha_.class_of[vertex]), {a});
    int x = add_path(f, a, AbstractPath::fence(k, l.saturation));
    f.free = {x};
    std::string name = define("H0", f);
    expect(unary(name) == comp, "component definition");
    if (opt_.checks) expect(is_reductionistic(comp, gp_), "component is reductionistic");
    trace_.push_back("component: " + std::to_string(comp.count()) + " vertices, fence k=" + std::to_string(k));
    return {comp, name};
}

SigmaOr Pipeline::run_loop() {
    for (;;) {
        int before = int(view_.cls.size());
        expect(k_ >= 1, "domain quotient is not k-linked for any k");
        std::optional<Reduction> red;
        if (full_power()) {
            red = step_full_case();
        } else {
            MarcinResult m = step_marcinsmagic();
            std::optional<UnaryOr> u;
            if (auto* c = std::get_if<CentralRel>(&m)) {
                OrPair o = step_central_to_or(*c);
                LinkResult l = step_or_to_unary(o);
                if (auto* r = std::get_if<Reduction>(&l))
                    red = *r;
                else
                    u = std::get<UnaryOr>(l);
            } else {
                TsrResult t = step_tsr_to_sigma(std::get<TsrOr>(m));
                if (auto* s = std::get_if<SigmaOr>(&t)) return *s;
                u = std::get<UnaryOr>(t);
            }
            if (u) {
                FinalResult f = step_unary_to_sigma(*u);
                if (auto* s = std::get_if<SigmaOr>(&f)) return *s;
                red = std::get<Reduction>(f);
            }
        }
        set_domain(red->domain, red->name);
        expect(int(view_.cls.size()) < before, "reduction decreases the number of classes");
    }
}

// ---------------------------------------------------------------------------- verification

std::vector<std::string> licensing_errors(const Digraph& g, const PermGroup& gp, const PPScript& s) {
    std::vector<std::string> errs;
    int n = g.size();
    auto orb = gp.orbit_ids();
    OrbitView v(g, orb);
    auto in_range = [&](const std::vector<int>& a) {
        return std::all_of(a.begin(), a.end(), [&](int x) { return x >= 0 && x < n; });
    };
    for (auto& d : s.defs) {
        if (!d.prim) {
            if (!d.formula.params.empty()) errs.push_back("unlicensed-parameter in '" + d.name + "'");
            continue;
        }
        const Primitive& p = *d.prim;
        bool ok = in_range(p.args);
        switch (p.kind) {
            case PrimKind::Edge: ok = ok && p.args.empty(); break;
            case PrimKind::OrbitUnion: ok = ok && !p.args.empty() && p.args.size() <= 2; break;
            case PrimKind::AlphaPair:
                ok = ok && p.args.size() == 2;
                if (ok) {
                    int a = orb[p.args[0]], b = orb[p.args[1]];
                    ok = a != b && (v.quotient().has_edge(a, b) || v.quotient().has_edge(b, a));
                }
                break;
            case PrimKind::AlphaClass: ok = ok && p.args.size() == 1; break;
            case PrimKind::TupleOrbit: ok = ok && !p.args.empty(); break;
            case PrimKind::Singleton:
            case PrimKind::Input: ok = false; break;
        }
        if (!ok) errs.push_back("unlicensed-primitive '" + d.name + "' (" + prim_name(p.kind) + ")");
    }
    return errs;
}

VerifyResult verify_certificate(const Digraph& g, const PermGroup& gp, const Certificate& c) {
    VerifyResult res;
    auto fail = [&](const std::string& r) { res.reasons.push_back(r); };
    if (gp.degree() != g.size() || !gp.is_automorphism_group_of(g)) {
        fail("group-not-automorphic");
        return res;
    }
    auto orb = gp.orbit_ids();
    if (c.kind == Certificate::Kind::Pseudoloop) {
        auto [a, b] = c.edge;
        bool ok = a >= 0 && b >= 0 && a < g.size() && b < g.size() && g.has_edge(a, b) && orb[a] == orb[b] &&
                  (c.orbit < 0 || c.orbit == orb[a]);
        if (!ok) fail("pseudoloop-witness-invalid");
        res.ok = res.reasons.empty();
        return res;
    }
    OrbitQuotient oq = orbit_digraph(g, gp);
    if (oq.loop_witness) fail("quotient-has-loop");
    for (auto& e : c.script.validate()) fail("script-invalid: " + e);
    for (auto& e : licensing_errors(g, gp, c.script)) fail(e);
    Alpha alpha = compute_alpha(g, gp);
    if (alpha.classes != c.classes) fail("alpha-mismatch");
    // σ: disjoint non-empty blocks of valid classes, at least two
    Bits seen(alpha.num_classes());
    bool blocks_ok = c.sigma.size() >= 2;
    for (auto& b : c.sigma) {
        blocks_ok = blocks_ok && !b.empty();
        for (int x : b) {
            if (x < 0 || x >= alpha.num_classes() || seen.test(x)) {
                blocks_ok = false;
                break;
            }
            seen.set(x);
        }
    }
    if (!blocks_ok) fail("sigma-not-proper-or-mismatch");
    if (!res.reasons.empty()) return res;
    Bits comp = Bits::from(g.size(), c.component);
    bool comp_ok = !c.component.empty() && (comp.all() || is_reductionistic(comp, gp));
    for (auto& wc : weak_components_on(g, comp)) comp_ok = comp_ok && int(wc.size()) == comp.count();
    if (!comp_ok) fail("component-invalid");
    ScriptEvaluator ev(g, gp, alpha);
    try {
        ev.run(c.script);
    } catch (const std::exception& e) {
        fail(std::string("replay-failed: ") + e.what());
        return res;
    }
    std::set<std::string> used;
    for (auto& d : c.script.pruned().defs) used.insert(d.name);
    for (auto& d : c.script.defs) {
        if (!used.count(d.name)) fail("unused-definition '" + d.name + "'");
        auto it = c.digests.find(d.name);
        if (it == c.digests.end())
            fail("digest-missing '" + d.name + "'");
        else if (it->second != ev.digest(d.name))
            fail("digest-mismatch '" + d.name + "'");
    }
    for (auto& [name, dg] : c.digests)
        if (!c.script.has(name)) fail("digest-unknown '" + name + "'");
    if (ev.arity(c.script.output) != 4) {
        fail("output-arity");
        return res;
    }
    Bits dom(g.size());
    BinRel sigma(g.size());
    for (auto& b : c.sigma) {
        Bits s(g.size());
        for (int x : b) s |= alpha.class_set(x);
        dom |= s;
        s.for_each([&](int x) { sigma.row(x) = s; });
    }
    if (!dom.subset_of(comp)) fail("component-invalid");
    KaryRel sr = KaryRel::from_bin(sigma);
    KaryRel expected = or_relation(sr, sr, dom);
    if (ev.value(c.script.output) != expected) fail("sigma-not-proper-or-mismatch");
    res.ok = res.reasons.empty();
    return res;
}

}  // namespace loopsmith

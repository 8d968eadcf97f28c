#include "loopsmith/polymorphism.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "loopsmith/alpha_pairs.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/limits.hpp"
#include "loopsmith/paths.hpp"

namespace loopsmith {

IdentitySpec IdentitySpec::siggers4() {
    IdentitySpec s;
    s.arity = 4;
    s.symbols = 3;
    s.equations.push_back({{0, 1, 2, 0}, {1, 0, 1, 2}});
    return s;
}

std::vector<std::string> IdentitySpec::errors() const {
    std::vector<std::string> out;
    if (arity < 1) out.push_back("arity must be positive");
    if (symbols < 1) out.push_back("at least one symbol required");
    for (size_t i = 0; i < equations.size(); ++i) {
        auto& [l, r] = equations[i];
        if (int(l.size()) != arity || int(r.size()) != arity)
            out.push_back("equation " + std::to_string(i) + ": side length differs from arity");
        for (int x : l)
            if (x < 0 || x >= symbols) out.push_back("equation " + std::to_string(i) + ": symbol out of range");
        for (int x : r)
            if (x < 0 || x >= symbols) out.push_back("equation " + std::to_string(i) + ": symbol out of range");
    }
    return out;
}

namespace {

size_t ipow(size_t b, int e) {
    size_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

size_t encode(const std::vector<int>& t, int n) {
    size_t c = 0;
    for (int x : t) c = c * size_t(n) + size_t(x);
    return c;
}

// Calls f(tuple) for every tuple of the given length over 0..n-1, in lexicographic order.
template <class F>
void for_tuples(int n, int len, F&& f) {
    std::vector<int> t(len, 0);
    if (n <= 0 && len > 0) return;
    while (true) {
        f(t);
        int i = len - 1;
        while (i >= 0 && ++t[i] == n) t[i--] = 0;
        if (i < 0) return;
    }
}

struct UnionFind {
    std::vector<size_t> p;
    explicit UnionFind(size_t n) : p(n) { std::iota(p.begin(), p.end(), size_t(0)); }
    size_t find(size_t x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) p[std::max(a, b)] = std::min(a, b);
    }
};

using Mask = uint64_t;

struct Constraint {
    const KaryRel* rel;
    std::vector<int> scope;
};

class Solver {
public:
    Solver(int n, int vars, std::vector<Constraint> cons, std::vector<int> order)
        : n_(n), cons_(std::move(cons)), watch_(vars), order_(std::move(order)) {
        for (size_t c = 0; c < cons_.size(); ++c) {
            std::set<int> seen(cons_[c].scope.begin(), cons_[c].scope.end());
            for (int v : seen) watch_[v].push_back(int(c));
        }
    }

    std::optional<std::vector<int>> solve(std::vector<Mask> dom, size_t* nodes) {
        std::vector<int> all(cons_.size());
        std::iota(all.begin(), all.end(), 0);
        if (!propagate(dom, all)) return std::nullopt;
        if (search(dom, nodes)) {
            std::vector<int> out(dom.size());
            for (size_t v = 0; v < dom.size(); ++v) out[v] = __builtin_ctzll(dom[v]);
            return out;
        }
        return std::nullopt;
    }

private:
    // Generalised arc consistency on one constraint; returns the variables whose domain shrank.
    bool revise(std::vector<Mask>& dom, const Constraint& c, std::vector<int>& changed) {
        int q = int(c.scope.size());
        std::vector<Mask> support(q, 0);
        const KaryRel& r = *c.rel;
        for (size_t i = 0; i < r.size(); ++i) {
            const int* t = r.tuple(i);
            bool ok = true;
            for (int j = 0; j < q && ok; ++j) {
                if (!((dom[c.scope[j]] >> t[j]) & 1)) ok = false;
                for (int k = 0; k < j && ok; ++k)
                    if (c.scope[k] == c.scope[j] && t[k] != t[j]) ok = false;
            }
            if (!ok) continue;
            for (int j = 0; j < q; ++j) support[j] |= Mask(1) << t[j];
        }
        for (int j = 0; j < q; ++j) {
            int v = c.scope[j];
            Mask nd = dom[v] & support[j];
            if (nd != dom[v]) {
                dom[v] = nd;
                changed.push_back(v);
            }
            if (!nd) return false;
        }
        return true;
    }

    bool propagate(std::vector<Mask>& dom, const std::vector<int>& initial) {
        std::deque<int> queue(initial.begin(), initial.end());
        std::vector<char> queued(cons_.size(), 0);
        for (int c : initial) queued[c] = 1;
        std::vector<int> changed;
        while (!queue.empty()) {
            int c = queue.front();
            queue.pop_front();
            queued[c] = 0;
            changed.clear();
            if (!revise(dom, cons_[c], changed)) return false;
            for (int v : changed)
                for (int d : watch_[v])
                    if (!queued[d]) {
                        queued[d] = 1;
                        queue.push_back(d);
                    }
        }
        return true;
    }

    bool search(std::vector<Mask>& dom, size_t* nodes) {
        int best = -1, best_size = n_ + 1;
        for (size_t v = 0; v < dom.size(); ++v) {
            int s = __builtin_popcountll(dom[v]);
            if (s > 1 && s < best_size) {
                best = int(v);
                best_size = s;
            }
        }
        if (best < 0) return true;
        for (int val : order_) {
            if (!((dom[best] >> val) & 1)) continue;
            if (nodes) ++*nodes;
            std::vector<Mask> next = dom;
            next[best] = Mask(1) << val;
            if (propagate(next, watch_[best]) && search(next, nodes)) {
                dom = std::move(next);
                return true;
            }
        }
        return false;
    }

    int n_;
    std::vector<Constraint> cons_;
    std::vector<std::vector<int>> watch_;
    std::vector<int> order_;
};

}  // namespace

int OpTable::operator()(const std::vector<int>& args) const {
    if (int(args.size()) != arity) throw std::invalid_argument("operation applied to wrong number of arguments");
    return values.at(encode(args, n));
}

OpTable OpTable::projection(int n, int arity, int coord) {
    OpTable f{n, arity, {}};
    f.values.reserve(ipow(size_t(n), arity));
    for_tuples(n, arity, [&](const std::vector<int>& t) { f.values.push_back(t[coord]); });
    return f;
}

NamedStructure as_structure(const Digraph& g, const std::string& edge) {
    NamedStructure s(g.size());
    s.add(edge, g.relation());
    return s;
}

std::optional<OpTable> find_polymorphism(const NamedStructure& s, const IdentitySpec& spec, SearchStats* stats) {
    auto errs = spec.errors();
    if (!errs.empty()) throw std::invalid_argument("identity spec: " + errs.front());
    int n = s.n;
    int limit = guard_limit(spec.arity >= 4 ? 5 : 8);
    if (n > limit) throw GuardError("domain of " + std::to_string(n) + " elements exceeds the search guard of " +
                                    std::to_string(limit));
    if (n > 64) throw GuardError("domain larger than 64 elements is not supported");
    if (n == 0) return OpTable{0, spec.arity, {}};
    size_t cells = ipow(size_t(n), spec.arity);
    if (cells > (size_t(1) << 24)) throw GuardError("indicator structure too large");

    UnionFind uf(cells);
    for (auto& [lhs, rhs] : spec.equations)
        for_tuples(n, spec.symbols, [&](const std::vector<int>& asg) {
            std::vector<int> l(spec.arity), r(spec.arity);
            for (int i = 0; i < spec.arity; ++i) {
                l[i] = asg[lhs[i]];
                r[i] = asg[rhs[i]];
            }
            uf.unite(encode(l, n), encode(r, n));
        });
    std::vector<int> var_of(cells, -1);
    int vars = 0;
    for (size_t c = 0; c < cells; ++c) {
        size_t root = uf.find(c);
        if (var_of[root] < 0) var_of[root] = vars++;
        var_of[c] = var_of[root];
    }

    std::vector<Mask> dom(vars, n == 64 ? ~Mask(0) : (Mask(1) << n) - 1);
    std::vector<Constraint> cons;
    std::set<std::pair<const KaryRel*, std::vector<int>>> seen;
    std::vector<long> degree(n, 0);
    for (auto& [name, rel] : s.rels) {
        if (rel.domain() != n) throw std::invalid_argument("relation " + name + " has a different domain");
        int q = rel.arity();
        for (size_t i = 0; i < rel.size(); ++i)
            for (int j = 0; j < q; ++j) ++degree[rel.tuple(i)[j]];
        if (q == 0) {
            if (rel.empty()) return std::nullopt;
            continue;
        }
        size_t m = rel.size();
        if (m == 0) {
            // every choice is vacuous
            continue;
        }
        if (double(ipow(m, spec.arity)) > 2e7) throw GuardError("too many constraints for relation " + name);
        std::vector<int> pick(spec.arity, 0);
        for_tuples(int(m), spec.arity, [&](const std::vector<int>& idx) {
            std::vector<int> scope(q);
            std::vector<int> args(spec.arity);
            for (int j = 0; j < q; ++j) {
                for (int i = 0; i < spec.arity; ++i) args[i] = rel.tuple(idx[i])[j];
                scope[j] = var_of[encode(args, n)];
            }
            if (q == 1) {
                Mask allowed = 0;
                for (size_t t = 0; t < m; ++t) allowed |= Mask(1) << rel.tuple(t)[0];
                dom[scope[0]] &= allowed;
                return;
            }
            if (seen.insert({&rel, scope}).second) cons.push_back({&rel, scope});
        });
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return degree[a] > degree[b]; });

    Solver solver(n, vars, cons, order);
    size_t nodes = 0;
    for (Mask m : dom)
        if (!m) return std::nullopt;
    auto sol = solver.solve(dom, &nodes);
    if (stats) *stats = {size_t(vars), cons.size(), nodes};
    if (!sol) return std::nullopt;
    OpTable f{n, spec.arity, std::vector<int>(cells)};
    for (size_t c = 0; c < cells; ++c) f.values[c] = (*sol)[var_of[c]];
    return f;
}

std::vector<std::string> check_polymorphism(const NamedStructure& s, const IdentitySpec& spec, const OpTable& f) {
    std::vector<std::string> out;
    int n = s.n;
    if (f.n != n || f.arity != spec.arity || f.values.size() != ipow(size_t(n), f.arity)) {
        out.push_back("table shape does not match");
        return out;
    }
    for (int v : f.values)
        if (v < 0 || v >= n) {
            out.push_back("value out of range");
            return out;
        }
    for (auto& [lhs, rhs] : spec.equations)
        for_tuples(n, spec.symbols, [&](const std::vector<int>& asg) {
            std::vector<int> l, r;
            for (int i = 0; i < spec.arity; ++i) {
                l.push_back(asg[lhs[i]]);
                r.push_back(asg[rhs[i]]);
            }
            if (f(l) != f(r) && out.size() < 10) out.push_back("identity violated");
        });
    for (auto& [name, rel] : s.rels) {
        int q = rel.arity();
        int m = int(rel.size());
        if (q == 0 || m == 0) continue;
        for_tuples(m, f.arity, [&](const std::vector<int>& idx) {
            std::vector<int> img(q), args(f.arity);
            for (int j = 0; j < q; ++j) {
                for (int i = 0; i < f.arity; ++i) args[i] = rel.tuple(idx[i])[j];
                img[j] = f(args);
            }
            if (!rel.contains(img) && out.size() < 10) out.push_back("relation " + name + " not preserved");
        });
    }
    return out;
}

SiggersGraph siggers_graph(const std::vector<int>& a, const std::vector<int>& e, const std::vector<int>& r,
                           const std::vector<OpTable>& ops, int rounds, size_t max_vertices) {
    if (a.size() != e.size() || a.size() != r.size()) throw std::invalid_argument("tuples of different lengths");
    SiggersGraph out;
    std::map<std::vector<int>, int> id;
    auto vertex = [&](const std::vector<int>& t) {
        auto it = id.find(t);
        if (it != id.end()) return it->second;
        int v = int(out.vertices.size());
        id[t] = v;
        out.vertices.push_back(t);
        return v;
    };
    int va = vertex(a), vr = vertex(r), ve = vertex(e);
    std::set<std::pair<int, int>> edges{{va, vr}, {vr, va}, {va, ve}, {ve, vr}};
    size_t len = a.size();
    for (int round = 0; round < rounds; ++round) {
        std::vector<std::pair<int, int>> cur(edges.begin(), edges.end());
        size_t before = edges.size();
        for (auto& op : ops) {
            if (double(ipow(cur.size(), op.arity)) > 5e6) {
                out.truncated = true;
                break;
            }
            for_tuples(int(cur.size()), op.arity, [&](const std::vector<int>& idx) {
                if (out.truncated) return;
                std::vector<int> src(len), dst(len), sa(op.arity), da(op.arity);
                for (size_t c = 0; c < len; ++c) {
                    for (int i = 0; i < op.arity; ++i) {
                        sa[i] = out.vertices[cur[idx[i]].first][c];
                        da[i] = out.vertices[cur[idx[i]].second][c];
                    }
                    src[c] = op(sa);
                    dst[c] = op(da);
                }
                if (out.vertices.size() + 2 > max_vertices && (!id.count(src) || !id.count(dst))) {
                    out.truncated = true;
                    return;
                }
                int s = vertex(src), d = vertex(dst);
                edges.insert({s, d});
            });
        }
        out.rounds = round + 1;
        if (out.truncated || edges.size() == before) break;
    }
    out.g = Digraph(int(out.vertices.size()), std::vector<std::pair<int, int>>(edges.begin(), edges.end()));
    return out;
}

namespace {

Digraph pattern_graph() { return Digraph(3, {{0, 2}, {2, 1}, {0, 1}, {1, 0}}); }

PPFormula sum_formula(const std::string& set, const std::string& edge, bool forward) {
    PPFormula f;
    f.num_vars = 2;
    f.free = {1};
    f.add(set, {0});
    f.add(edge, forward ? std::vector<int>{0, 1} : std::vector<int>{1, 0});
    return f;
}

}  // namespace

SiggerscrapReport check_siggerscrap(const Digraph& g, const PermGroup& gp) {
    OrbitQuotient oq = orbit_digraph(g, gp);
    if (oq.quotient.size() != 3) throw ShapeError("orbit quotient has " + std::to_string(oq.quotient.size()) +
                                                  " vertices, expected 3");
    Digraph pat = pattern_graph();
    SiggerscrapReport rep;
    std::vector<int> p{0, 1, 2};
    do {
        bool iso = true;
        for (int x = 0; x < 3 && iso; ++x)
            for (int y = 0; y < 3 && iso; ++y)
                if (pat.has_edge(x, y) != oq.quotient.has_edge(p[x], p[y])) iso = false;
        if (iso) {
            rep.orbit = p;
            break;
        }
    } while (std::next_permutation(p.begin(), p.end()));
    if (rep.orbit.empty()) throw ShapeError("orbit quotient is not the three-vertex pattern");
    if (!is_smooth(g)) throw ShapeError("digraph is not smooth");

    Alpha alpha = compute_alpha(g, gp);
    // orbit ids of alpha follow the point orbits of the group
    auto to_orbit = [&](int pv) { return alpha.orbit_of[oq.orbits[rep.orbit[pv]][0]]; };
    PPScript& sc = rep.script;
    sc.add_primitive("E", PrimKind::Edge, {});
    std::vector<std::string> w(3);
    for (int i = 0; i < 3; ++i) {
        w[i] = "W" + std::to_string(i);
        sc.add_primitive(w[i], PrimKind::OrbitUnion, {alpha.orbit_set(to_orbit(i)).first()});
    }
    sc.add_formula("W0f", sum_formula(w[0], "E", true));
    sc.add_formula("U01", sum_formula("W0f", "E", true));
    sc.add_formula("U02", sum_formula(w[1], "E", false));
    PPFormula alias;
    alias.num_vars = 1;
    alias.free = {0};
    alias.add("W0f", {0});
    sc.add_formula("U12", alias);

    AlphaPairDef ap = alpha_on_pairs_ppdef(g, gp, alpha, to_orbit(0), to_orbit(1));
    std::map<std::string, std::string> rename;
    auto pattern_of = [&](int orbit) {
        for (int i = 0; i < 3; ++i)
            if (to_orbit(i) == orbit) return i;
        throw std::logic_error("unknown orbit");
    };
    for (auto& d : ap.script.defs) {
        if (d.prim && d.prim->kind == PrimKind::Edge) {
            rename[d.name] = "E";
        } else if (d.prim && d.prim->kind == PrimKind::OrbitUnion) {
            std::vector<int> ps;
            for (int v : d.prim->args) ps.push_back(pattern_of(alpha.orbit_of[v]));
            std::sort(ps.begin(), ps.end());
            rename[d.name] = ps.size() == 1 ? w[ps[0]] : "U" + std::to_string(ps[0]) + std::to_string(ps[1]);
        } else if (d.prim) {
            throw std::logic_error("unexpected primitive in the pair definition");
        } else {
            PPFormula f = d.formula;
            for (auto& at : f.atoms) at.rel = rename.at(at.rel);
            std::string nm = "ap_" + d.name;
            sc.add_formula(nm, f);
            rename[d.name] = nm;
        }
    }
    std::string a01 = rename.at(ap.script.output);

    PPFormula fa;
    fa.num_vars = 6;  // x y u u' v v'
    fa.free = {0, 1};
    fa.add("E", {0, 2});
    fa.add(a01, {2, 3});
    fa.add("E", {1, 3});
    fa.add("E", {4, 0});
    fa.add(a01, {4, 5});
    fa.add("E", {5, 1});
    sc.add_formula("alpha", fa);
    sc.output = "alpha";

    ScriptEvaluator ev(g, gp, alpha);
    ev.run(sc);
    auto oset = [&](int i) { return alpha.orbit_set(to_orbit(i)); };
    rep.union01 = ev.value("U01").to_set() == (oset(0) | oset(1));
    rep.union02 = ev.value("U02").to_set() == (oset(0) | oset(2));
    rep.union12 = ev.value("U12").to_set() == (oset(1) | oset(2));
    rep.alpha_formula = ev.value("alpha").to_bin() == alpha.relation();
    return rep;
}

}  // namespace loopsmith

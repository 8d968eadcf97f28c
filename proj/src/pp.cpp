#include "loopsmith/pp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

namespace loopsmith {

void NamedStructure::add(const std::string& name, KaryRel r) {
    if (r.domain() != n) throw std::invalid_argument("relation '" + name + "' has the wrong domain");
    rels[name] = std::move(r);
}

const KaryRel& NamedStructure::get(const std::string& name) const {
    auto it = rels.find(name);
    if (it == rels.end()) throw std::invalid_argument("unknown relation '" + name + "'");
    return it->second;
}

std::vector<int> PPFormula::existential() const {
    std::vector<char> isfree(num_vars, 0);
    for (int v : free) isfree[v] = 1;
    std::vector<int> out;
    for (int v = 0; v < num_vars; ++v)
        if (!isfree[v]) out.push_back(v);
    return out;
}

namespace {

size_t g_budget = 60000000;

struct Table {
    std::vector<int> vars;
    std::vector<int> data;
    size_t rows() const { return vars.empty() ? nullary : data.size() / vars.size(); }
    size_t nullary = 0;  // row count when vars is empty (0 or 1)
    bool empty() const { return rows() == 0; }
    bool has(int v) const { return std::find(vars.begin(), vars.end(), v) != vars.end(); }
};

int bits_for(int n) {
    int b = 1;
    while ((1 << b) < n) ++b;
    return b;
}

void check_budget(size_t ints) {
    if (g_budget && ints > g_budget) throw ResourceLimit("intermediate table exceeds tuple budget");
}

void dedup(Table& t, int n) {
    int k = int(t.vars.size());
    if (k == 0) return;
    size_t m = t.data.size() / k;
    if (m < 2) return;
    int b = bits_for(n);
    if (b * k <= 64) {
        std::vector<uint64_t> keys(m);
        for (size_t i = 0; i < m; ++i) {
            uint64_t key = 0;
            for (int j = 0; j < k; ++j) key = (key << b) | uint64_t(t.data[i * k + j]);
            keys[i] = key;
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        t.data.resize(keys.size() * k);
        uint64_t mask = b == 64 ? ~uint64_t(0) : (uint64_t(1) << b) - 1;
        for (size_t i = 0; i < keys.size(); ++i) {
            uint64_t key = keys[i];
            for (int j = k - 1; j >= 0; --j) {
                t.data[i * k + j] = int(key & mask);
                key >>= b;
            }
        }
        return;
    }
    std::vector<size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    auto row = [&](size_t i) { return t.data.begin() + i * k; };
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t c) { return std::lexicographical_compare(row(a), row(a) + k, row(c), row(c) + k); });
    std::vector<int> out;
    out.reserve(t.data.size());
    for (size_t j = 0; j < m; ++j) {
        auto r = row(idx[j]);
        if (!out.empty() && std::equal(r, r + k, out.end() - k)) continue;
        out.insert(out.end(), r, r + k);
    }
    t.data.swap(out);
}

Table atom_table(const KaryRel& r, const std::vector<int>& args) {
    Table t;
    std::vector<int> first(args.size());
    for (size_t i = 0; i < args.size(); ++i) {
        auto it = std::find(t.vars.begin(), t.vars.end(), args[i]);
        if (it == t.vars.end()) {
            first[i] = int(t.vars.size());
            t.vars.push_back(args[i]);
        } else {
            first[i] = int(it - t.vars.begin());
        }
    }
    if (args.empty()) {
        t.nullary = r.empty() ? 0 : 1;
        return t;
    }
    int k = int(t.vars.size());
    std::vector<int> pos(k, -1);
    for (size_t i = 0; i < args.size(); ++i)
        if (pos[first[i]] < 0) pos[first[i]] = int(i);
    bool repeats = k < int(args.size());
    t.data.reserve(r.size() * k);
    for (size_t i = 0; i < r.size(); ++i) {
        const int* tp = r.tuple(i);
        if (repeats) {
            bool ok = true;
            for (size_t j = 0; j < args.size() && ok; ++j) ok = tp[j] == tp[pos[first[j]]];
            if (!ok) continue;
        }
        for (int j = 0; j < k; ++j) t.data.push_back(tp[pos[j]]);
    }
    return t;
}

// Natural join of a and b, keeping only variables accepted by keep.
template <class Keep>
Table join(const Table& a, const Table& b, int n, Keep&& keep) {
    Table out;
    if (a.empty() || b.empty()) {
        for (int v : a.vars)
            if (keep(v)) out.vars.push_back(v);
        for (int v : b.vars)
            if (keep(v) && !a.has(v)) out.vars.push_back(v);
        return out;
    }
    const Table& build = a.rows() <= b.rows() ? a : b;
    const Table& probe = a.rows() <= b.rows() ? b : a;
    std::vector<std::pair<int, int>> shared;  // (pos in build, pos in probe)
    for (int i = 0; i < int(build.vars.size()); ++i)
        for (int j = 0; j < int(probe.vars.size()); ++j)
            if (build.vars[i] == probe.vars[j]) shared.emplace_back(i, j);
    // output columns: (0 = build / 1 = probe, position)
    std::vector<std::pair<int, int>> cols;
    bool dropped = false;
    for (int i = 0; i < int(build.vars.size()); ++i) {
        if (keep(build.vars[i])) {
            cols.emplace_back(0, i);
            out.vars.push_back(build.vars[i]);
        } else {
            dropped = true;
        }
    }
    for (int j = 0; j < int(probe.vars.size()); ++j) {
        bool sh = false;
        for (auto& s : shared) sh |= s.second == j;
        if (sh) continue;
        if (keep(probe.vars[j])) {
            cols.emplace_back(1, j);
            out.vars.push_back(probe.vars[j]);
        } else {
            dropped = true;
        }
    }
    int kb = int(build.vars.size()), kp = int(probe.vars.size());
    size_t nb = build.rows(), np = probe.rows();
    auto emit = [&](const int* rb, const int* rp) {
        if (cols.empty()) {
            out.nullary = 1;
            return;
        }
        for (auto [side, p] : cols) out.data.push_back(side == 0 ? rb[p] : rp[p]);
    };
    int bw = bits_for(n);
    bool packed = bw * int(shared.size()) <= 64;
    auto bptr = [&](size_t i) { return kb ? build.data.data() + i * kb : nullptr; };
    auto pptr = [&](size_t i) { return kp ? probe.data.data() + i * kp : nullptr; };
    size_t limit_ints = g_budget ? g_budget : SIZE_MAX;
    if (packed) {
        std::unordered_map<uint64_t, std::vector<uint32_t>> index;
        index.reserve(nb * 2);
        for (size_t i = 0; i < nb; ++i) {
            uint64_t key = 0;
            for (auto& s : shared) key = (key << bw) | uint64_t(bptr(i)[s.first]);
            index[key].push_back(uint32_t(i));
        }
        for (size_t j = 0; j < np; ++j) {
            uint64_t key = 0;
            for (auto& s : shared) key = (key << bw) | uint64_t(pptr(j)[s.second]);
            auto it = index.find(key);
            if (it == index.end()) continue;
            for (uint32_t i : it->second) {
                emit(bptr(i), pptr(j));
                if (out.data.size() > limit_ints) {
                    if (!dropped) throw ResourceLimit("intermediate table exceeds tuple budget");
                    dedup(out, n);
                    if (out.data.size() > limit_ints / 2) throw ResourceLimit("intermediate table exceeds tuple budget");
                }
            }
            if (cols.empty() && out.nullary) return out;
        }
    } else {
        std::unordered_map<std::string, std::vector<uint32_t>> index;
        auto keyof = [&](const int* r, bool isb) {
            std::string k;
            for (auto& s : shared) {
                int v = r[isb ? s.first : s.second];
                k.append(reinterpret_cast<const char*>(&v), sizeof v);
            }
            return k;
        };
        for (size_t i = 0; i < nb; ++i) index[keyof(bptr(i), true)].push_back(uint32_t(i));
        for (size_t j = 0; j < np; ++j) {
            auto it = index.find(keyof(pptr(j), false));
            if (it == index.end()) continue;
            for (uint32_t i : it->second) {
                emit(bptr(i), pptr(j));
                if (out.data.size() > limit_ints) {
                    if (!dropped) throw ResourceLimit("intermediate table exceeds tuple budget");
                    dedup(out, n);
                    if (out.data.size() > limit_ints / 2) throw ResourceLimit("intermediate table exceeds tuple budget");
                }
            }
        }
    }
    if (dropped) dedup(out, n);
    return out;
}

}  // namespace

void set_tuple_budget(size_t tuples) { g_budget = tuples; }
size_t tuple_budget() { return g_budget; }

KaryRel evaluate(int n, const RelationLookup& lookup, const PPFormula& f) {
    for (int v : f.free)
        if (v < 0 || v >= f.num_vars) throw std::invalid_argument("free variable out of range");
    std::vector<Table> factors;
    for (auto& a : f.atoms) {
        const KaryRel& r = lookup(a.rel);
        if (r.arity() != int(a.vars.size()))
            throw std::invalid_argument("arity mismatch for relation '" + a.rel + "'");
        if (r.domain() != n) throw std::invalid_argument("domain mismatch for relation '" + a.rel + "'");
        for (int v : a.vars)
            if (v < 0 || v >= f.num_vars) throw std::invalid_argument("atom variable out of range");
        factors.push_back(atom_table(r, a.vars));
    }
    for (auto [v, e] : f.params) {
        if (v < 0 || v >= f.num_vars || e < 0 || e >= n) throw std::invalid_argument("parameter out of range");
        Table t;
        t.vars = {v};
        t.data = {e};
        factors.push_back(std::move(t));
    }
    int k = int(f.free.size());
    for (auto& t : factors)
        if (t.empty()) return k == 0 ? KaryRel::nullary(n, false) : KaryRel(n, k);

    std::vector<char> isfree(f.num_vars, 0);
    for (int v : f.free) isfree[v] = 1;
    std::set<int> pending;
    for (int v = 0; v < f.num_vars; ++v)
        if (!isfree[v]) pending.insert(v);

    auto occurrences = [&](int v) {
        std::vector<int> idx;
        for (int i = 0; i < int(factors.size()); ++i)
            if (factors[i].has(v)) idx.push_back(i);
        return idx;
    };
    // Joins the factors at idx into one, projecting out every pending variable confined to them.
    auto merge = [&](std::vector<int> idx) {
        std::vector<char> in_group(factors.size(), 0);
        for (int i : idx) in_group[i] = 1;
        std::vector<int> outside_count(f.num_vars, 0);
        for (int i = 0; i < int(factors.size()); ++i)
            if (!in_group[i])
                for (int v : factors[i].vars) ++outside_count[v];
        std::vector<int> inside_left(f.num_vars, 0);
        for (int i : idx)
            for (int v : factors[i].vars) ++inside_left[v];
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return factors[a].rows() < factors[b].rows(); });
        std::vector<char> used(idx.size(), 0);
        Table acc = factors[idx[0]];
        used[0] = 1;
        for (int v : acc.vars) --inside_left[v];
        auto keep = [&](int v) { return isfree[v] || outside_count[v] > 0 || inside_left[v] > 0; };
        {
            // project the seed before joining
            Table unit;
            unit.nullary = 1;
            acc = join(unit, acc, n, keep);
        }
        for (size_t step = 1; step < idx.size(); ++step) {
            int best = -1, best_shared = -1;
            for (size_t j = 0; j < idx.size(); ++j) {
                if (used[j]) continue;
                int sh = 0;
                for (int v : factors[idx[j]].vars) sh += acc.has(v);
                if (sh > best_shared || (sh == best_shared && factors[idx[j]].rows() < factors[idx[best]].rows()))
                    best = int(j), best_shared = sh;
            }
            used[best] = 1;
            for (int v : factors[idx[best]].vars) --inside_left[v];
            acc = join(acc, factors[idx[best]], n, keep);
            if (acc.empty()) break;
        }
        std::vector<Table> next;
        for (int i = 0; i < int(factors.size()); ++i)
            if (!in_group[i]) next.push_back(std::move(factors[i]));
        next.push_back(std::move(acc));
        factors.swap(next);
        for (auto it = pending.begin(); it != pending.end();) {
            bool present = false;
            for (auto& t : factors) present |= t.has(*it);
            it = present ? std::next(it) : pending.erase(it);
        }
    };

    while (!pending.empty()) {
        int best = -1;
        double best_cost = 0;
        for (int v : pending) {
            auto idx = occurrences(v);
            std::set<int> uni;
            double prod = 1;
            for (int i : idx) {
                for (int w : factors[i].vars) uni.insert(w);
                prod *= double(std::max<size_t>(1, factors[i].rows()));
            }
            double cap = std::pow(double(std::max(n, 1)), double(uni.size()));
            double cost = std::min(prod, cap);
            if (best < 0 || cost < best_cost) best = v, best_cost = cost;
        }
        auto idx = occurrences(best);
        if (idx.empty()) {
            pending.erase(best);
            continue;
        }
        merge(idx);
        if (factors.back().empty()) return k == 0 ? KaryRel::nullary(n, false) : KaryRel(n, k);
    }

    Table acc;
    acc.nullary = 1;
    {
        std::vector<int> idx(factors.size());
        std::iota(idx.begin(), idx.end(), 0);
        if (!idx.empty()) {
            merge(idx);
            acc = factors.back();
        }
    }
    if (acc.empty()) return k == 0 ? KaryRel::nullary(n, false) : KaryRel(n, k);
    if (k == 0) return KaryRel::nullary(n, true);
    // free variables without atoms range over the whole domain
    for (int v : f.free) {
        if (acc.has(v)) continue;
        Table dom;
        dom.vars = {v};
        for (int e = 0; e < n; ++e) dom.data.push_back(e);
        acc = join(acc, dom, n, [](int) { return true; });
    }
    std::vector<int> pos;
    for (int v : f.free) pos.push_back(int(std::find(acc.vars.begin(), acc.vars.end(), v) - acc.vars.begin()));
    std::vector<int> data;
    size_t m = acc.rows();
    int w = int(acc.vars.size());
    data.reserve(m * k);
    for (size_t i = 0; i < m; ++i)
        for (int p : pos) data.push_back(acc.data[i * w + p]);
    return KaryRel::from_flat(n, k, std::move(data));
}

KaryRel evaluate(const NamedStructure& s, const PPFormula& f) {
    return evaluate(s.n, [&](const std::string& name) -> const KaryRel& { return s.get(name); }, f);
}

KaryRel evaluate_naive(const NamedStructure& s, const PPFormula& f) {
    for (auto& a : f.atoms)
        if (s.get(a.rel).arity() != int(a.vars.size()))
            throw std::invalid_argument("arity mismatch for relation '" + a.rel + "'");
    int k = int(f.free.size());
    std::vector<int> asg(f.num_vars, 0);
    std::vector<int> fixed(f.num_vars, -1);
    for (auto [v, e] : f.params) {
        if (fixed[v] >= 0 && fixed[v] != e) return k == 0 ? KaryRel::nullary(s.n, false) : KaryRel(s.n, k);
        fixed[v] = e;
    }
    bool any = false;
    std::vector<int> data;
    if (s.n == 0 && f.num_vars > 0) return k == 0 ? KaryRel::nullary(s.n, false) : KaryRel(s.n, k);
    for (int v = 0; v < f.num_vars; ++v) asg[v] = fixed[v] >= 0 ? fixed[v] : 0;
    std::vector<int> t;
    while (true) {
        bool ok = true;
        for (auto& a : f.atoms) {
            t.clear();
            for (int v : a.vars) t.push_back(asg[v]);
            const KaryRel& r = s.get(a.rel);
            if (!(a.vars.empty() ? !r.empty() : r.contains(t))) {
                ok = false;
                break;
            }
        }
        if (ok) {
            any = true;
            for (int v : f.free) data.push_back(asg[v]);
        }
        int v = f.num_vars - 1;
        for (; v >= 0; --v) {
            if (fixed[v] >= 0) continue;
            if (++asg[v] < s.n) break;
            asg[v] = 0;
        }
        if (v < 0) break;
    }
    if (k == 0) return KaryRel::nullary(s.n, any);
    return KaryRel::from_flat(s.n, k, std::move(data));
}

bool is_tree(const PPFormula& f) {
    // bipartite incidence graph: variables 0..V-1, atoms V.., parameters count as unary atoms
    int V = f.num_vars;
    int A = int(f.atoms.size()) + int(f.params.size());
    int nodes = V + A;
    if (nodes == 0) return false;
    std::vector<int> parent(nodes);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    int edges = 0;
    auto link = [&](int a, int b) {
        ++edges;
        int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[ra] = rb;
        return true;
    };
    int node = V;
    for (auto& a : f.atoms) {
        for (int v : a.vars)
            if (!link(v, node)) return false;
        ++node;
    }
    for (auto& p : f.params) {
        if (!link(p.first, node)) return false;
        ++node;
    }
    return edges == nodes - 1;
}

PPFormula lift_tree_def(const PPFormula& f, const std::function<std::string(int)>& class_name) {
    if (!is_tree(f)) throw std::invalid_argument("lift_tree_def: formula is not a tree");
    if (f.free.size() != 1) throw std::invalid_argument("lift_tree_def: output must be unary");
    PPFormula out;
    out.free = f.free;
    out.num_vars = f.num_vars;
    out.atoms = f.atoms;
    for (auto [v, c] : f.params) out.atoms.push_back({class_name(c), {v}});
    return out;
}

KaryRel or_relation(const KaryRel& r, const KaryRel& s) {
    Bits dom(r.domain(), true);
    return or_relation(r, s, dom);
}

KaryRel or_relation(const KaryRel& r, const KaryRel& s, const Bits& dom) {
    if (r.domain() != s.domain()) throw std::invalid_argument("or_relation: domain mismatch");
    int n = r.domain(), a = r.arity(), b = s.arity();
    auto elems = dom.elements();
    std::vector<int> data;
    auto fill = [&](const KaryRel& fixed, bool left) {
        int free_ar = left ? b : a;
        size_t total = 1;
        for (int i = 0; i < free_ar; ++i) total *= elems.size();
        check_budget(fixed.size() * total * size_t(a + b));
        std::vector<int> idx(free_ar, 0);
        for (size_t i = 0; i < fixed.size(); ++i) {
            std::fill(idx.begin(), idx.end(), 0);
            for (size_t c = 0; c < total; ++c) {
                if (!left)
                    for (int j = 0; j < free_ar; ++j) data.push_back(elems[idx[j]]);
                for (int j = 0; j < fixed.arity(); ++j) data.push_back(fixed.tuple(i)[j]);
                if (left)
                    for (int j = 0; j < free_ar; ++j) data.push_back(elems[idx[j]]);
                for (int j = free_ar - 1; j >= 0; --j) {
                    if (++idx[j] < int(elems.size())) break;
                    idx[j] = 0;
                }
            }
        }
    };
    if (a == 0 || b == 0) throw std::invalid_argument("or_relation: arities must be positive");
    fill(r, true);
    fill(s, false);
    return KaryRel::from_flat(n, a + b, std::move(data));
}

std::vector<int> ig_representatives(const Alpha& alpha) {
    std::vector<int> t;
    for (auto& c : alpha.classes) t.push_back(*std::min_element(c.begin(), c.end()));
    return t;
}

KaryRel build_IG(const PermGroup& gp, const Alpha& alpha) {
    KaryRel orbit = gp.orbit_of_tuple(ig_representatives(alpha));
    return blow_up(project_quotient(orbit, alpha), alpha);
}

std::vector<int> ig_coordinates(const Alpha& alpha, const Bits& m) {
    std::vector<int> cols;
    for (int c = 0; c < alpha.num_classes(); ++c)
        if (m.test(alpha.classes[c][0])) cols.push_back(c);
    return cols;
}

KaryRel project_IG(const KaryRel& ig, const Alpha& alpha, const Bits& m) {
    return ig.project(ig_coordinates(alpha, m));
}

Bits oplus(const Bits& h, const BinRel& r, const Alpha& alpha) {
    if (!is_alpha_stable(h, alpha)) throw std::invalid_argument("oplus: set is not alpha-stable");
    Bits out(alpha.n, true);
    Bits cls = alpha.classes_meeting(h);
    cls.for_each([&](int c) { out &= r.image(alpha.class_set(c)); });
    return out;
}

}  // namespace loopsmith

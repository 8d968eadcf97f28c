#ifndef LOOPSMITH_TEST_ORACLES_HPP
#define LOOPSMITH_TEST_ORACLES_HPP

#include <algorithm>
#include <set>
#include <vector>

#include "loopsmith/digraph.hpp"
#include "loopsmith/group.hpp"
#include "loopsmith/pp.hpp"

namespace oracles {

using namespace loopsmith;

// Union of γ over all symmetric labelled paths q−q with |q| ≤ max_half, where γ_q is built
// step by step from the edge relation restricted to the next label. Distinct γ_q values are
// enumerated level by level, so equal relations reached by different paths are visited once.
inline BinRel brute_force_alpha(const Digraph& g, const PermGroup& gp, int max_half) {
    int n = g.size();
    std::vector<int> ids = gp.orbit_ids();
    int orbits = 0;
    for (int x : ids) orbits = std::max(orbits, x + 1);
    std::vector<Bits> oset(orbits, Bits(n));
    for (int v = 0; v < n; ++v) oset[ids[v]].set(v);
    BinRel fwd = g.relation(), bwd = g.relation().inverse();
    BinRel out(n);
    for (int o = 0; o < orbits; ++o) {
        BinRel id(n);
        oset[o].for_each([&](int v) { id.set(v, v); });
        std::set<std::vector<uint64_t>> seen;
        auto key = [](const BinRel& r) {
            std::vector<uint64_t> k;
            for (int a = 0; a < r.size(); ++a)
                for (uint64_t w : r.row(a).words()) k.push_back(w);
            return k;
        };
        std::vector<BinRel> layer{id};
        seen.insert(key(id));
        for (int len = 0; len <= max_half && !layer.empty(); ++len) {
            std::vector<BinRel> next;
            for (auto& r : layer) {
                out = out | r.compose(r.inverse());
                if (len == max_half) continue;
                for (const BinRel* e : {&fwd, &bwd})
                    for (int p = 0; p < orbits; ++p) {
                        BinRel step = e->restrict(Bits(n, true));
                        for (int a = 0; a < n; ++a) step.row(a) &= oset[p];
                        BinRel nr = r.compose(step);
                        if (nr.empty()) continue;
                        if (seen.insert(key(nr)).second) next.push_back(nr);
                    }
            }
            layer = std::move(next);
        }
    }
    return out;
}

// Naive pp semantics: all assignments of all variables.
inline KaryRel naive_pp(const NamedStructure& s, const PPFormula& f) {
    int n = s.n, m = f.num_vars;
    KaryRel out(n, int(f.free.size()));
    std::vector<int> asg(m, 0);
    auto holds = [&]() {
        for (auto& [v, e] : f.params)
            if (asg[v] != e) return false;
        for (auto& a : f.atoms) {
            std::vector<int> t;
            for (int v : a.vars) t.push_back(asg[v]);
            if (!s.get(a.rel).contains(t)) return false;
        }
        return true;
    };
    if (m == 0) {
        if (holds()) out.push(std::vector<int>{});
        out.normalize();
        return out;
    }
    if (n == 0) {
        out.normalize();
        return out;
    }
    while (true) {
        if (holds()) {
            std::vector<int> t;
            for (int v : f.free) t.push_back(asg[v]);
            out.push(t);
        }
        int i = m - 1;
        while (i >= 0 && ++asg[i] == n) asg[i--] = 0;
        if (i < 0) break;
    }
    out.normalize();
    return out;
}

// Acyclicity and connectivity of the variable/atom incidence graph by breadth-first search;
// parameters count as unary atoms and the empty formula is not a tree.
inline bool incidence_is_tree(const PPFormula& f) {
    int nv = f.num_vars;
    std::vector<std::vector<int>> atoms;
    for (auto& a : f.atoms) atoms.push_back(a.vars);
    for (auto& p : f.params) atoms.push_back({p.first});
    int total = nv + int(atoms.size());
    if (total == 0) return false;
    std::vector<std::vector<int>> adj(total);
    for (size_t i = 0; i < atoms.size(); ++i)
        for (int v : atoms[i]) {
            adj[nv + int(i)].push_back(v);
            adj[v].push_back(nv + int(i));
        }
    // each incidence occurrence is its own edge, so a repeated variable closes a cycle
    std::vector<int> state(total, 0);
    bool cyclic = false;
    std::vector<int> parent_edge(total, -2);
    parent_edge[0] = -1;
    std::vector<int> order{0};
    state[0] = 1;
    for (size_t head = 0; head < order.size(); ++head) {
        int x = order[head];
        int skipped = 0;
        for (int y : adj[x]) {
            if (y == parent_edge[x] && !skipped) {
                skipped = 1;
                continue;
            }
            if (state[y]) {
                cyclic = true;
                continue;
            }
            state[y] = 1;
            parent_edge[y] = x;
            order.push_back(y);
        }
    }
    return !cyclic && int(order.size()) == total;
}

}  // namespace oracles

#endif

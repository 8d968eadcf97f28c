#include "loopsmith/finitise.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace loopsmith {

BinRel Alpha::relation() const {
    BinRel r(n);
    for (auto& c : classes)
        for (int a : c)
            for (int b : c) r.set(a, b);
    return r;
}

Bits Alpha::class_set(int c) const { return Bits::from(n, classes[c]); }

Bits Alpha::blow_up(const Bits& cs) const {
    Bits out(n);
    cs.for_each([&](int c) {
        for (int v : classes[c]) out.set(v);
    });
    return out;
}

Bits Alpha::classes_meeting(const Bits& vs) const {
    Bits out(num_classes());
    vs.for_each([&](int v) { out.set(class_of[v]); });
    return out;
}

Bits Alpha::orbit_set(int o) const {
    Bits out(n);
    for (int v = 0; v < n; ++v)
        if (orbit_of[v] == o) out.set(v);
    return out;
}

Bits Alpha::classes_in_orbit(int o) const {
    Bits out(num_classes());
    for (int c = 0; c < num_classes(); ++c)
        if (class_orbit[c] == o) out.set(c);
    return out;
}

Alpha Alpha::from_partition(const std::vector<int>& class_of_in, const std::vector<int>& orbit_of) {
    Alpha a;
    a.n = int(class_of_in.size());
    a.orbit_of = orbit_of;
    a.num_orbits = orbit_of.empty() ? 0 : *std::max_element(orbit_of.begin(), orbit_of.end()) + 1;
    std::map<int, int> renum;
    a.class_of.assign(a.n, -1);
    for (int v = 0; v < a.n; ++v) {
        auto it = renum.find(class_of_in[v]);
        if (it == renum.end()) {
            it = renum.emplace(class_of_in[v], int(a.classes.size())).first;
            a.classes.emplace_back();
            a.class_orbit.push_back(orbit_of[v]);
        }
        a.class_of[v] = it->second;
        a.classes[it->second].push_back(v);
    }
    return a;
}

Alpha compute_alpha(const Digraph& g, const PermGroup& gp) {
    int n = g.size();
    auto orb = gp.orbit_ids();
    // pairs (a,b) in a common orbit that reach the diagonal
    std::vector<char> good(size_t(n) * n, 0);
    std::deque<std::pair<int, int>> q;
    for (int c = 0; c < n; ++c) {
        good[size_t(c) * n + c] = 1;
        q.emplace_back(c, c);
    }
    auto visit = [&](int a, int b) {
        if (orb[a] != orb[b]) return;
        char& f = good[size_t(a) * n + b];
        if (!f) f = 1, q.emplace_back(a, b);
    };
    while (!q.empty()) {
        auto [c, d] = q.front();
        q.pop_front();
        // predecessors of the pair state under a simultaneous step
        for (int a : g.in(c))
            for (int b : g.in(d)) visit(a, b);
        for (int a : g.out(c))
            for (int b : g.out(d)) visit(a, b);
    }
    std::vector<int> cls(n, -1);
    for (int a = 0; a < n; ++a) {
        if (cls[a] >= 0) continue;
        for (int b = a; b < n; ++b)
            if (cls[b] < 0 && good[size_t(a) * n + b]) cls[b] = a;
    }
    return Alpha::from_partition(cls, orb);
}

FinitiseReport check_finitises(const Alpha& alpha, const Digraph& g, const PermGroup& gp) {
    FinitiseReport rep;
    int n = g.size();
    for (int v = 0; v < n; ++v)
        if (alpha.orbit_of[v] != alpha.class_orbit[alpha.class_of[v]]) {
            rep.a1 = false;
            rep.violations.push_back("class does not refine the orbit partition at vertex " + std::to_string(v));
            break;
        }
    for (size_t gi = 0; gi < gp.generators().size() && rep.a1; ++gi) {
        auto& p = gp.generators()[gi];
        for (auto& c : alpha.classes) {
            int img = alpha.class_of[p[c[0]]];
            for (int v : c)
                if (alpha.class_of[p[v]] != img) {
                    rep.a1 = false;
                    rep.violations.push_back("A1: generator " + std::to_string(gi) + " splits the class of vertex " +
                                             std::to_string(c[0]));
                    break;
                }
            if (!rep.a1) break;
        }
    }
    // A2: every orbit edge O->P induces a bijection O/α -> P/α
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> by_orbits;
    for (auto [a, b] : g.edges())
        by_orbits[{alpha.orbit_of[a], alpha.orbit_of[b]}].push_back({alpha.class_of[a], alpha.class_of[b]});
    for (auto& [op, cps] : by_orbits) {
        std::map<int, int> fwd, bwd;
        bool ok = true;
        for (auto [x, y] : cps) {
            auto f = fwd.emplace(x, y);
            auto b = bwd.emplace(y, x);
            if (f.first->second != y || b.first->second != x) ok = false;
        }
        int left = alpha.classes_in_orbit(op.first).count();
        int right = alpha.classes_in_orbit(op.second).count();
        if (int(fwd.size()) != left || int(bwd.size()) != right) ok = false;
        if (!ok) {
            rep.a2 = false;
            rep.violations.push_back("A2: orbit edge " + std::to_string(op.first) + "->" + std::to_string(op.second) +
                                     " does not induce a class bijection");
        }
    }
    // A3: class counts agree across the orbits of each weak component
    for (auto& comp : weak_components(g)) {
        std::map<int, int> per_orbit;
        for (int v : comp) per_orbit[alpha.orbit_of[v]] = alpha.classes_in_orbit(alpha.orbit_of[v]).count();
        int first = per_orbit.begin()->second;
        for (auto& [o, c] : per_orbit)
            if (c != first) {
                rep.a3 = false;
                rep.violations.push_back("A3: orbits of the component of vertex " + std::to_string(comp[0]) +
                                         " carry different class counts");
                break;
            }
    }
    return rep;
}

Digraph quotient(const Digraph& g, const Alpha& alpha) {
    Digraph q(alpha.num_classes());
    for (auto [a, b] : g.edges()) q.add_edge(alpha.class_of[a], alpha.class_of[b]);
    return q;
}

BinRel blow_up(const BinRel& r, const Alpha& alpha) {
    BinRel out(alpha.n);
    for (auto [x, y] : r.pairs()) {
        Bits row = alpha.class_set(y);
        for (int a : alpha.classes[x]) out.row(a) |= row;
    }
    return out;
}

KaryRel blow_up(const KaryRel& r, const Alpha& alpha) {
    int k = r.arity();
    KaryRel out(alpha.n, k);
    std::vector<int> t(k), idx(k);
    for (size_t i = 0; i < r.size(); ++i) {
        const int* c = r.tuple(i);
        if (k == 0) {
            out.push(t);
            continue;
        }
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (int j = 0; j < k; ++j) t[j] = alpha.classes[c[j]][idx[j]];
            out.push(t);
            int j = k - 1;
            for (; j >= 0; --j) {
                if (++idx[j] < int(alpha.classes[c[j]].size())) break;
                idx[j] = 0;
            }
            if (j < 0) break;
        }
    }
    out.normalize();
    return out;
}

Bits blow_up(const Bits& s, const Alpha& alpha) { return alpha.blow_up(s); }

KaryRel project_quotient(const KaryRel& r, const Alpha& alpha) {
    KaryRel out(alpha.num_classes(), r.arity());
    std::vector<int> t(r.arity());
    out.reserve(r.size());
    for (size_t i = 0; i < r.size(); ++i) {
        for (int j = 0; j < r.arity(); ++j) t[j] = alpha.class_of[r.tuple(i)[j]];
        out.push(t);
    }
    out.normalize();
    return out;
}

BinRel project_quotient(const BinRel& r, const Alpha& alpha) {
    BinRel out(alpha.num_classes());
    for (auto [a, b] : r.pairs()) out.set(alpha.class_of[a], alpha.class_of[b]);
    return out;
}

bool is_alpha_stable(const KaryRel& r, const Alpha& alpha) {
    KaryRel q = project_quotient(r, alpha);
    double total = 0;
    for (size_t i = 0; i < q.size(); ++i) {
        double p = 1;
        for (int j = 0; j < q.arity(); ++j) p *= double(alpha.classes[q.tuple(i)[j]].size());
        total += p;
    }
    return total == double(r.size());
}

bool is_alpha_stable(const BinRel& r, const Alpha& alpha) { return blow_up(project_quotient(r, alpha), alpha) == r; }

bool is_alpha_stable(const Bits& s, const Alpha& alpha) { return alpha.blow_up(alpha.classes_meeting(s)) == s; }

bool is_omega_stable(const Bits& s, const Alpha& alpha) {
    bool ok = true;
    for (int v = 0; v < alpha.n && ok; ++v)
        if (s.test(v))
            for (int w = 0; w < alpha.n; ++w)
                if (alpha.orbit_of[w] == alpha.orbit_of[v] && !s.test(w)) {
                    ok = false;
                    break;
                }
    return ok;
}

}  // namespace loopsmith

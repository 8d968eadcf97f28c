#include "loopsmith/group.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace loopsmith {

Perm perm_compose(const Perm& outer, const Perm& inner) {
    Perm r(inner.size());
    for (size_t i = 0; i < inner.size(); ++i) r[i] = outer[inner[i]];
    return r;
}

Perm perm_inverse(const Perm& p) {
    Perm r(p.size());
    for (size_t i = 0; i < p.size(); ++i) r[p[i]] = int(i);
    return r;
}

Perm perm_identity(int n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

bool is_bijection(const Perm& p, int n) {
    if (int(p.size()) != n) return false;
    std::vector<bool> hit(n, false);
    for (int x : p) {
        if (x < 0 || x >= n || hit[x]) return false;
        hit[x] = true;
    }
    return true;
}

PermGroup::PermGroup(int n, std::vector<Perm> gens) : n_(n) {
    for (auto& g : gens) {
        if (!is_bijection(g, n)) throw std::invalid_argument("generator is not a bijection of the domain");
        if (g != perm_identity(n) && std::find(gens_.begin(), gens_.end(), g) == gens_.end()) gens_.push_back(g);
    }
}

std::vector<Perm> PermGroup::elements(size_t cap) const {
    std::set<Perm> seen{perm_identity(n_)};
    std::vector<Perm> out{perm_identity(n_)};
    for (size_t i = 0; i < out.size(); ++i) {
        for (auto& g : gens_) {
            Perm p = perm_compose(g, out[i]);
            if (seen.insert(p).second) {
                if (out.size() >= cap) throw std::length_error("group closure exceeds cap");
                out.push_back(std::move(p));
            }
        }
    }
    return out;
}

std::vector<int> PermGroup::orbit_ids() const {
    std::vector<int> id(n_, -1);
    int next = 0;
    for (int v = 0; v < n_; ++v) {
        if (id[v] >= 0) continue;
        std::deque<int> q{v};
        id[v] = next;
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            for (auto& g : gens_)
                if (id[g[x]] < 0) id[g[x]] = next, q.push_back(g[x]);
        }
        ++next;
    }
    return id;
}

std::vector<std::vector<int>> PermGroup::point_orbits() const {
    auto id = orbit_ids();
    int m = id.empty() ? 0 : *std::max_element(id.begin(), id.end()) + 1;
    std::vector<std::vector<int>> out(m);
    for (int v = 0; v < n_; ++v) out[id[v]].push_back(v);
    return out;
}

KaryRel PermGroup::orbit_of_tuple(const std::vector<int>& t) const {
    std::set<std::vector<int>> seen{t};
    std::deque<std::vector<int>> q{t};
    while (!q.empty()) {
        auto x = q.front();
        q.pop_front();
        for (auto& g : gens_) {
            auto y = apply_perm(g, x);
            if (seen.insert(y).second) q.push_back(y);
        }
    }
    KaryRel r(n_, int(t.size()));
    for (auto& x : seen) r.push(x);
    r.normalize();
    return r;
}

bool PermGroup::is_automorphism_group_of(const Digraph& g) const {
    if (g.size() != n_) return false;
    for (auto& p : gens_)
        for (auto [a, b] : g.edges())
            if (!g.has_edge(p[a], p[b])) return false;
    return true;
}

Bits apply_perm(const Perm& p, const Bits& s) {
    Bits r(s.size());
    s.for_each([&](int x) { r.set(p[x]); });
    return r;
}

std::vector<int> apply_perm(const Perm& p, const std::vector<int>& t) {
    std::vector<int> r(t.size());
    for (size_t i = 0; i < t.size(); ++i) r[i] = p[t[i]];
    return r;
}

long OrbitPartition::code(const std::vector<int>& t, int n) {
    long c = 0;
    for (int x : t) c = c * n + x;
    return c;
}

OrbitPartition orbits(const PermGroup& gp, int k) {
    if (k < 1 || k > 4) throw std::invalid_argument("tuple orbit arity must be in 1..4");
    int n = gp.degree();
    long total = 1;
    for (int i = 0; i < k; ++i) total *= n;
    OrbitPartition op;
    op.arity = k;
    op.n = n;
    op.orbit_of.assign(total, -1);
    std::vector<int> t(k);
    auto decode = [&](long c) {
        for (int i = k - 1; i >= 0; --i) t[i] = int(c % n), c /= n;
    };
    int next = 0;
    for (long c = 0; c < total; ++c) {
        if (op.orbit_of[c] >= 0) continue;
        op.orbits.emplace_back();
        std::deque<long> q{c};
        op.orbit_of[c] = next;
        while (!q.empty()) {
            long x = q.front();
            q.pop_front();
            decode(x);
            op.orbits[next].push_back(t);
            for (auto& g : gp.generators()) {
                long y = 0;
                for (int i = 0; i < k; ++i) y = y * n + g[t[i]];
                if (op.orbit_of[y] < 0) op.orbit_of[y] = next, q.push_back(y);
            }
        }
        std::sort(op.orbits[next].begin(), op.orbits[next].end());
        ++next;
    }
    return op;
}

OrbitQuotient orbit_digraph(const Digraph& g, const PermGroup& gp) {
    if (!gp.is_automorphism_group_of(g)) throw std::invalid_argument("generator is not an automorphism");
    OrbitQuotient q;
    q.orbit_of = gp.orbit_ids();
    q.orbits = gp.point_orbits();
    q.quotient = Digraph(int(q.orbits.size()));
    for (auto [a, b] : g.edges()) {
        q.quotient.add_edge(q.orbit_of[a], q.orbit_of[b]);
        if (q.orbit_of[a] == q.orbit_of[b] && !q.loop_witness) q.loop_witness = std::make_pair(a, b);
    }
    return q;
}

bool is_invariant(const BinRel& r, const PermGroup& gp) {
    if (r.size() != gp.degree()) throw std::invalid_argument("degree mismatch");
    for (auto& p : gp.generators())
        for (auto [a, b] : r.pairs())
            if (!r.test(p[a], p[b])) return false;
    return true;
}

bool is_invariant(const KaryRel& r, const PermGroup& gp) {
    if (r.domain() != gp.degree()) throw std::invalid_argument("degree mismatch");
    std::vector<int> t(r.arity());
    for (auto& p : gp.generators())
        for (size_t i = 0; i < r.size(); ++i) {
            for (int j = 0; j < r.arity(); ++j) t[j] = p[r.tuple(i)[j]];
            if (!r.contains(t)) return false;
        }
    return true;
}

bool is_invariant(const Bits& s, const PermGroup& gp) {
    if (s.size() != gp.degree()) throw std::invalid_argument("degree mismatch");
    for (auto& p : gp.generators())
        if (apply_perm(p, s) != s) return false;
    return true;
}

std::vector<Bits> set_orbit(const PermGroup& gp, const Bits& h) {
    std::set<Bits> seen{h};
    std::vector<Bits> out{h};
    for (size_t i = 0; i < out.size(); ++i)
        for (auto& g : gp.generators()) {
            Bits y = apply_perm(g, out[i]);
            if (seen.insert(y).second) out.push_back(y);
        }
    return out;
}

bool is_reductionistic(const Bits& h, const PermGroup& gp) {
    if (h.size() != gp.degree()) throw std::invalid_argument("degree mismatch");
    if (h.all()) throw std::invalid_argument("reductionistic test needs a proper subset");
    auto orb = set_orbit(gp, h);
    for (size_t i = 0; i < orb.size(); ++i)
        if (orb[i] != h && orb[i].intersects(h)) return false;
    return true;
}

std::vector<Perm> setwise_stabiliser(const PermGroup& gp, const Bits& h) {
    int n = gp.degree();
    std::map<Bits, Perm> transversal;
    std::vector<Bits> order{h};
    transversal.emplace(h, perm_identity(n));
    for (size_t i = 0; i < order.size(); ++i)
        for (auto& g : gp.generators()) {
            Bits y = apply_perm(g, order[i]);
            if (!transversal.count(y)) {
                transversal.emplace(y, perm_compose(g, transversal.at(order[i])));
                order.push_back(y);
            }
        }
    std::set<Perm> gens;
    for (auto& x : order)
        for (auto& g : gp.generators()) {
            Bits y = apply_perm(g, x);
            Perm s = perm_compose(perm_inverse(transversal.at(y)), perm_compose(g, transversal.at(x)));
            if (s != perm_identity(n)) gens.insert(s);
        }
    return {gens.begin(), gens.end()};
}

RestrictedGroup restrict_group(const PermGroup& gp, const Bits& h) {
    if (!h.all() && !is_reductionistic(h, gp)) throw std::invalid_argument("restriction needs a reductionistic set");
    RestrictedGroup r;
    r.to_global = h.elements();
    std::vector<int> local(gp.degree(), -1);
    for (size_t i = 0; i < r.to_global.size(); ++i) local[r.to_global[i]] = int(i);
    r.global_generators = h.all() ? gp.generators() : setwise_stabiliser(gp, h);
    std::vector<Perm> gens;
    for (auto& g : r.global_generators) {
        Perm p(r.to_global.size());
        for (size_t i = 0; i < r.to_global.size(); ++i) p[i] = local[g[r.to_global[i]]];
        gens.push_back(p);
    }
    r.group = PermGroup(int(r.to_global.size()), gens);
    return r;
}

PermGroup block_action(const std::vector<Perm>& gens, const std::vector<int>& block_of, int blocks) {
    std::vector<Perm> out;
    std::vector<int> rep(blocks, -1);
    for (size_t v = 0; v < block_of.size(); ++v)
        if (block_of[v] >= 0 && rep[block_of[v]] < 0) rep[block_of[v]] = int(v);
    for (auto& g : gens) {
        Perm p(blocks);
        for (int b = 0; b < blocks; ++b) {
            int img = block_of[g[rep[b]]];
            if (img < 0) throw std::invalid_argument("permutation does not preserve the block system");
            p[b] = img;
        }
        out.push_back(p);
    }
    return PermGroup(blocks, out);
}

}  // namespace loopsmith

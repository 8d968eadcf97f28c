#include "loopsmith/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace loopsmith {

Instance swap_instance() {
    // A_i = i, B_i = 3 + i
    Digraph g(6, {{1, 3}, {3, 1}, {3, 5}, {5, 4}, {0, 4}, {4, 0}, {0, 2}, {2, 1}});
    return {"swap6", g, PermGroup(6, {{3, 4, 5, 0, 1, 2}}), {}};
}

Instance directed_cycle(int n) {
    Digraph g(n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return {"cycle" + std::to_string(n), g, PermGroup::trivial(n), {}};
}

Instance symmetric_k3() {
    Digraph g(3);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b) g.add_edge(a, b);
    return {"k3", g, PermGroup::trivial(3), {}};
}

Digraph siggerscrap_pattern() { return Digraph(3, {{0, 2}, {2, 1}, {0, 1}, {1, 0}}); }

Instance covering_instance(const Digraph& q, int m, const std::vector<int>& voltages, const std::string& name) {
    auto es = q.edges();
    if (voltages.size() != es.size()) throw std::invalid_argument("one voltage per quotient edge required");
    int k = q.size();
    Digraph g(k * m);
    for (size_t e = 0; e < es.size(); ++e)
        for (int i = 0; i < m; ++i) g.add_edge(es[e].first * m + i, es[e].second * m + (i + voltages[e]) % m);
    Perm rot(k * m);
    for (int o = 0; o < k; ++o)
        for (int i = 0; i < m; ++i) rot[o * m + i] = o * m + (i + 1) % m;
    return {name.empty() ? "cover" : name, g, PermGroup(k * m, {rot}), {}};
}

Instance random_cover(std::mt19937_64& rng, const Digraph& q, int m) {
    std::vector<int> volt;
    for (size_t e = 0; e < q.edges().size(); ++e) volt.push_back(int(rng() % uint64_t(m)));
    return covering_instance(q, m, volt);
}

namespace {

Perm random_perm(std::mt19937_64& rng, int n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng() % uint64_t(i + 1)]);
    return p;
}

Digraph random_loopless(std::mt19937_64& rng, int n, double density) {
    Digraph g(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b && double(rng() % 10000) < density * 10000) g.add_edge(a, b);
    return g;
}

}  // namespace

Instance restrict_instance(const Instance& in, const Bits& s) {
    std::vector<int> to_global;
    Digraph h = in.g.induced(s, &to_global);
    std::vector<int> local(in.g.size(), -1);
    for (size_t i = 0; i < to_global.size(); ++i) local[to_global[i]] = int(i);
    std::vector<Perm> gens;
    for (auto& p : in.gp.generators()) {
        Perm r(to_global.size());
        for (size_t i = 0; i < to_global.size(); ++i) {
            int img = local[p[to_global[i]]];
            if (img < 0) throw std::invalid_argument("vertex set is not invariant");
            r[i] = img;
        }
        gens.push_back(r);
    }
    return {in.name, h, PermGroup(int(to_global.size()), gens), {}};
}

namespace {

Instance generate_once(uint64_t seed, const GenParams& prm);

}  // namespace

Instance generate(uint64_t seed, const GenParams& prm) {
    if (prm.n_min < 1 || prm.n_max < prm.n_min) throw std::invalid_argument("bad vertex range");
    if (prm.density < 0 || prm.density > 1) throw std::invalid_argument("density must lie in [0,1]");
    if (!prm.smooth) return generate_once(seed, prm);
    for (uint64_t attempt = 0; attempt < 1000; ++attempt) {
        Instance in = generate_once(seed * 1000003 + attempt, prm);
        Bits sp = smooth_part(in.g, Bits(in.g.size(), true));
        if (sp.none()) continue;
        Instance r = restrict_instance(in, sp);
        r.name = "gen" + std::to_string(seed);
        return r;
    }
    throw std::runtime_error("no smooth instance found for these parameters");
}

namespace {

Instance generate_once(uint64_t seed, const GenParams& prm) {
    std::mt19937_64 rng(seed);
    int n = prm.n_min + int(rng() % uint64_t(prm.n_max - prm.n_min + 1));
    Instance inst;
    inst.name = "gen" + std::to_string(seed);
    switch (prm.mode) {
        case GroupMode::Trivial: {
            inst.g = Digraph(n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    if (double(rng() % 10000) < prm.density * 10000 && !(prm.loopless && a == b))
                        inst.g.add_edge(a, b);
            inst.gp = PermGroup::trivial(n);
            break;
        }
        case GroupMode::Sampled: {
            int ngens = 1 + int(rng() % 2);
            std::vector<Perm> gens;
            for (int i = 0; i < ngens; ++i) gens.push_back(random_perm(rng, n));
            inst.gp = PermGroup(n, gens);
            auto op = orbits(inst.gp, 2);
            inst.g = Digraph(n);
            auto pt = inst.gp.orbit_ids();
            for (auto& orb : op.orbits)
                if (double(rng() % 10000) < prm.density * 10000 &&
                    !(prm.loopless && pt[orb[0][0]] == pt[orb[0][1]]))
                    for (auto& t : orb) inst.g.add_edge(t[0], t[1]);
            break;
        }
        case GroupMode::Covering: {
            int m = std::max(2, prm.cover_degree);
            int k = std::max(2, n / m);
            Digraph q = prm.pattern ? siggerscrap_pattern() : random_loopless(rng, k, std::max(prm.density, 0.35));
            inst = random_cover(rng, q, m);
            inst.name = "gen" + std::to_string(seed);
            break;
        }
    }
    return inst;
}

}  // namespace

std::vector<Perm> all_automorphisms(const Digraph& g) {
    int n = g.size();
    if (n > 8) throw std::invalid_argument("automorphism enumeration limited to 8 vertices");
    std::vector<Perm> out;
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    auto es = g.edges();
    do {
        bool ok = true;
        for (auto [a, b] : es)
            if (!g.has_edge(p[a], p[b])) {
                ok = false;
                break;
            }
        if (ok) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

}  // namespace loopsmith

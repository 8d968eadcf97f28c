#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "loopsmith/alpha_pairs.hpp"
#include "loopsmith/corpus.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/paths.hpp"
#include "loopsmith/pipeline.hpp"
#include "loopsmith/polymorphism.hpp"
#include "oracles.hpp"

using namespace loopsmith;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

GenParams params(GroupMode mode, int lo, int hi, double density, bool smooth = false, bool loopless = false) {
    GenParams p{lo, hi, density, mode};
    p.smooth = smooth;
    p.loopless = loopless;
    return p;
}

// Sampled automorphism subgroups, n ≤ 7.
std::vector<Instance> alpha_corpus(int count) {
    std::vector<Instance> out;
    for (int s = 0; s < count; ++s) {
        GroupMode m = s % 4 == 3 ? GroupMode::Trivial : GroupMode::Sampled;
        out.push_back(generate(100000 + s, params(m, 2, 7, 0.2 + 0.05 * (s % 5))));
    }
    return out;
}

std::vector<Instance> loopless_smooth_corpus(int count, uint64_t base) {
    std::vector<Instance> out;
    for (int s = 0; s < count; ++s) {
        GroupMode m = s % 3 == 0 ? GroupMode::Trivial : s % 3 == 1 ? GroupMode::Sampled : GroupMode::Covering;
        GenParams p = params(m, 3, m == GroupMode::Covering ? 8 : 7, 0.35, true, true);
        out.push_back(generate(base + s, p));
    }
    return out;
}

bool applicable(const Instance& in) {
    if (!is_smooth(in.g)) return false;
    OrbitQuotient q = orbit_digraph(in.g, in.gp);
    return !q.quotient.has_loop() && q.quotient.size() <= 8 && q.quotient.edge_count() > 0;
}

// A random closed realisable labelled path at the orbit of a random vertex, from a walk in G.
std::optional<LabelledPath> closed_walk_path(const Instance& in, const std::vector<int>& ids, std::mt19937_64& rng,
                                             int len) {
    int n = in.g.size();
    int v = int(rng() % n);
    LabelledPath p = LabelledPath::at(ids[v]);
    for (int i = 0; i < len; ++i) {
        std::vector<std::pair<Dir, int>> nx;
        for (int w : in.g.out(v)) nx.push_back({Dir::Fwd, w});
        for (int w : in.g.in(v)) nx.push_back({Dir::Bwd, w});
        if (nx.empty()) return std::nullopt;
        auto [d, w] = nx[rng() % nx.size()];
        p.push(d, ids[w]);
        v = w;
    }
    if (p.last() != p.first()) return std::nullopt;
    return p;
}

Outcome alpha_oracle() {
    auto corpus = alpha_corpus(500);
    int bad = 0;
    for (auto& in : corpus) {
        int n = in.g.size();
        if (compute_alpha(in.g, in.gp).relation() != oracles::brute_force_alpha(in.g, in.gp, n * n)) ++bad;
    }
    return {bad == 0, fmt("%zu instances, %d mismatches", corpus.size(), bad)};
}

Outcome swap_reproduction() {
    Instance in = swap_instance();
    OrbitQuotient q = orbit_digraph(in.g, in.gp);
    Alpha a = compute_alpha(in.g, in.gp);
    int omega = int(in.gp.point_orbits().size());
    bool singletons = std::all_of(a.classes.begin(), a.classes.end(), [](auto& c) { return c.size() == 1; });
    bool pattern = q.quotient == siggerscrap_pattern();
    bool axioms = check_finitises(a, in.g, in.gp).ok();
    bool ok = omega == 3 && a.num_classes() == 6 && singletons && pattern && axioms;
    return {ok, fmt("omega classes=%d, alpha classes=%d, singletons=%d, pattern=%d, axioms=%d", omega,
                    a.num_classes(), int(singletons), int(pattern), int(axioms))};
}

Outcome finitising_axioms() {
    auto corpus = alpha_corpus(500);
    for (auto& in : loopless_smooth_corpus(200, 200000)) corpus.push_back(in);
    int bad = 0;
    for (auto& in : corpus)
        if (!check_finitises(compute_alpha(in.g, in.gp), in.g, in.gp).ok()) ++bad;
    return {bad == 0, fmt("%zu instances, %d failures", corpus.size(), bad)};
}

Outcome separated_pairs() {
    std::mt19937_64 rng(7);
    int instances = 0, pairs = 0, escapes = 0, bad = 0, errors = 0;
    for (auto& in : loopless_smooth_corpus(300, 300000)) {
        if (!applicable(in)) continue;
        ++instances;
        OrbitView v(in.g, in.gp);
        const Digraph& q = v.quotient();
        auto ids = in.gp.orbit_ids();
        try {
            for (int o = 0; o < q.size(); ++o)
                for (int p : q.out(o)) {
                    std::vector<LabelledPath> pis{LabelledPath::at(o)};
                    for (int t = 0; t < 6 && pis.size() < 3; ++t) {
                        auto c = closed_walk_path(in, ids, rng, 2 + int(rng() % 5));
                        if (c && c->first() == o) pis.push_back(*c);
                    }
                    for (auto& pi : pis) {
                        SeparatedPair sp = build_separated_pair(v, pi, p);
                        ++pairs;
                        bool ok = is_properly_separated(v, sp.ext, sp.rho) && is_extension(sp.ext, pi) &&
                                  realisable(v, sp.rho) && realisable(v, sp.ext) && sp.ext.first() == o &&
                                  sp.ext.last() == o && sp.rho.first() == p && sp.rho.last() == p &&
                                  sp.ext.length() == sp.rho.length();
                        if (!ok) ++bad;
                    }
                }
            int m = q.size();
            for (int trial = 0; trial < 4; ++trial) {
                Bits corb(m);
                for (int o = 0; o < m; ++o)
                    if (rng() % 2) corb.set(o);
                if (corb.none() || corb.all()) continue;
                Bits c(in.g.size());
                corb.for_each([&](int o) { c |= v.orbit_set(o); });
                for (int oi = 0; oi < m; ++oi) {
                    if (!corb.test(oi)) continue;
                    for (int oo = 0; oo < m; ++oo) {
                        if (corb.test(oo) || !(q.has_edge(oi, oo) || q.has_edge(oo, oi))) continue;
                        CentralEscape ce = build_central_escape(v, c, oi, oo);
                        ++escapes;
                        bool ok = is_properly_separated(v, ce.pi, ce.pi_prime) && ce.pi.first() == oi &&
                                  ce.pi_prime.first() == oo && ce.pi.last() == ce.o_out2 &&
                                  ce.pi_prime.last() == ce.o_in2 && corb.test(ce.o_in2) && !corb.test(ce.o_out2) &&
                                  realisable(v, ce.pi) && realisable(v, ce.pi_prime);
                        if (!ok) ++bad;
                    }
                }
            }
        } catch (const std::exception& e) {
            ++errors;
            std::printf("  separated pair error on %s: %s\n", in.name.c_str(), e.what());
        }
    }
    bool ok = bad == 0 && errors == 0 && instances >= 50;
    return {ok, fmt("%d instances, %d pairs, %d escapes, %d failures, %d errors", instances, pairs, escapes, bad,
                    errors)};
}

Outcome euclid() {
    long checks = 0, bad = 0;
    for (int k = 1; k <= 12; ++k)
        for (int l = 1; l <= 12; ++l) {
            if (std::gcd(k, l) != 1) continue;
            for (int n = k * l + 1; n <= k * l + 200; ++n) {
                if (std::gcd(n, k) != 1 || std::gcd(n, l) != 1) continue;
                ++checks;
                try {
                    auto [s, t] = euclid_hammer(k, l, n);
                    if (s <= 0 || t <= 0 || s * k + t * l != n) ++bad;
                } catch (const std::exception&) {
                    ++bad;
                }
            }
        }
    return {bad == 0, fmt("%ld triples, %ld failures", checks, bad)};
}

Outcome alpha_pairs() {
    int pairs = 0, bad = 0;
    std::vector<Instance> corpus = loopless_smooth_corpus(150, 400000);
    corpus.push_back(swap_instance());
    for (auto& in : corpus) {
        if (!applicable(in)) continue;
        Alpha a = compute_alpha(in.g, in.gp);
        Digraph q = orbit_digraph(in.g, in.gp).quotient;
        for (int o = 0; o < q.size(); ++o)
            for (int p = o + 1; p < q.size(); ++p) {
                if (!q.has_edge(o, p) && !q.has_edge(p, o)) continue;
                ++pairs;
                try {
                    AlphaPairDef d = alpha_on_pairs_ppdef(in.g, in.gp, a, o, p);
                    bool prims = true;
                    for (auto& def : d.script.defs)
                        if (def.prim && def.prim->kind != PrimKind::Edge && def.prim->kind != PrimKind::OrbitUnion)
                            prims = false;
                    if (!licensing_errors(in.g, in.gp, d.script).empty()) prims = false;
                    ScriptEvaluator ev(in.g, in.gp, a);
                    ev.run(d.script);
                    BinRel want = a.relation().restrict(a.orbit_set(o) | a.orbit_set(p));
                    if (!prims || ev.value(d.script.output).to_bin() != want) ++bad;
                } catch (const std::exception& e) {
                    ++bad;
                    std::printf("  alpha_on_pairs error on %s: %s\n", in.name.c_str(), e.what());
                }
            }
    }
    return {bad == 0 && pairs >= 100, fmt("%d orbit pairs, %d failures", pairs, bad)};
}

struct PipelineRun {
    Instance in;
    Certificate cert;
};

std::vector<PipelineRun> hardness_runs;

Outcome pipeline_soundness() {
    std::vector<Instance> corpus{symmetric_k3(), swap_instance()};
    for (int s = 0; s < 200; ++s) corpus.push_back(generate(500000 + s, params(GroupMode::Trivial, 3, 6, 0.4, true, true)));
    for (int s = 0; s < 150; ++s) corpus.push_back(generate(510000 + s, params(GroupMode::Sampled, 4, 7, 0.4, true, true)));
    for (int s = 0; s < 100; ++s) {
        GenParams p = params(GroupMode::Covering, 4, 8, 0.35, true);
        p.cover_degree = 2;
        corpus.push_back(generate(520000 + s, p));
    }
    for (int s = 0; s < 80; ++s) corpus.push_back(generate(530000 + s, params(GroupMode::Sampled, 3, 7, 0.4)));
    int hard = 0, pseudo = 0, skipped = 0, bad = 0;
    for (auto& in : corpus) {
        OrbitQuotient q = orbit_digraph(in.g, in.gp);
        bool in_orbit = q.loop_witness.has_value();
        bool eligible = !in_orbit && is_smooth(in.g) && find_unit_walk(in.g).has_value();
        if (!in_orbit && !eligible) {
            ++skipped;
            continue;
        }
        try {
            Certificate c = run_master(in.g, in.gp);
            VerifyResult v = verify_certificate(in.g, in.gp, c);
            if (in_orbit) {
                auto ids = in.gp.orbit_ids();
                bool witness = c.kind == Certificate::Kind::Pseudoloop && in.g.has_edge(c.edge.first, c.edge.second) &&
                               ids[c.edge.first] == ids[c.edge.second] && c.orbit == ids[c.edge.first];
                if (!witness || !v.ok) ++bad;
                ++pseudo;
            } else {
                if (c.kind != Certificate::Kind::Hardness || !v.ok) {
                    ++bad;
                    std::printf("  rejected hardness certificate on %s\n", in.name.c_str());
                }
                ++hard;
                hardness_runs.push_back({in, c});
            }
        } catch (const std::exception& e) {
            ++bad;
            std::printf("  pipeline error on %s: %s\n", in.name.c_str(), e.what());
        }
    }
    bool ok = bad == 0 && hard + pseudo >= 200;
    return {ok, fmt("%d hardness, %d pseudoloop, %d outside the preconditions, %d failures", hard, pseudo, skipped,
                    bad)};
}

std::vector<std::pair<int, int>> canonical_edges(const Digraph& g) {
    int n = g.size();
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::pair<int, int>> best;
    bool first = true;
    do {
        std::vector<std::pair<int, int>> e;
        for (auto [a, b] : g.edges()) e.push_back({p[a], p[b]});
        std::sort(e.begin(), e.end());
        if (first || e < best) {
            best = e;
            first = false;
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

Outcome dichotomy() {
    IdentitySpec sp = IdentitySpec::siggers4();
    int classes = 0, agree = 0, hard = 0;
    for (int n = 1; n <= 4; ++n) {
        std::vector<std::pair<int, int>> slots;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b) slots.push_back({a, b});
        std::set<std::vector<std::pair<int, int>>> seen;
        for (long mask = 0; mask < (1L << slots.size()); ++mask) {
            Digraph g(n);
            for (size_t i = 0; i < slots.size(); ++i)
                if (mask >> i & 1) g.add_edge(slots[i].first, slots[i].second);
            if (!is_smooth(g) || !find_unit_walk(g)) continue;
            if (!seen.insert(canonical_edges(g)).second) continue;
            ++classes;
            bool h = false;
            try {
                Certificate c = run_master(g, PermGroup::trivial(n));
                h = c.kind == Certificate::Kind::Hardness && verify_certificate(g, PermGroup::trivial(n), c).ok;
            } catch (const std::exception& e) {
                std::printf("  pipeline error on a %d-vertex digraph: %s\n", n, e.what());
            }
            bool s = find_polymorphism(as_structure(g), sp).has_value();
            hard += h;
            agree += h == !s;
        }
    }
    bool c3 = find_polymorphism(as_structure(directed_cycle(3).g), sp).has_value();
    bool k3 = !find_polymorphism(as_structure(symmetric_k3().g), sp).has_value();
    bool ok = agree == classes && classes > 0 && c3 && k3;
    return {ok, fmt("%d isomorphism classes, %d agree, %d hard; 3-cycle has siggers=%d, K3 has none=%d", classes, agree,
                    hard, int(c3), int(k3))};
}

Outcome siggerscrap() {
    std::vector<Instance> fixtures{swap_instance()};
    for (int s = 0; fixtures.size() < 16 && s < 200; ++s) {
        GenParams p = params(GroupMode::Covering, 6, 12, 0.5, true);
        p.pattern = true;
        p.cover_degree = 2 + s % 3;
        Instance in = generate(600000 + s, p);
        if (!is_smooth(in.g)) continue;
        Digraph q = orbit_digraph(in.g, in.gp).quotient;
        if (q.size() != 3) continue;
        fixtures.push_back(in);
    }
    int bad = 0;
    for (auto& in : fixtures) {
        try {
            if (!check_siggerscrap(in.g, in.gp).ok()) ++bad;
        } catch (const std::exception& e) {
            ++bad;
            std::printf("  siggerscrap error on %s: %s\n", in.name.c_str(), e.what());
        }
    }
    return {bad == 0 && fixtures.size() >= 11, fmt("%zu fixtures, %d failures", fixtures.size(), bad)};
}

PPFormula random_formula(std::mt19937_64& rng, const std::vector<std::pair<std::string, int>>& rels) {
    PPFormula f;
    f.num_vars = 1 + int(rng() % 6);
    int atoms = int(rng() % 7);
    for (int i = 0; i < atoms; ++i) {
        auto& [name, ar] = rels[rng() % rels.size()];
        std::vector<int> vs;
        for (int j = 0; j < ar; ++j) vs.push_back(int(rng() % f.num_vars));
        f.add(name, vs);
    }
    for (int v = 0; v < f.num_vars; ++v)
        if (rng() % 2) f.free.push_back(v);
    return f;
}

Outcome pp_engine() {
    std::mt19937_64 rng(1234);
    std::vector<std::pair<std::string, int>> rels{{"E", 2}, {"U", 1}, {"T", 3}};
    int bad = 0, tree_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        int n = 1 + int(rng() % 6);
        NamedStructure s(n);
        BinRel e(n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (rng() % 3 == 0) e.set(a, b);
        s.add("E", e);
        Bits u(n);
        for (int v = 0; v < n; ++v)
            if (rng() % 2) u.set(v);
        s.add("U", u);
        std::vector<std::vector<int>> ts;
        for (int k = 0; k < 8; ++k) ts.push_back({int(rng() % n), int(rng() % n), int(rng() % n)});
        s.add("T", KaryRel::from_tuples(n, 3, ts));
        PPFormula f = random_formula(rng, rels);
        if (rng() % 5 == 0) f.params.push_back({int(rng() % f.num_vars), int(rng() % n)});
        if (evaluate(s, f) != oracles::naive_pp(s, f)) ++bad;
        if (is_tree(f) != oracles::incidence_is_tree(f)) ++tree_bad;
    }
    return {bad == 0 && tree_bad == 0, fmt("1000 pairs, %d evaluation mismatches, %d tree mismatches", bad, tree_bad)};
}

std::string edge_name(const PPScript& s) {
    for (auto& d : s.defs)
        if (d.prim && d.prim->kind == PrimKind::Edge) return d.name;
    return "";
}

Outcome robustness() {
    std::mt19937_64 rng(99);
    std::vector<PipelineRun*> certs;
    for (auto& r : hardness_runs)
        if (r.cert.sigma.size() >= 2 && certs.size() < 50) certs.push_back(&r);
    int false_rejects = 0, mutations = 0, rejected = 0, unstructured = 0;
    int by_kind[3] = {0, 0, 0}, rej_kind[3] = {0, 0, 0};
    for (auto* r : certs) {
        const Instance& in = r->in;
        if (!verify_certificate(in.g, in.gp, r->cert).ok) ++false_rejects;
        std::vector<std::pair<int, Certificate>> muts;
        // drop one atom of a formula definition
        std::vector<size_t> formulas;
        for (size_t i = 0; i < r->cert.script.defs.size(); ++i)
            if (!r->cert.script.defs[i].prim && !r->cert.script.defs[i].formula.atoms.empty()) formulas.push_back(i);
        for (int t = 0; t < 2 && !formulas.empty(); ++t) {
            Certificate c = r->cert;
            auto& f = c.script.defs[formulas[rng() % formulas.size()]].formula;
            f.atoms.erase(f.atoms.begin() + long(rng() % f.atoms.size()));
            muts.push_back({0, c});
        }
        // merge two σ blocks
        {
            Certificate c = r->cert;
            size_t i = rng() % c.sigma.size(), j = rng() % (c.sigma.size() - 1);
            if (j >= i) ++j;
            c.sigma[i].insert(c.sigma[i].end(), c.sigma[j].begin(), c.sigma[j].end());
            std::sort(c.sigma[i].begin(), c.sigma[i].end());
            c.sigma.erase(c.sigma.begin() + long(j));
            muts.push_back({1, c});
        }
        // swap the endpoints of one edge atom
        std::string en = edge_name(r->cert.script);
        std::vector<std::pair<size_t, size_t>> edge_atoms;
        for (size_t i = 0; i < r->cert.script.defs.size(); ++i) {
            auto& d = r->cert.script.defs[i];
            if (d.prim) continue;
            for (size_t a = 0; a < d.formula.atoms.size(); ++a)
                if (d.formula.atoms[a].rel == en && d.formula.atoms[a].vars[0] != d.formula.atoms[a].vars[1])
                    edge_atoms.push_back({i, a});
        }
        if (!edge_atoms.empty()) {
            Certificate c = r->cert;
            auto [i, a] = edge_atoms[rng() % edge_atoms.size()];
            auto& vs = c.script.defs[i].formula.atoms[a].vars;
            std::swap(vs[0], vs[1]);
            muts.push_back({2, c});
        }
        for (auto& [kind, c] : muts) {
            ++mutations;
            ++by_kind[kind];
            VerifyResult v = verify_certificate(in.g, in.gp, c);
            if (!v.ok) {
                ++rejected;
                ++rej_kind[kind];
                if (v.reasons.empty()) ++unstructured;
            }
        }
    }
    double rate = mutations ? double(rejected) / mutations : 0;
    bool ok = certs.size() >= 50 && rate >= 0.95 && false_rejects == 0 && unstructured == 0;
    return {ok, fmt("%zu certificates, %d mutations, %.1f%% rejected (drop atom %d/%d, merge %d/%d, swap %d/%d), "
                    "%d false rejections, %d without reasons",
                    certs.size(), mutations, 100 * rate, rej_kind[0], by_kind[0], rej_kind[1], by_kind[1], rej_kind[2],
                    by_kind[2], false_rejects, unstructured)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double budget;  // seconds, 0 for none
    };
    std::vector<Criterion> all{
        {1, "alpha matches the symmetric path oracle", alpha_oracle, 60},
        {2, "six-vertex swap instance", swap_reproduction, 0},
        {3, "finitising axioms on the corpus", finitising_axioms, 0},
        {4, "separated pairs and central escapes", separated_pairs, 120},
        {5, "euclid's hammer", euclid, 5},
        {6, "alpha on adjacent orbit pairs", alpha_pairs, 0},
        {7, "pipeline soundness", pipeline_soundness, 300},
        {8, "dichotomy cross-validation", dichotomy, 0},
        {9, "siggerscrap identities", siggerscrap, 0},
        {10, "pp-engine against naive semantics", pp_engine, 30},
        {11, "certificate robustness", robustness, 0},
    };
    int failed = 0;
    for (auto& c : all) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double dt = seconds_since(t0);
        bool in_time = c.budget == 0 || dt < c.budget;
        bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s criterion %d (%s): %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), dt,
                    in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(all.size()) - failed, all.size());
    return failed ? 1 : 0;
}

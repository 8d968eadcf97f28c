#include <set>

#include "doctest.h"
#include "loopsmith/corpus.hpp"
#include "loopsmith/paths.hpp"
#include "support.hpp"

using namespace loopsmith;

namespace {

// Random realisable labelled path of the given length from orbit o.
std::optional<LabelledPath> random_walk_path(const OrbitView& v, std::mt19937_64& rng, int o, int len) {
    LabelledPath p = LabelledPath::at(o);
    for (int i = 0; i < len; ++i) {
        std::vector<std::pair<Dir, int>> next;
        for (int q = 0; q < v.num_orbits(); ++q)
            for (Dir d : {Dir::Fwd, Dir::Bwd})
                if (v.adjacent(p.last(), d, q)) next.push_back({d, q});
        if (next.empty()) return std::nullopt;
        auto [d, q] = next[rng() % next.size()];
        p.push(d, q);
    }
    return p;
}

bool applicable(const Instance& in) {
    if (!is_smooth(in.g)) return false;
    OrbitQuotient q = orbit_digraph(in.g, in.gp);
    return !q.quotient.has_loop() && q.quotient.size() <= 8 && q.quotient.edge_count() > 0;
}

}  // namespace

TEST_CASE("gamma of small labelled paths") {
    Instance sw = swap_instance();
    OrbitView v(sw.g, sw.gp);
    BinRel id0 = gamma(v, LabelledPath::at(0));
    CHECK(id0 == BinRel::from_pairs(6, {{0, 0}, {3, 3}}));
    LabelledPath p = LabelledPath::at(0);
    p.push(Dir::Fwd, 2);
    CHECK(gamma(v, p) == BinRel::from_pairs(6, {{0, 2}, {3, 5}}));
    LabelledPath bad = LabelledPath::at(0);
    bad.push(Dir::Fwd, 7);
    CHECK_THROWS_AS(gamma(v, bad), std::invalid_argument);
}

TEST_CASE("appending a realisable symmetric path only grows gamma") {
    std::mt19937_64 rng(41);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 60; ++i) {
        Instance in = generate(rng(), {3, 7, 0.4, GroupMode::Sampled});
        OrbitView v(in.g, in.gp);
        auto pi = random_walk_path(v, rng, int(rng() % v.num_orbits()), 1 + int(rng() % 3));
        if (!pi) continue;
        auto q = random_walk_path(v, rng, pi->last(), 1 + int(rng() % 3));
        if (!q || !realisable(v, *q)) continue;
        ++checked;
        LabelledPath rho = *q + q->reversed();
        CHECK(gamma(v, *pi).subset_of(gamma(v, *pi + rho)));
    }
    CHECK(checked >= 20);
}

TEST_CASE("merges contain both labellings") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 80; ++i) {
        Instance in = generate(rng(), {3, 7, 0.45, GroupMode::Sampled});
        OrbitView v(in.g, in.gp);
        auto a = random_walk_path(v, rng, int(rng() % v.num_orbits()), 3);
        if (!a) continue;
        // relabel along the same abstract path
        LabelledPath b = LabelledPath::at(int(rng() % v.num_orbits()));
        bool ok = true;
        for (Dir d : a->path.steps) {
            std::vector<int> nx;
            for (int q = 0; q < v.num_orbits(); ++q)
                if (v.adjacent(b.last(), d, q)) nx.push_back(q);
            if (nx.empty()) {
                ok = false;
                break;
            }
            b.push(d, nx[rng() % nx.size()]);
        }
        if (!ok) continue;
        BinRel m = gamma(v, MergedPath::merge(*a, b));
        CHECK((gamma(v, *a) | gamma(v, b)).subset_of(m));
    }
}

TEST_CASE("proper separation") {
    Instance sw = swap_instance();
    OrbitView v(sw.g, sw.gp);
    LabelledPath p = LabelledPath::at(0);
    p.push(Dir::Fwd, 2);
    p.push(Dir::Fwd, 1);
    CHECK_FALSE(is_properly_separated(v, p, p));
    LabelledPath shorter = LabelledPath::at(0);
    CHECK_THROWS_AS(is_properly_separated(v, p, shorter), std::invalid_argument);
}

TEST_CASE("euclid's hammer") {
    CHECK(euclid_hammer(2, 3, 7) == std::pair<int, int>{2, 1});
    auto [s, t] = euclid_hammer(3, 4, 13);
    CHECK(s > 0);
    CHECK(t > 0);
    CHECK(3 * s + 4 * t == 13);
    CHECK_THROWS_AS(euclid_hammer(2, 4, 9), std::invalid_argument);
    CHECK_THROWS_AS(euclid_hammer(2, 3, 6), std::invalid_argument);
    CHECK_THROWS_AS(euclid_hammer(2, 3, 8), std::invalid_argument);
}

TEST_CASE("separated pair on the swap quotient") {
    Instance sw = swap_instance();
    OrbitView v(sw.g, sw.gp);
    LabelledPath pi = LabelledPath::at(0);
    SeparatedPair sp = build_separated_pair(v, pi, 2);
    CHECK(is_properly_separated(v, sp.ext, sp.rho));
    CHECK(is_extension(sp.ext, pi));
    CHECK(sp.ext.first() == 0);
    CHECK(sp.ext.last() == 0);
    CHECK(sp.rho.first() == 2);
    CHECK(sp.rho.last() == 2);
    CHECK(realisable(v, sp.rho));
    CHECK(is_properly_separated(v, sp.rho.reversed(), sp.ext.reversed()));
    CHECK(is_properly_separated(v, build_separated_pair(v, pi, 1).ext, build_separated_pair(v, pi, 1).rho));
    CHECK_THROWS_AS(build_separated_pair(v, pi, 0), std::invalid_argument);
}

TEST_CASE("separated pairs on random loopless quotients") {
    std::mt19937_64 rng(47);
    int checked = 0;
    for (int i = 0; i < 300 && checked < 60; ++i) {
        GenParams prm{3, 8, 0.35, i % 2 ? GroupMode::Covering : GroupMode::Sampled};
        prm.smooth = true;
        prm.loopless = true;
        Instance in = generate(rng(), prm);
        if (!applicable(in)) continue;
        OrbitView v(in.g, in.gp);
        auto& q = v.quotient();
        for (int o = 0; o < q.size(); ++o)
            for (int p : q.out(o)) {
                auto pi = random_walk_path(v, rng, o, 0);
                SeparatedPair sp = build_separated_pair(v, *pi, p);
                ++checked;
                CHECK(is_properly_separated(v, sp.ext, sp.rho));
                CHECK(is_extension(sp.ext, *pi));
                CHECK(realisable(v, sp.rho));
                // realisations of the merge that start in O follow the top row
                BinRel m = gamma(v, MergedPath::merge(sp.ext, sp.rho));
                Bits start = v.orbit_set(o);
                BinRel top = gamma(v, sp.ext);
                for (int a = 0; a < in.g.size(); ++a)
                    if (start.test(a)) CHECK(m.row(a) == top.row(a));
            }
    }
    CHECK(checked >= 60);
}

TEST_CASE("central escapes exercise both constructions") {
    std::mt19937_64 rng(53);
    std::set<std::string> methods;
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        GenParams prm{3, 7, 0.35, GroupMode::Trivial};
        prm.smooth = true;
        prm.loopless = true;
        Instance in = generate(rng(), prm);
        if (!applicable(in)) continue;
        OrbitView v(in.g, in.gp);
        int n = v.num_orbits();
        Bits corb(n);
        for (int o = 0; o < n; ++o)
            if (rng() % 2) corb.set(o);
        if (corb.none() || corb.all()) continue;
        Bits c(in.g.size());
        corb.for_each([&](int o) { c |= v.orbit_set(o); });
        for (int oi = 0; oi < n; ++oi) {
            if (!corb.test(oi)) continue;
            for (int oo = 0; oo < n; ++oo) {
                if (corb.test(oo) || !(v.adjacent(oi, Dir::Fwd, oo) || v.adjacent(oi, Dir::Bwd, oo))) continue;
                CentralEscape ce = build_central_escape(v, c, oi, oo);
                ++checked;
                methods.insert(ce.method);
                CHECK(is_properly_separated(v, ce.pi, ce.pi_prime));
                CHECK(ce.pi.first() == oi);
                CHECK(ce.pi_prime.first() == oo);
                CHECK(ce.pi.last() == ce.o_out2);
                CHECK(ce.pi_prime.last() == ce.o_in2);
                CHECK(corb.test(ce.o_in2));
                CHECK_FALSE(corb.test(ce.o_out2));
            }
        }
    }
    CHECK(checked >= 50);
    CHECK(methods.size() >= 2);
}

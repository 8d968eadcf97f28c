#include "doctest.h"
#include "loopsmith/corpus.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/pp.hpp"
#include "loopsmith/script.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace loopsmith;
using testing::random_digraph;
using testing::set_of;

namespace {

PPFormula two_step() {
    PPFormula f;
    f.num_vars = 3;
    f.free = {0, 2};
    f.add("E", {0, 1});
    f.add("E", {1, 2});
    return f;
}

PPFormula sum(const std::string& set, bool forward) {
    PPFormula f;
    f.num_vars = 2;
    f.free = {1};
    f.add(set, {0});
    f.add("E", forward ? std::vector<int>{0, 1} : std::vector<int>{1, 0});
    return f;
}

// Random tree formula with one free variable; params bind some variables to classes.
PPFormula random_tree(std::mt19937_64& rng, int vars, int classes) {
    PPFormula f;
    f.num_vars = 1;
    f.free = {0};
    for (int v = 1; v < vars; ++v) {
        int x = int(rng() % v);
        f.num_vars++;
        if (rng() % 2)
            f.add("E", {x, v});
        else
            f.add("E", {v, x});
    }
    for (int v = 0; v < vars; ++v)
        if (rng() % 3 == 0) f.params.push_back({v, int(rng() % classes)});
    return f;
}

PPFormula random_formula(std::mt19937_64& rng, const std::vector<std::pair<std::string, int>>& rels) {
    PPFormula f;
    f.num_vars = 1 + int(rng() % 6);
    int atoms = int(rng() % 6);
    for (int i = 0; i < atoms; ++i) {
        auto& [name, ar] = rels[rng() % rels.size()];
        std::vector<int> vs;
        for (int j = 0; j < ar; ++j) vs.push_back(int(rng() % f.num_vars));
        f.add(name, vs);
    }
    int nfree = int(rng() % (f.num_vars + 1));
    for (int v = 0; v < f.num_vars && int(f.free.size()) < nfree; ++v)
        if (rng() % 2 || f.num_vars - v <= nfree - int(f.free.size())) f.free.push_back(v);
    return f;
}

}  // namespace

TEST_CASE("evaluation of small formulas") {
    NamedStructure c3 = NamedStructure(3);
    c3.add("E", directed_cycle(3).g.relation());
    CHECK(evaluate(c3, two_step()).to_bin() == BinRel::from_pairs(3, {{0, 2}, {1, 0}, {2, 1}}));

    PPFormula empty;
    empty.num_vars = 1;
    empty.free = {0};
    CHECK(evaluate(c3, empty).to_set().all());

    PPFormula bad = two_step();
    bad.add("F", {0});
    CHECK_THROWS_AS(evaluate(c3, bad), std::invalid_argument);
    PPFormula arity = two_step();
    arity.add("E", {0});
    CHECK_THROWS_AS(evaluate(c3, arity), std::invalid_argument);
}

TEST_CASE("orbit unions from the three-orbit pattern") {
    NamedStructure q(3);
    q.add("E", siggerscrap_pattern().relation());
    for (int i = 0; i < 3; ++i) q.add("O" + std::to_string(i), set_of(3, {i}));
    q.add("O0f", evaluate(q, sum("O0", true)));
    CHECK(evaluate(q, sum("O0f", true)).to_set() == set_of(3, {0, 1}));
    CHECK(evaluate(q, sum("O1", false)).to_set() == set_of(3, {0, 2}));
    CHECK(q.get("O0f").to_set() == set_of(3, {1, 2}));
}

TEST_CASE("tree detection") {
    PPFormula one;
    one.num_vars = 2;
    one.add("E", {0, 1});
    CHECK(is_tree(one));
    PPFormula tri;
    tri.num_vars = 3;
    tri.add("E", {0, 1});
    tri.add("E", {1, 2});
    tri.add("E", {2, 0});
    CHECK_FALSE(is_tree(tri));
    PPFormula fence;
    int len = 8;
    fence.num_vars = len + 1;
    fence.free = {0, len};
    for (int i = 0; i < len; ++i) fence.add("E", (i / 2) % 2 ? std::vector<int>{i + 1, i} : std::vector<int>{i, i + 1});
    CHECK(is_tree(fence));

    std::mt19937_64 rng(71);
    std::vector<std::pair<std::string, int>> rels{{"E", 2}, {"U", 1}, {"T", 3}};
    for (int i = 0; i < 300; ++i) {
        PPFormula f = random_formula(rng, rels);
        CHECK(is_tree(f) == oracles::incidence_is_tree(f));
    }
}

TEST_CASE("evaluation agrees with naive semantics") {
    std::mt19937_64 rng(73);
    for (int i = 0; i < 200; ++i) {
        int n = 1 + int(rng() % 5);
        NamedStructure s(n);
        s.add("E", random_digraph(rng, n, 0.4, true).relation());
        Bits u(n);
        for (int v = 0; v < n; ++v)
            if (rng() % 2) u.set(v);
        s.add("U", u);
        std::vector<std::vector<int>> ts;
        for (int k = 0; k < 6; ++k) ts.push_back({int(rng() % n), int(rng() % n), int(rng() % n)});
        s.add("T", KaryRel::from_tuples(n, 3, ts));
        PPFormula f = random_formula(rng, {{"E", 2}, {"U", 1}, {"T", 3}});
        if (rng() % 4 == 0) f.params.push_back({int(rng() % f.num_vars), int(rng() % n)});
        CHECK(evaluate(s, f) == oracles::naive_pp(s, f));

        // monotone in each relation
        NamedStructure bigger = s;
        BinRel e = s.get("E").to_bin();
        e.set(int(rng() % n), int(rng() % n));
        bigger.add("E", e);
        CHECK(evaluate(s, f).subset_of(evaluate(bigger, f)));
    }
}

TEST_CASE("lifting tree definitions through alpha") {
    std::mt19937_64 rng(79);
    std::vector<Instance> ins{
        {"k22", Digraph(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 0}, {2, 1}, {3, 0}, {3, 1}}),
         PermGroup(4, {{1, 0, 2, 3}, {0, 1, 3, 2}}), {}},
        {"c4rot", directed_cycle(4).g, PermGroup(4, {{2, 3, 0, 1}}), {}},
        swap_instance()};
    for (auto& in : ins) {
        Alpha a = compute_alpha(in.g, in.gp);
        Digraph q = quotient(in.g, a);
        NamedStructure qs(q.size());
        qs.add("E", q.relation());
        NamedStructure base(in.g.size());
        base.add("E", in.g.relation());
        for (int c = 0; c < a.num_classes(); ++c) base.add("C" + std::to_string(c), a.class_set(c));
        for (int i = 0; i < 20; ++i) {
            PPFormula f = random_tree(rng, 1 + int(rng() % 5), a.num_classes());
            REQUIRE(is_tree(f));
            PPFormula lifted = lift_tree_def(f, [](int c) { return "C" + std::to_string(c); });
            Bits want = a.blow_up(evaluate(qs, f).to_set());
            CHECK(evaluate(base, lifted).to_set() == want);
        }
    }
    PPFormula tri;
    tri.num_vars = 3;
    tri.free = {0};
    tri.add("E", {0, 1});
    tri.add("E", {1, 2});
    tri.add("E", {2, 0});
    CHECK_THROWS_AS(lift_tree_def(tri, [](int) { return std::string("C"); }), std::invalid_argument);
}

TEST_CASE("OR relations") {
    KaryRel none(3, 1);
    CHECK(or_relation(none, none).empty());
    KaryRel full = KaryRel::full(3, 1);
    KaryRel x = KaryRel::from_set(set_of(3, {1}));
    CHECK(or_relation(full, x).is_full());
    std::mt19937_64 rng(83);
    for (int i = 0; i < 30; ++i) {
        int n = 2 + int(rng() % 3), k = 1 + int(rng() % 2);
        std::vector<std::vector<int>> ts;
        for (int j = 0; j < 4; ++j) {
            std::vector<int> t;
            for (int c = 0; c < k; ++c) t.push_back(int(rng() % n));
            ts.push_back(t);
        }
        KaryRel r = KaryRel::from_tuples(n, k, ts);
        long m = long(r.size()), nk = 1;
        for (int c = 0; c < k; ++c) nk *= n;
        CHECK(long(or_relation(r, r).size()) == 2 * m * nk - m * m);
    }
}

TEST_CASE("the representative relation") {
    Alpha eq = compute_alpha(directed_cycle(4).g, PermGroup::trivial(4));
    KaryRel ig = build_IG(PermGroup::trivial(4), eq);
    CHECK(ig.arity() == 4);
    REQUIRE(ig.size() == 1);
    CHECK(ig.at(0) == std::vector<int>{0, 1, 2, 3});

    Instance sw = swap_instance();
    Alpha a = compute_alpha(sw.g, sw.gp);
    KaryRel f = build_IG(sw.gp, a);
    CHECK(f.arity() == a.num_classes());
    CHECK(f.size() == 2);
    CHECK(f.contains(std::vector<int>{0, 1, 2, 3, 4, 5}));
    CHECK(f.contains(std::vector<int>{3, 4, 5, 0, 1, 2}));
}

TEST_CASE("oplus") {
    std::mt19937_64 rng(89);
    for (int i = 0; i < 60; ++i) {
        Instance in = generate(rng(), {4, 8, 0.4, GroupMode::Covering, 2});
        Alpha a = compute_alpha(in.g, in.gp);
        int n = in.g.size();
        BinRel r = in.g.relation().compose(in.g.relation());
        Bits one = a.class_set(0);
        CHECK(oplus(one, r, a) == r.image(one));
        CHECK(oplus(Bits(n), r, a).all());
        Bits h(n);
        std::vector<int> cls;
        for (int c = 0; c < a.num_classes(); ++c)
            if (rng() % 2) {
                h |= a.class_set(c);
                cls.push_back(c);
            }
        Bits want(n, true);
        for (int c : cls) want &= r.image(a.class_set(c));
        CHECK(oplus(h, r, a) == want);
    }
    Digraph k22(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 0}, {2, 1}, {3, 0}, {3, 1}});
    Alpha a = compute_alpha(k22, PermGroup(4, {{1, 0, 2, 3}, {0, 1, 3, 2}}));
    CHECK_THROWS_AS(oplus(set_of(4, {0}), k22.relation(), a), std::invalid_argument);
}

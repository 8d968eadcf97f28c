#include "doctest.h"
#include "loopsmith/alpha_pairs.hpp"
#include "loopsmith/corpus.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/script.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace loopsmith;
using testing::set_of;

namespace {

Instance rotated_c4() { return {"c4rot", directed_cycle(4).g, PermGroup(4, {{2, 3, 0, 1}}), {}}; }

Alpha equality_alpha(const Instance& in) {
    std::vector<int> cls(in.g.size());
    for (int v = 0; v < in.g.size(); ++v) cls[v] = v;
    return Alpha::from_partition(cls, in.gp.orbit_ids());
}

}  // namespace

TEST_CASE("alpha on the named instances") {
    Instance sw = swap_instance();
    Alpha a = compute_alpha(sw.g, sw.gp);
    CHECK(a.num_classes() == 6);
    CHECK(a.num_orbits == 3);
    CHECK(quotient(sw.g, a) == sw.g);
    CHECK(a.relation() == BinRel::identity(6));

    Alpha t = compute_alpha(directed_cycle(5).g, PermGroup::trivial(5));
    CHECK(t.relation() == BinRel::identity(5));

    Instance c4 = rotated_c4();
    Alpha r = compute_alpha(c4.g, c4.gp);
    CHECK(r.relation() == BinRel::identity(4));
    CHECK(quotient(c4.g, r) == c4.g);
    CHECK(orbit_digraph(c4.g, c4.gp).quotient == directed_cycle(2).g);
}

TEST_CASE("finitising axioms") {
    Instance sw = swap_instance();
    CHECK(check_finitises(compute_alpha(sw.g, sw.gp), sw.g, sw.gp).ok());
    CHECK(check_finitises(equality_alpha(sw), sw.g, sw.gp).ok());
    auto ids = sw.gp.orbit_ids();
    FinitiseReport om = check_finitises(Alpha::from_partition(ids, ids), sw.g, sw.gp);
    CHECK(om.a2);
    CHECK(om.ok() == om.violations.empty());

    // a split that is not invariant
    std::vector<int> bad{0, 1, 2, 0, 1, 3};
    std::vector<int> obad{0, 1, 2, 0, 1, 2};
    FinitiseReport br = check_finitises(Alpha::from_partition(bad, obad), sw.g, sw.gp);
    CHECK_FALSE(br.ok());
    CHECK_FALSE(br.violations.empty());
}

TEST_CASE("quotients and blow-ups") {
    Instance sw = swap_instance();
    Alpha a = compute_alpha(sw.g, sw.gp);
    CHECK(blow_up(quotient(sw.g, a).relation(), a) == sw.g.relation());
    Instance c4 = rotated_c4();
    Alpha eq4 = equality_alpha({"", c4.g, PermGroup::trivial(4), {}});
    CHECK(quotient(c4.g, eq4) == c4.g);

    // coarse classes: two classes per orbit pair on a double cover
    Instance cov = covering_instance(siggerscrap_pattern(), 3, {0, 1, 2, 0});
    Alpha ac = compute_alpha(cov.g, cov.gp);
    Bits cls0 = Bits::from(ac.num_classes(), {0});
    CHECK(blow_up(cls0, ac) == ac.class_set(0));
    BinRel lifted = blow_up(quotient(cov.g, ac).relation(), ac);
    CHECK(cov.g.relation().subset_of(lifted));
    CHECK((lifted == cov.g.relation()) == is_alpha_stable(cov.g.relation(), ac));
}

TEST_CASE("alpha stability") {
    Instance cov{"k22", Digraph(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 0}, {2, 1}, {3, 0}, {3, 1}}),
                 PermGroup(4, {{1, 0, 2, 3}, {0, 1, 3, 2}}), {}};
    Alpha a = compute_alpha(cov.g, cov.gp);
    REQUIRE(a.classes[0].size() == 2);
    BinRel idc(cov.g.size());
    for (int x : a.classes[0])
        for (int y : a.classes[0]) idc.set(x, y);
    CHECK(is_alpha_stable(idc, a));
    CHECK_FALSE(is_alpha_stable(Bits::from(cov.g.size(), {a.classes[0][0]}), a));
    CHECK(is_alpha_stable(blow_up(Bits::from(a.num_classes(), {0, 1}), a), a));
}

TEST_CASE("alpha matches the symmetric path oracle") {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 60; ++i) {
        int n = 3 + int(rng() % 4);
        Instance in = generate(rng(), {n, n, 0.35, i % 3 == 2 ? GroupMode::Covering : GroupMode::Sampled});
        Alpha a = compute_alpha(in.g, in.gp);
        int sz = in.g.size();
        CHECK(a.relation() == oracles::brute_force_alpha(in.g, in.gp, sz * sz));
        CHECK(check_finitises(a, in.g, in.gp).ok());
        for (auto& wc : weak_components(in.g)) CHECK(is_alpha_stable(Bits::from(sz, wc), a));
    }
}

TEST_CASE("images of alpha-stable sets under invariant relations stay stable") {
    std::mt19937_64 rng(67);
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        Instance in = generate(rng(), {4, 8, 0.35, GroupMode::Covering, 2 + int(rng() % 2)});
        Alpha a = compute_alpha(in.g, in.gp);
        int n = in.g.size();
        auto comps = weak_components(in.g);
        // S = a random walk relation with orbit-restricted intermediate steps
        BinRel s = BinRel::identity(n);
        int len = 1 + int(rng() % 4);
        for (int k = 0; k < len; ++k) {
            BinRel step = rng() % 2 ? in.g.relation() : in.g.relation().inverse();
            if (rng() % 2) {
                Bits o = a.orbit_set(int(rng() % a.num_orbits));
                for (int v = 0; v < n; ++v) step.row(v) &= o;
            }
            s = s.compose(step);
        }
        Bits x = a.class_set(int(rng() % a.num_classes()));
        if (rng() % 2) x |= a.class_set(int(rng() % a.num_classes()));
        Bits img = s.image(x);
        if (img.none()) continue;
        // X and X+S inside one weak component
        bool same = false;
        for (auto& wc : comps) {
            Bits c = Bits::from(n, wc);
            if (x.subset_of(c) && img.subset_of(c)) same = true;
        }
        if (!same) continue;
        ++checked;
        CHECK(is_alpha_stable(img, a));
    }
    CHECK(checked >= 30);
}

TEST_CASE("alpha on adjacent orbit pairs") {
    auto run = [](const Instance& in, int o, int p) {
        Alpha a = compute_alpha(in.g, in.gp);
        AlphaPairDef d = alpha_on_pairs_ppdef(in.g, in.gp, a, o, p);
        for (auto& def : d.script.defs)
            if (def.prim) CHECK((def.prim->kind == PrimKind::Edge || def.prim->kind == PrimKind::OrbitUnion));
        ScriptEvaluator ev(in.g, in.gp, a);
        ev.run(d.script);
        Bits op = a.orbit_set(o) | a.orbit_set(p);
        BinRel want = a.relation().restrict(op);
        CHECK(ev.value(d.script.output).to_bin() == want);
        return d;
    };
    Instance sw = swap_instance();
    AlphaPairDef d1 = run(sw, 0, 2);
    AlphaPairDef d2 = run(sw, 0, 2);
    CHECK(d1.script == d2.script);
    run(rotated_c4(), 0, 1);
    CHECK_THROWS_AS(alpha_on_pairs_ppdef(sw.g, sw.gp, compute_alpha(sw.g, sw.gp), 1, 1), std::invalid_argument);
}

#include <map>

#include "doctest.h"
#include "loopsmith/corpus.hpp"
#include "loopsmith/pipeline.hpp"
#include "support.hpp"

using namespace loopsmith;
using testing::set_of;

namespace {

GenParams smooth_params(GroupMode mode, int lo, int hi, double density) {
    GenParams p{lo, hi, density, mode};
    p.smooth = true;
    p.loopless = true;
    return p;
}

bool accepted(const Digraph& g) { return is_smooth(g) && find_unit_walk(g).has_value(); }

// Drives the induction step by step, checking each output against the domain it came from.
std::map<std::string, int> drive(const Instance& in) {
    std::map<std::string, int> seen;
    Pipeline p(in.g, in.gp);
    const Alpha& a = p.alpha();
    auto classes_in = [&](const Bits& d) {
        int c = 0;
        for (int i = 0; i < a.num_classes(); ++i)
            if (a.class_set(i).subset_of(d)) ++c;
        return c;
    };
    auto check_reduction = [&](const Reduction& r, const Bits& before) {
        CHECK(r.domain.subset_of(before));
        CHECK(r.domain.any());
        CHECK(classes_in(r.domain) < classes_in(before));
        CHECK(is_alpha_stable(r.domain, a));
        CHECK(p.value(r.name).to_set() == r.domain);
        if (!r.domain.all()) CHECK(is_reductionistic(r.domain, in.gp));
    };
    auto check_unary_or = [&](const UnaryOr& u) {
        CHECK(u.u.any());
        CHECK(u.u.subset_of(p.domain()));
        CHECK(u.u != p.domain());
        CHECK(p.value(u.name) == or_relation(KaryRel::from_set(u.u), KaryRel::from_set(u.u), p.domain()));
    };
    for (int round = 0; round < 64; ++round) {
        Bits before = p.domain();
        REQUIRE(p.k() >= 1);
        std::optional<Reduction> red;
        std::optional<UnaryOr> u;
        if (p.full_power()) {
            seen["full"]++;
            red = p.step_full_case();
        } else {
            MarcinResult m = p.step_marcinsmagic();
            if (auto* c = std::get_if<CentralRel>(&m)) {
                seen["central"]++;
                CHECK(p.value(c->name).to_bin() == c->rel);
                CHECK(is_alpha_stable(c->rel, a));
                OrPair o = p.step_central_to_or(*c);
                CHECK(o.left.any());
                CHECK(o.right.any());
                CHECK(is_alpha_stable(o.left, a));
                CHECK(is_alpha_stable(o.right, a));
                CHECK(p.value(o.name) ==
                      or_relation(KaryRel::from_set(o.left), KaryRel::from_set(o.right), p.domain()));
                LinkResult l = p.step_or_to_unary(o);
                if (auto* r = std::get_if<Reduction>(&l))
                    red = *r;
                else
                    u = std::get<UnaryOr>(l);
            } else {
                seen["tsr"]++;
                const TsrOr& t = std::get<TsrOr>(m);
                CHECK(t.arity >= 1);
                CHECK(p.value(t.name).arity() == 2 * t.arity);
                TsrResult tr = p.step_tsr_to_sigma(t);
                if (std::holds_alternative<SigmaOr>(tr)) return seen;
                u = std::get<UnaryOr>(tr);
            }
            if (u) {
                seen["unary"]++;
                check_unary_or(*u);
                FinalResult f = p.step_unary_to_sigma(*u);
                if (auto* s = std::get_if<SigmaOr>(&f)) {
                    CHECK(s->blocks.size() >= 2);
                    return seen;
                }
                red = std::get<Reduction>(f);
            }
        }
        check_reduction(*red, before);
        p.set_domain(red->domain, red->name);
    }
    FAIL("induction did not terminate");
    return seen;
}

}  // namespace

TEST_CASE("pseudoloop certificates") {
    Digraph ab(2, {{0, 1}, {1, 0}});
    Certificate c = run_master(ab, PermGroup(2, {{1, 0}}));
    CHECK(c.kind == Certificate::Kind::Pseudoloop);
    CHECK(c.orbit == 0);
    CHECK(ab.has_edge(c.edge.first, c.edge.second));
    CHECK(verify_certificate(ab, PermGroup(2, {{1, 0}}), c).ok);

    Instance c4 = directed_cycle(4);
    Certificate r = run_master(c4.g, PermGroup(4, {{1, 2, 3, 0}}));
    CHECK(r.kind == Certificate::Kind::Pseudoloop);
    Certificate fake = r;
    fake.edge = {0, 2};
    CHECK_FALSE(verify_certificate(c4.g, PermGroup(4, {{1, 2, 3, 0}}), fake).ok);
}

TEST_CASE("rejected inputs") {
    CHECK_THROWS_AS(run_master(Digraph(3, {{0, 1}, {1, 2}}), PermGroup::trivial(3)), PreconditionError);
    Instance c3 = directed_cycle(3);
    CHECK_THROWS_AS(run_master(c3.g, c3.gp), PreconditionError);
    Instance sw = swap_instance();
    CHECK_THROWS_AS(run_master(sw.g, sw.gp), PreconditionError);
}

TEST_CASE("hardness of the symmetric triangle") {
    Instance k3 = symmetric_k3();
    Certificate c = run_master(k3.g, k3.gp);
    REQUIRE(c.kind == Certificate::Kind::Hardness);
    CHECK(c.sigma.size() >= 2);
    CHECK(c.component.size() == 3);
    CHECK(c.script.validate().empty());
    CHECK(c.script.pruned() == c.script);
    CHECK(c.digests.size() == c.script.defs.size());
    CHECK(licensing_errors(k3.g, k3.gp, c.script).empty());
    VerifyResult v = verify_certificate(k3.g, k3.gp, c);
    CHECK(v.ok);
    for (auto& r : v.reasons) MESSAGE(r);
    CHECK_FALSE(c.trace.empty());

    Certificate again = run_master(k3.g, k3.gp);
    CHECK(again.script == c.script);
    CHECK(again.sigma == c.sigma);
}

TEST_CASE("tampered certificates are rejected") {
    Instance k3 = symmetric_k3();
    Certificate c = run_master(k3.g, k3.gp);
    REQUIRE(c.kind == Certificate::Kind::Hardness);

    Certificate merged = c;
    std::vector<int> all;
    for (auto& b : merged.sigma) all.insert(all.end(), b.begin(), b.end());
    merged.sigma = {all};
    CHECK_FALSE(verify_certificate(k3.g, k3.gp, merged).ok);

    Certificate renamed = c;
    renamed.script.output = "missing";
    CHECK_FALSE(verify_certificate(k3.g, k3.gp, renamed).ok);

    Certificate unlicensed = c;
    unlicensed.script.defs.insert(unlicensed.script.defs.begin(),
                                  Definition{"Xbad", 1, Primitive{PrimKind::OrbitUnion, {0, 1, 2}, ""}, {}});
    CHECK_FALSE(licensing_errors(k3.g, k3.gp, unlicensed.script).empty());
    CHECK_FALSE(verify_certificate(k3.g, k3.gp, unlicensed).ok);

    Certificate edited = c;
    for (auto& d : edited.script.defs)
        if (!d.prim && d.formula.atoms.size() > 1) {
            d.formula.atoms.pop_back();
            break;
        }
    VerifyResult ev = verify_certificate(k3.g, k3.gp, edited);
    CHECK_FALSE(ev.ok);
    CHECK_FALSE(ev.reasons.empty());

    Certificate no_digest = c;
    no_digest.digests.erase(no_digest.digests.begin());
    CHECK_FALSE(verify_certificate(k3.g, k3.gp, no_digest).ok);

    Certificate bad_kind = c;
    bad_kind.kind = Certificate::Kind::Pseudoloop;
    CHECK_FALSE(verify_certificate(k3.g, k3.gp, bad_kind).ok);
}

TEST_CASE("step postconditions on sampled corpora") {
    std::map<std::string, int> total;
    int ran = 0;
    std::vector<GenParams> mixes{smooth_params(GroupMode::Trivial, 3, 5, 0.4),
                                 smooth_params(GroupMode::Sampled, 4, 7, 0.4),
                                 smooth_params(GroupMode::Covering, 4, 8, 0.35)};
    for (size_t mi = 0; mi < mixes.size(); ++mi)
        for (int s = 0; s < 25; ++s) {
            Instance in = generate(5000 + 100 * mi + s, mixes[mi]);
            if (orbit_digraph(in.g, in.gp).loop_witness || !accepted(in.g)) continue;
            if (weak_components(in.g).size() != 1) continue;
            ++ran;
            for (auto& [k, v] : drive(in)) total[k] += v;
        }
    CHECK(ran >= 20);
    CHECK(total["central"] + total["tsr"] >= ran);
}

TEST_CASE("the full-power step needs k at least two") {
    Instance k3 = symmetric_k3();
    Pipeline p(k3.g, k3.gp);
    CHECK(p.k() == 1);
    CHECK_FALSE(p.full_power());
    CHECK_THROWS_AS(p.step_full_case(), std::logic_error);
}

TEST_CASE("certificates on sampled corpora verify") {
    int hard = 0;
    for (int s = 0; s < 40; ++s) {
        GenParams p = smooth_params(s % 2 ? GroupMode::Sampled : GroupMode::Trivial, 3, 6, 0.4);
        Instance in = generate(7000 + s, p);
        if (!orbit_digraph(in.g, in.gp).loop_witness && !accepted(in.g)) {
            CHECK_THROWS_AS(run_master(in.g, in.gp), PreconditionError);
            continue;
        }
        Certificate c = run_master(in.g, in.gp);
        VerifyResult v = verify_certificate(in.g, in.gp, c);
        CHECK(v.ok);
        if (c.kind == Certificate::Kind::Hardness) {
            ++hard;
            CHECK(c.sigma.size() >= 2);
            CHECK(licensing_errors(in.g, in.gp, c.script).empty());
        }
    }
    CHECK(hard >= 5);
}

TEST_CASE("verification requires a consistent instance") {
    Instance k3 = symmetric_k3();
    Certificate c = run_master(k3.g, k3.gp);
    Digraph other(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
    CHECK_FALSE(verify_certificate(other, k3.gp, c).ok);
}

#include <algorithm>
#include <functional>
#include <set>

#include "loopsmith/paths.hpp"
#include "loopsmith/alpha_pairs.hpp"
#include "loopsmith/pipeline.hpp"

namespace loopsmith {

namespace {
int least(const std::vector<int>& c) { return *std::min_element(c.begin(), c.end()); }
}  // namespace

namespace {

PPFormula drop_atoms(const PPFormula& f, const std::vector<size_t>& idx, size_t count) {
    std::set<size_t> gone(idx.begin(), idx.begin() + count);
    PPFormula r = f;
    r.atoms.clear();
    for (size_t i = 0; i < f.atoms.size(); ++i)
        if (!gone.count(i)) r.atoms.push_back(f.atoms[i]);
    return r;
}

BinRel equiv_closure(const BinRel& q) {
    return (q | q.inverse() | BinRel::identity(q.size())).transitive_closure();
}

bool linked(const BinRel& q) { return equiv_closure(q).is_full(); }

// All increasing k-subsets of 0..n-1.
void for_subsets(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> c(k);
    std::function<void(int, int)> rec = [&](int pos, int from) {
        if (pos == k) {
            f(c);
            return;
        }
        for (int i = from; i <= n - (k - pos); ++i) {
            c[pos] = i;
            rec(pos + 1, i + 1);
        }
    };
    if (k >= 0 && k <= n) rec(0, 0);
}

int popcount(uint64_t x) { return __builtin_popcountll(x); }

size_t ipow(size_t b, int e) {
    size_t r = 1;
    for (int i = 0; i < e; ++i) {
        r *= b;
        if (r > (size_t(1) << 40)) return r;
    }
    return r;
}

// Relation over [m]^arity of tuples whose entry set satisfies pred.
KaryRel by_entry_set(int m, int arity, const std::function<bool(uint64_t)>& pred) {
    if (ipow(size_t(m), arity) > 8000000) throw ResourceLimit("relation on the quotient is too large");
    KaryRel r(m, arity);
    std::vector<int> t(arity, 0);
    for (;;) {
        uint64_t mask = 0;
        for (int x : t) mask |= uint64_t(1) << x;
        if (pred(mask)) r.push(t);
        int i = arity - 1;
        while (i >= 0 && ++t[i] == m) t[i--] = 0;
        if (i < 0) break;
    }
    r.normalize();
    return r;
}

}  // namespace

KaryRel Pipeline::globalise(const KaryRel& local) const {
    KaryRel r(alpha_.num_classes(), local.arity());
    std::vector<int> t(local.arity());
    for (size_t i = 0; i < local.size(); ++i) {
        for (int j = 0; j < local.arity(); ++j) t[j] = view_.cls[local.tuple(i)[j]];
        r.push(t);
    }
    r.normalize();
    return r;
}

Bits Pipeline::domain_classes() const {
    Bits b(alpha_.num_classes());
    for (int c : view_.cls) b.set(c);
    return b;
}

// ---------------------------------------------------------------------------- full power

Reduction Pipeline::step_full_case() {
    const Digraph& J = view_.quotient;
    int k = k_;
    expect(k >= 2, "full power at k = 1");
    Linkedness beta = linkedness(J, k - 1);
    Bits kp_local = beta.equivalence.row(0);
    PPFormula f;
    int a = f.fresh();
    f.add(cls(view_.cls[0]), {a});
    f.free = {add_path(f, a, AbstractPath::fence(k - 1, beta.saturation))};
    std::string kp = define("Kp", f);
    expect(unary(kp) == blow(kp_local, view_), "linkedness class");

    Bits s_local = smooth_part(J, kp_local);
    expect(s_local.any(), "smooth part of the linkedness class is empty");
    int len = kp_local.count();
    PPFormula fs;
    int x = fs.fresh();
    fs.free = {x};
    fs.add(kp, {x});
    add_path(fs, x, AbstractPath::forward(len), {kp});
    add_path(fs, x, AbstractPath::backward(len), {kp});
    std::string sm = define("Sm", fs);
    expect(unary(sm) == blow(s_local, view_), "smooth part");

    int a2 = s_local.first();
    std::vector<int> to_j;
    Digraph js = J.induced(s_local, &to_j);
    Linkedness lk = linkedness(js, k - 1);
    Bits comp_local(J.size());
    lk.equivalence.row(0).for_each([&](int i) { comp_local.set(to_j[i]); });
    Bits weak(J.size());
    for (auto& wc : weak_components_on(J, s_local))
        if (std::find(wc.begin(), wc.end(), a2) != wc.end())
            for (int v : wc) weak.set(v);
    expect(weak == comp_local, "weak components of the smooth part are (k-1)-linked");
    PPFormula fk;
    int b = fk.fresh();
    fk.add(cls(view_.cls[a2]), {b});
    fk.free = {add_path(fk, b, AbstractPath::fence(k - 1, lk.saturation), {sm})};
    std::string kn = define("K", fk);
    Bits kset = blow(comp_local, view_);
    expect(unary(kn) == kset, "component of the smooth part");
    if (opt_.checks) {
        expect(is_reductionistic(kset, gp_), "reduced domain is reductionistic");
        expect(is_smooth_on(g_, kset), "reduced domain is smooth");
    }
    trace_.push_back("full power at k=" + std::to_string(k) + ": reduce to " + std::to_string(comp_local.count()) +
                     " classes");
    return {kset, kn};
}

// ---------------------------------------------------------------------------- central or TSR

MarcinResult Pipeline::step_marcinsmagic() {
    const Digraph& J = view_.quotient;
    int k = k_;
    auto central = [&](const BinRel& q) {
        if (q.is_full()) return false;
        for (int a = 0; a < q.size(); ++a)
            if (q.row(a).all()) return true;
        return false;
    };
    PPFormula f;
    int a = f.fresh();
    f.free = {a, add_path(f, a, AbstractPath::forward(k))};
    std::string rk = define("Pk", f);
    BinRel rkq = to_quotient(binary(rk), view_);
    expect(rkq == J.relation().power(k), "power relation mod alpha");
    if (central(rkq)) {
        trace_.push_back("power " + std::to_string(k) + " is central");
        return CentralRel{rk, binary(rk)};
    }
    int l = 1;
    while (!fence_relation(J, k, l).is_full()) ++l;
    std::string r = rk;
    if (l > 1) {
        PPFormula ff;
        int b = ff.fresh();
        ff.free = {b, add_path(ff, b, AbstractPath::fence(k, l - 1))};
        r = define("F", ff);
        expect(to_quotient(binary(r), view_) == fence_relation(J, k, l - 1), "fence mod alpha");
    }
    BinRel R = binary(r);
    std::string cname;
    Bits C = dom_;
    for (int o : view_.orbits) {
        std::vector<int> oc;
        for (int c : view_.cls)
            if (alpha_.class_orbit[c] == o) oc.push_back(c);
        Bits op = C;
        for (int c : oc) op &= R.image(alpha_.class_set(c));
        if (R.preimage(op) != dom_) return trick_m2(r, R, cname, C, o);
        PPFormula fo;
        int x = fo.fresh();
        fo.free = {x};
        for (int c : oc) {
            int y = fo.fresh();
            fo.add(cls(c), {y});
            fo.add(r, {y, x});
        }
        if (!cname.empty()) fo.add(cname, {x});
        cname = define("C", fo);
        expect(unary(cname) == op, "orbit sum");
        C = op;
        BinRel rc(g_.size());
        for (int v = 0; v < g_.size(); ++v) rc.row(v) = R.preimage(R.row(v) & C);
        BinRel q = to_quotient(rc, view_);
        if (!q.is_full()) {
            PPFormula fr;
            fr.num_vars = 3;
            fr.free = {0, 1};
            fr.add(r, {0, 2});
            fr.add(r, {1, 2});
            fr.add(cname, {2});
            std::string rcn = define("RC", fr);
            expect(binary(rcn) == rc, "restricted common successor relation");
            expect(central(q), "restricted relation is central");
            trace_.push_back("central relation after " + std::to_string(l) + "-fence, orbit " + std::to_string(o));
            return CentralRel{rcn, rc};
        }
    }
    if (central(to_quotient(R, view_))) {
        trace_.push_back("fence relation is central");
        return CentralRel{r, R};
    }
    // every class of C receives R-edges from every class: the converse is central
    BinRel Ri = R.inverse();
    expect(central(to_quotient(Ri, view_)), "converse fence relation is central");
    PPFormula fi;
    fi.num_vars = 2;
    fi.free = {0, 1};
    fi.add(r, {1, 0});
    std::string rin = define("Finv", fi);
    expect(binary(rin) == Ri, "converse relation");
    trace_.push_back("converse fence relation is central");
    return CentralRel{rin, Ri};
}

MarcinResult Pipeline::trick_m2(const std::string& rname, const BinRel& R, const std::string& cname, const Bits& C,
                                int o) {
    int nc = alpha_.num_classes();
    std::vector<int> oc;
    for (int c : view_.cls)
        if (alpha_.class_orbit[c] == o) oc.push_back(c);
    auto plus = [&](const std::vector<int>& s) {
        Bits b = C;
        for (int c : s) b &= R.image(alpha_.class_set(c));
        return b;
    };
    std::vector<int> S;
    for (int c : oc) {
        auto t = S;
        t.push_back(c);
        if (R.preimage(plus(t)) == dom_) S = t;
    }
    expect(!S.empty() && S.size() < oc.size(), "maximal class union");
    const auto& act = class_action();
    auto image = [&](const GroupElt& e, const std::vector<int>& s) {
        Bits b(nc);
        for (int c : s) b.set(e.cls[c]);
        return b;
    };
    Bits sb = Bits::from(nc, S);
    int l = 0;
    for (auto& e : act) {
        Bits fs = image(e, S);
        if (fs != sb) l = std::max(l, (fs & sb).count() + 1);
    }
    expect(l > 0, "class union is moved by the group");
    int best = -1;
    size_t best_f = 0;
    std::vector<int> best_pick;
    Bits best_x;
    for (size_t fi = 0; fi < act.size(); ++fi) {
        if (image(act[fi], S) == sb) continue;
        for_subsets(int(S.size()), l, [&](const std::vector<int>& pick) {
            std::vector<int> u = S;
            for (int i : pick) {
                int c = act[fi].cls[S[i]];
                if (std::find(u.begin(), u.end(), c) == u.end()) u.push_back(c);
            }
            Bits x = R.preimage(plus(u));
            int cnt = local_classes(x, view_).count();
            if (cnt > best) best = cnt, best_f = fi, best_pick = pick, best_x = x;
        });
    }
    Bits X = best_x;
    expect(X.any() && X != dom_, "escaping union is proper");
    expect(is_alpha_stable(X, alpha_), "escaping set is alpha-stable");
    const GroupElt& f = act[best_f];

    // T: tuples covered by a translate of X
    int m = int(view_.cls.size());
    expect(m <= 63, "too many classes for the subset search");
    Bits xl = local_classes(X, view_);
    std::set<uint64_t> fam;
    for (auto& e : act) {
        uint64_t mask = 0;
        xl.for_each([&](int i) { mask |= uint64_t(1) << view_.local[e.cls[view_.cls[i]]]; });
        fam.insert(mask);
    }
    auto covered = [&](uint64_t s) {
        for (uint64_t z : fam)
            if ((s & ~z) == 0) return true;
        return false;
    };
    int kk = -1;
    for (int j = 1; j <= m && kk < 0; ++j)
        for_subsets(m, j, [&](const std::vector<int>& sub) {
            if (kk >= 0) return;
            uint64_t s = 0;
            for (int i : sub) s |= uint64_t(1) << i;
            if (!covered(s)) kk = j;
        });
    expect(kk >= 1, "translates of the escaping set cover everything");
    KaryRel T = by_entry_set(m, kk, covered);

    // enumeration of S with the chosen classes first
    std::vector<int> order;
    for (int i : best_pick) order.push_back(S[i]);
    for (int c : S)
        if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
    int n = int(order.size());
    std::vector<int> s_rep, fs_rep, u_rep;
    for (int c : order) s_rep.push_back(least(alpha_.classes[c]));
    for (int v : s_rep) fs_rep.push_back(f.perm[v]);
    xl.for_each([&](int i) { u_rep.push_back(least(alpha_.classes[view_.cls[i]])); });
    int mm = int(u_rep.size());
    std::string ao = alpha_o(o), oo = orb(o);

    PPFormula phi;
    phi.num_vars = 2 * n + kk;
    for (int i = 0; i < phi.num_vars; ++i) phi.free.push_back(i);
    auto star = [&](int centre) {
        int w2 = phi.fresh();
        phi.add(rname, {centre, w2});
        if (!cname.empty()) phi.add(cname, {w2});
        for (int j = 0; j < n; ++j) {
            int t = phi.fresh();
            phi.add(rname, {t, w2});
            phi.add(ao, {j, t});
        }
        for (int j = 0; j < l; ++j) {
            int t = phi.fresh();
            phi.add(rname, {t, w2});
            phi.add(ao, {n + j, t});
        }
    };
    std::vector<int> ws;
    for (int i = 0; i < mm; ++i) ws.push_back(phi.fresh());
    phi.add(tuple_orbit(u_rep), ws);
    for (int j = 0; j < 2 * n; ++j) phi.add(oo, {j});
    for (int w : ws) star(w);
    for (int i = 0; i < kk; ++i) star(2 * n + i);
    std::string phin = define("phi", phi);

    PPFormula w;
    w.num_vars = 2 * kk;
    for (int i = 0; i < 2 * kk; ++i) w.free.push_back(i);
    std::vector<int> xs, ys, zs;
    for (int i = 0; i < n; ++i) xs.push_back(w.fresh());
    for (int i = 0; i < n; ++i) ys.push_back(w.fresh());
    for (int i = 0; i < n; ++i) zs.push_back(w.fresh());
    std::vector<int> xz = xs, sf = s_rep;
    xz.insert(xz.end(), zs.begin(), zs.end());
    sf.insert(sf.end(), fs_rep.begin(), fs_rep.end());
    w.add(tuple_orbit(sf), xz);
    w.add(tuple_orbit(s_rep), ys);
    std::vector<int> a1 = xs, a2 = ys;
    a1.insert(a1.end(), ys.begin(), ys.end());
    a2.insert(a2.end(), zs.begin(), zs.end());
    for (int i = 0; i < kk; ++i) a1.push_back(i), a2.push_back(kk + i);
    w.add(phin, a1);
    w.add(phin, a2);
    std::string wn = define("W", w);
    KaryRel tg = blow_up(globalise(T), alpha_);
    expect(value(wn) == or_relation(tg, tg, dom_), "OR(T,T) from the escaping union");
    trace_.push_back("totally symmetric relation of arity " + std::to_string(kk) + " from orbit " +
                     std::to_string(o) + " (|S|=" + std::to_string(n) + ", l=" + std::to_string(l) + ")");
    return TsrOr{wn, kk, T};
}

// ---------------------------------------------------------------------------- central -> OR(D_L, D_R)

OrPair Pipeline::step_central_to_or(const CentralRel& cr) {
    const BinRel& R = cr.rel;
    BinRel rq = to_quotient(R, view_);
    Bits cq(rq.size());
    for (int a = 0; a < rq.size(); ++a)
        if (rq.row(a).all()) cq.set(a);
    Bits C = blow(cq, view_);
    expect(cq.any() && !cq.all(), "centre is non-empty and proper");
    expect(omega_stable(C), "centre is omega-stable");
    int o_in = -1, o_out = -1;
    for (int oi : view_.orbits) {
        Bits si = orbit_set_in(oi);
        if (!si.subset_of(C)) continue;
        for (int oo : view_.orbits) {
            Bits so = orbit_set_in(oo);
            if (so.intersects(C)) continue;
            bool adj = false;
            si.for_each([&](int x) { adj = adj || g_.relation().row(x).intersects(so) || g_.relation().inverse().row(x).intersects(so); });
            if (adj) {
                o_in = oi, o_out = oo;
                break;
            }
        }
        if (o_in >= 0) break;
    }
    expect(o_in >= 0, "adjacent orbits across the centre");

    std::vector<int> to_g;
    Digraph gd = g_.induced(dom_, &to_g);
    std::vector<int> lorb(to_g.size());
    for (size_t i = 0; i < to_g.size(); ++i)
        lorb[i] = int(std::lower_bound(view_.orbits.begin(), view_.orbits.end(), alpha_.orbit_of[to_g[i]]) -
                      view_.orbits.begin());
    OrbitView vd(gd, lorb);
    Bits cl(gd.size());
    for (size_t i = 0; i < to_g.size(); ++i)
        if (C.test(to_g[i])) cl.set(int(i));
    auto li = [&](int o) {
        return int(std::lower_bound(view_.orbits.begin(), view_.orbits.end(), o) - view_.orbits.begin());
    };
    CentralEscape esc = build_central_escape(vd, cl, li(o_in), li(o_out));
    MergedPath mp = MergedPath::merge(esc.pi, esc.pi_prime);
    PPFormula gf = merged_path_formula(mp, E(), [&](int a, int b) {
        return orb_union(view_.orbits[a], view_.orbits[b]);
    });
    std::string gn = define("gamma", gf);
    BinRel gl = gamma(vd, mp);
    BinRel gg(g_.size());
    for (auto [a, b] : gl.pairs()) gg.set(to_g[a], to_g[b]);
    expect(binary(gn) == gg, "escape path relation");

    std::string ap = alpha_op(o_out, o_in);
    PPFormula fl;
    fl.num_vars = 3;
    fl.free = {0, 1};
    fl.add(cr.name, {2, 0});
    fl.add(ap, {2, 1});
    std::string sl = define("SL", fl);
    PPFormula fr;
    fr.num_vars = 4;
    fr.free = {0, 1};
    fr.add(ap, {0, 2});
    fr.add(gn, {2, 3});
    fr.add(cr.name, {3, 1});
    std::string sr = define("SR", fr);
    BinRel SL = binary(sl), SRr = binary(sr);
    if (opt_.checks) expect(is_alpha_stable(SL, alpha_) && is_alpha_stable(SRr, alpha_), "SL and SR are alpha-stable");
    Bits oin = orbit_set_in(o_in), oout = orbit_set_in(o_out);
    Bits DL(g_.size()), DR(g_.size());
    for (int o : view_.orbits) {
        Bits s = orbit_set_in(o);
        bool l = true, r = true;
        s.for_each([&](int x) { l = l && oout.subset_of(SL.row(x)); });
        oin.for_each([&](int x) { r = r && s.subset_of(SRr.row(x)); });
        if (l) DL |= s;
        if (r) DR |= s;
    }
    std::vector<std::string> lefts, rights;
    for (int c : view_.cls) {
        if (alpha_.class_orbit[c] != o_out) continue;
        Bits bm = SL.preimage(alpha_.class_set(c));
        if (bm == DL) {
            lefts.push_back(sl);
            continue;
        }
        PPFormula fz;
        int y = fz.fresh();
        fz.free = {y};
        Bits z = dom_;
        local_classes(bm, view_).for_each([&](int i) {
            int a = fz.fresh();
            fz.add(cls(view_.cls[i]), {a});
            fz.add(sl, {a, y});
            z &= SL.image(alpha_.class_set(view_.cls[i]));
        });
        std::string zn = define("ZL", fz);
        PPFormula fb;
        fb.num_vars = 2;
        fb.free = {0, 1};
        fb.add(sl, {0, 1});
        fb.add(zn, {1});
        std::string bn = define("SLB", fb);
        BinRel want = SL;
        for (int x = 0; x < want.size(); ++x) want.row(x) &= z;
        expect(binary(bn) == want, "restricted left relation");
        lefts.push_back(bn);
    }
    for (int c : view_.cls) {
        if (alpha_.class_orbit[c] != o_in) continue;
        Bits ap2 = SRr.image(alpha_.class_set(c));
        if (ap2 == DR) {
            rights.push_back(sr);
            continue;
        }
        PPFormula fz;
        int x = fz.fresh();
        fz.free = {x};
        Bits z = dom_;
        local_classes(ap2, view_).for_each([&](int i) {
            int b = fz.fresh();
            fz.add(cls(view_.cls[i]), {b});
            fz.add(sr, {x, b});
            z &= SRr.preimage(alpha_.class_set(view_.cls[i]));
        });
        std::string zn = define("ZR", fz);
        PPFormula fb;
        fb.num_vars = 2;
        fb.free = {0, 1};
        fb.add(sr, {0, 1});
        fb.add(zn, {0});
        std::string bn = define("SRA", fb);
        BinRel want = SRr;
        for (int v = 0; v < want.size(); ++v)
            if (!z.test(v)) want.row(v) = Bits(g_.size());
        expect(binary(bn) == want, "restricted right relation");
        rights.push_back(bn);
    }
    PPFormula fs;
    fs.num_vars = 2;
    fs.free = {0, 1};
    for (auto& lb : lefts)
        for (auto& ra : rights) {
            int z = fs.fresh();
            fs.add(lb, {0, z});
            fs.add(ra, {z, 1});
        }
    std::string sn = define("ORLR", fs);
    KaryRel want = or_relation(KaryRel::from_set(DL), KaryRel::from_set(DR), dom_);
    expect(value(sn) == want, "OR(D_L, D_R)");
    trace_.push_back("central escape via " + esc.method + ": |D_L|=" + std::to_string(DL.count()) +
                     ", |D_R|=" + std::to_string(DR.count()));
    return OrPair{sn, DL, DR};
}

// ---------------------------------------------------------------------------- OR(D_L, D_R) -> OR(U,U)

LinkResult Pipeline::step_or_to_unary(const OrPair& o) {
    const Bits &DL = o.left, &DR = o.right;
    expect(DL.any() && DL != dom_ && DR.any() && DR != dom_, "D_L and D_R are proper");
    int bcls = -1;
    for (int c : view_.cls)
        if (!alpha_.class_set(c).subset_of(DR)) {
            bcls = c;
            break;
        }
    PPFormula fd;
    fd.num_vars = 2;
    fd.free = {0};
    fd.add(cls(bcls), {1});
    fd.add(o.name, {0, 1});
    std::string dl = define("DL", fd);
    expect(unary(dl) == DL, "D_L from OR(D_L, D_R)");

    SmoothDef sd = smooth_subset(DL);
    Bits H = sd.set;
    std::string hn = define_set_expr(sd, dl, "H");
    if (opt_.checks) expect(omega_stable(H) && is_alpha_stable(H, alpha_), "smooth subset is omega-stable");
    ClassView vh = view_of(H);
    Linkedness lh = linkedness(vh.quotient, k_);
    if (lh.is_full) {
        trace_.push_back("smooth subset of D_L is " + std::to_string(k_) + "-linked: reduce");
        return Reduction{H, hn};
    }
    const BinRel& beta = lh.equivalence;
    Linkedness lj = linkedness(view_.quotient, k_);
    int m = std::max({lj.saturation, lh.saturation, 1});
    Fence fe = restricted_fence(sd, dl, hn, m);
    auto rel_after = [&](size_t i) {
        PPFormula f = drop_atoms(fe.f, fe.base_atoms, i);
        KaryRel r = evaluate(g_.size(), [&](const std::string& nm) -> const KaryRel& { return value(nm); }, f);
        return to_quotient(r.to_bin(), vh);
    };
    size_t total = fe.base_atoms.size();
    expect(rel_after(0) == beta, "restricted fence defines the linkedness equivalence");
    expect(rel_after(total).is_full(), "fence without D_L is full");
    size_t lo = 1, hi = total;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (rel_after(mid) != beta)
            hi = mid;
        else
            lo = mid + 1;
    }
    size_t cut = lo;
    PPFormula sf = drop_atoms(fe.f, fe.base_atoms, cut);
    int xv = fe.f.atoms[fe.base_atoms[cut - 1]].vars[0];
    sf.free.push_back(xv);
    std::string sn = define("S", sf);
    const KaryRel& S = value(sn);
    int ta = -1, tb = -1;
    for (size_t i = 0; i < S.size() && ta < 0; ++i) {
        int a = S.tuple(i)[0], b = S.tuple(i)[1];
        int ca = vh.local[alpha_.class_of[a]], cb = vh.local[alpha_.class_of[b]];
        if (ca >= 0 && cb >= 0 && !beta.test(ca, cb)) ta = a, tb = b;
    }
    expect(ta >= 0, "ternary relation leaves the equivalence");
    std::string in = ig();
    int M = int(view_.cls.size());
    int ia = view_.local[alpha_.class_of[ta]], ib = view_.local[alpha_.class_of[tb]];
    PPFormula ft;
    ft.num_vars = 2;
    ft.free = {0, 1};
    int y0 = ft.fresh(), y1 = ft.fresh(), y2 = ft.fresh(), X1 = ft.fresh(), X2 = ft.fresh();
    std::vector<int> iv(M);
    for (int i = 0; i < M; ++i) iv[i] = i == ia ? y0 : i == ib ? y2 : ft.fresh();
    ft.add(in, iv);
    ft.add(sn, {y0, y1, X1});
    ft.add(o.name, {X1, 0});
    ft.add(sn, {y1, y2, X2});
    ft.add(o.name, {X2, 1});
    std::string tn = define("ORRR", ft);
    expect(value(tn) == or_relation(KaryRel::from_set(DR), KaryRel::from_set(DR), dom_), "OR(D_R, D_R)");
    trace_.push_back("OR(D_R,D_R) via ternary relation (cut " + std::to_string(cut) + "/" + std::to_string(total) + ")");
    return UnaryOr{tn, DR};
}

// ---------------------------------------------------------------------------- OR(T,T) -> OR(σ,σ) or OR(U,U)

std::string Pipeline::swap_or(const std::string& name, int left, int right) {
    PPFormula f;
    f.num_vars = left + right;
    for (int i = 0; i < left + right; ++i) f.free.push_back(i);
    std::vector<int> vs;
    for (int i = 0; i < left; ++i) vs.push_back(right + i);
    for (int i = 0; i < right; ++i) vs.push_back(i);
    f.add(name, vs);
    return define("ORswap", f);
}

std::string Pipeline::transport(const std::string& cur, int left, int right, const OrStep& st,
                                const KaryRel& right_rel) {
    PPFormula f;
    int out = st.arity;
    f.num_vars = out + right;
    for (int i = 0; i < out + right; ++i) f.free.push_back(i);
    std::vector<int> z;
    for (int i = 0; i < right; ++i) z.push_back(out + i);
    auto atom = [&](std::vector<int> vs) {
        vs.insert(vs.end(), z.begin(), z.end());
        f.add(cur, vs);
    };
    std::string hint;
    int M = int(view_.cls.size());
    switch (st.kind) {
        case OrStep::Compose: {
            int w = f.fresh();
            atom({0, w});
            atom({w, 1});
            hint = "ORcomp";
            break;
        }
        case OrStep::Bracket: {
            int y = f.fresh();
            for_subsets(out, left - 1, [&](const std::vector<int>& I) {
                std::vector<int> vs{y};
                vs.insert(vs.end(), I.begin(), I.end());
                atom(vs);
            });
            hint = "ORbr";
            break;
        }
        case OrStep::Centre:
        case OrStep::Sigma: {
            int fixed = st.kind == OrStep::Centre ? 1 : 2;
            std::vector<int> ys;
            for (int i = 0; i < M; ++i) ys.push_back(f.fresh());
            f.add(ig(), ys);
            for_subsets(M, left - fixed, [&](const std::vector<int>& I) {
                std::vector<int> vs;
                for (int i = 0; i < fixed; ++i) vs.push_back(i);
                for (int i : I) vs.push_back(ys[i]);
                atom(vs);
            });
            hint = st.kind == OrStep::Centre ? "ORcentre" : "ORsigma";
            break;
        }
    }
    std::string name = define(hint, f);
    expect(ev_.stable(name) && ev_.quotient(name) == or_relation(st.rel, right_rel, domain_classes()),
           "transported OR relation");
    return name;
}

TsrResult Pipeline::step_tsr_to_sigma(const TsrOr& t) {
    int n = t.arity;
    int M = int(view_.cls.size());
    if (n == 1) {
        Bits u = blow(t.t.to_set(), view_);
        expect(omega_stable(u), "unary relation is omega-stable");
        trace_.push_back("unary OR relation");
        return UnaryOr{t.name, u};
    }
    std::vector<OrStep> steps;
    bool to_sigma = true;
    KaryRel final_local;
    if (n == 2 && !linked(t.t.to_bin())) {
        BinRel cur = t.t.to_bin(), sigma = equiv_closure(cur);
        while (cur != sigma) {
            cur = cur.compose(cur);
            steps.push_back({OrStep::Compose, 2, globalise(KaryRel::from_bin(cur))});
        }
        final_local = KaryRel::from_bin(sigma);
        trace_.push_back("binary relation not linked: transitive closure in " + std::to_string(steps.size()) +
                         " steps");
    } else {
        expect(M <= 63, "too many classes for the bracket iteration");
        int a = n;
        std::set<uint64_t> fam;
        for (size_t i = 0; i < t.t.size(); ++i) {
            uint64_t mask = 0;
            for (int j = 0; j < n; ++j) mask |= uint64_t(1) << t.t.tuple(i)[j];
            if (popcount(mask) == n) fam.insert(mask);
        }
        auto in_r = [&](int y, uint64_t Y) { return ((Y >> y) & 1) || fam.count(Y | (uint64_t(1) << y)) > 0; };
        auto good = [&](uint64_t X) {
            if (popcount(X) < a - 1) return true;
            for (int y = 0; y < M; ++y) {
                bool ok = true;
                std::vector<int> xs;
                for (int i = 0; i < M; ++i)
                    if ((X >> i) & 1) xs.push_back(i);
                for_subsets(int(xs.size()), a - 1, [&](const std::vector<int>& I) {
                    if (!ok) return;
                    uint64_t Y = 0;
                    for (int i : I) Y |= uint64_t(1) << xs[i];
                    ok = in_r(y, Y);
                });
                if (ok) return true;
            }
            return false;
        };
        auto sets_of = [&](int size) {
            std::set<uint64_t> r;
            for_subsets(M, size, [&](const std::vector<int>& I) {
                uint64_t X = 0;
                for (int i : I) X |= uint64_t(1) << i;
                if (good(X)) r.insert(X);
            });
            return r;
        };
        for (;;) {
            std::set<uint64_t> fa = sets_of(a);
            if (fa == fam) {
                // σ(A,A') holds when every completion lies in R
                final_local = by_entry_set(M, 2, [&](uint64_t pair) {
                    bool ok = true;
                    for_subsets(M, a - 2, [&](const std::vector<int>& I) {
                        if (!ok) return;
                        uint64_t Y = pair;
                        for (int i : I) Y |= uint64_t(1) << i;
                        ok = popcount(Y) < a || fam.count(Y) > 0;
                    });
                    return ok;
                });
                expect(final_local.to_bin().is_equivalence() && !final_local.is_full(), "sigma is a proper equivalence");
                steps.push_back({OrStep::Sigma, 2, globalise(final_local)});
                trace_.push_back("bracket iteration stops at arity " + std::to_string(a) + ": equivalence");
                break;
            }
            int l = -1;
            for (int s = a; s <= M && l < 0; ++s)
                if (int(sets_of(s).size()) != [&] {
                        int c = 0;
                        for_subsets(M, s, [&](const std::vector<int>&) { ++c; });
                        return c;
                    }())
                    l = s;
            if (l < 0) {
                Bits c(M);
                for (int x = 0; x < M; ++x) {
                    bool ok = true;
                    for_subsets(M, a - 1, [&](const std::vector<int>& I) {
                        if (!ok) return;
                        uint64_t Y = 0;
                        for (int i : I) Y |= uint64_t(1) << i;
                        ok = in_r(x, Y);
                    });
                    if (ok) c.set(x);
                }
                expect(c.any() && !c.all(), "centre is proper");
                final_local = KaryRel::from_set(c);
                to_sigma = false;
                steps.push_back({OrStep::Centre, 1, globalise(final_local)});
                trace_.push_back("bracket iteration stops at arity " + std::to_string(a) + ": centre");
                break;
            }
            std::set<uint64_t> nf = sets_of(l);
            int aa = a;
            a = l;
            fam = nf;
            KaryRel rel = by_entry_set(M, l, [&](uint64_t X) { return popcount(X) < l ? true : fam.count(X) > 0; });
            steps.push_back({OrStep::Bracket, l, globalise(rel)});
            (void)aa;
        }
    }
    // left side, then swap, then the right side
    KaryRel tg = globalise(t.t);
    KaryRel fg = globalise(final_local);
    std::string cur = t.name;
    int left = n;
    for (auto& st : steps) {
        cur = transport(cur, left, n, st, tg);
        left = st.arity;
    }
    cur = swap_or(cur, left, n);
    int fin = left;
    left = n;
    for (auto& st : steps) {
        cur = transport(cur, left, fin, st, fg);
        left = st.arity;
    }
    if (!to_sigma) {
        Bits u = blow(final_local.to_set(), view_);
        expect(omega_stable(u), "centre is omega-stable");
        return UnaryOr{cur, u};
    }
    SigmaOr res;
    res.name = cur;
    res.dom = dom_;
    for (auto& b : equivalence_classes(final_local.to_bin())) {
        std::vector<int> blk;
        for (int i : b) blk.push_back(view_.cls[i]);
        res.blocks.push_back(blk);
    }
    return res;
}

// ---------------------------------------------------------------------------- OR(U,U) -> OR(σ,σ)

FinalResult Pipeline::step_unary_to_sigma(const UnaryOr& uo) {
    const Bits& U = uo.u;
    expect(U.any() && U != dom_ && omega_stable(U), "U is a proper omega-stable set");
    PPFormula fu;
    fu.num_vars = 1;
    fu.free = {0};
    fu.add(uo.name, {0, 0});
    std::string un = define("U", fu);
    expect(unary(un) == U, "U from OR(U,U)");

    SmoothDef sd = smooth_subset(U);
    Bits H = sd.set;
    std::string hn = define_set_expr(sd, un, "H");
    if (opt_.checks) expect(omega_stable(H) && is_alpha_stable(H, alpha_), "smooth subset is omega-stable");
    ClassView vh = view_of(H);
    Linkedness lh = linkedness(vh.quotient, k_);
    if (lh.is_full) {
        trace_.push_back("smooth subset of U is " + std::to_string(k_) + "-linked: reduce");
        return Reduction{H, hn};
    }
    Linkedness lj = linkedness(view_.quotient, k_);
    int m = std::max({lj.saturation, lh.saturation, 1});
    Fence fe = restricted_fence(sd, un, hn, m);
    auto rel_after = [&](size_t i) {
        PPFormula f = drop_atoms(fe.f, fe.base_atoms, i);
        KaryRel r = evaluate(g_.size(), [&](const std::string& nm) -> const KaryRel& { return value(nm); }, f);
        return to_quotient(r.to_bin(), vh);
    };
    size_t total = fe.base_atoms.size();
    expect(!linked(rel_after(0)), "restricted fence is not linked");
    expect(linked(rel_after(total)), "fence without U is linked");
    size_t lo = 1, hi = total;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (linked(rel_after(mid)))
            hi = mid;
        else
            lo = mid + 1;
    }
    size_t cut = lo;
    PPFormula sf = drop_atoms(fe.f, fe.base_atoms, cut);
    sf.free.push_back(fe.f.atoms[fe.base_atoms[cut - 1]].vars[0]);
    std::string sn = define("S", sf);
    BinRel q1 = rel_after(cut - 1), q2 = rel_after(cut);
    BinRel sigma = equiv_closure(q1), full = equiv_closure(q2);
    int steps = 0;
    {
        BinRel p1 = BinRel::identity(q1.size()), p2 = p1;
        BinRel s1 = q1.compose(q1.inverse()), s2 = q2.compose(q2.inverse());
        while (p1 != sigma || p2 != full) {
            p1 = p1.compose(s1);
            p2 = p2.compose(s2);
            ++steps;
        }
    }
    int nx = 2 * steps;
    auto add_t = [&](PPFormula& f, int y, int z, const std::vector<int>& xs) {
        int cur = y;
        for (int j = 0; j < steps; ++j) {
            int w1 = f.fresh();
            int w2 = j + 1 == steps ? z : f.fresh();
            f.add(sn, {cur, w1, xs[2 * j]});
            f.add(sn, {w2, w1, xs[2 * j + 1]});
            cur = w2;
        }
    };
    // P: an orbit split by σ, or two adjacent orbits in different σ-classes
    auto blocks = equivalence_classes(sigma);
    std::vector<int> block_of(vh.cls.size());
    for (size_t b = 0; b < blocks.size(); ++b)
        for (int i : blocks[b]) block_of[i] = int(b);
    std::vector<int> h_orbits = vh.orbits;
    Bits P(g_.size());
    std::string ap;
    for (int o : h_orbits) {
        std::set<int> bs;
        for (size_t i = 0; i < vh.cls.size(); ++i)
            if (alpha_.class_orbit[vh.cls[i]] == o) bs.insert(block_of[i]);
        if (bs.size() >= 2) {
            P = alpha_.orbit_set(o) & H;
            ap = alpha_o(o);
            break;
        }
    }
    if (ap.empty()) {
        for (int o1 : h_orbits) {
            for (int o2 : h_orbits) {
                if (o1 == o2) continue;
                Bits s1 = alpha_.orbit_set(o1) & H, s2 = alpha_.orbit_set(o2) & H;
                int b1 = block_of[vh.local[alpha_.class_of[s1.first()]]];
                int b2 = block_of[vh.local[alpha_.class_of[s2.first()]]];
                bool adj = false;
                s1.for_each([&](int x) { adj = adj || g_.relation().row(x).intersects(s2); });
                if (adj && b1 != b2) {
                    P = s1 | s2;
                    ap = alpha_op(o1, o2);
                    break;
                }
            }
            if (!ap.empty()) break;
        }
    }
    expect(!ap.empty(), "a split orbit or a split edge");
    BinRel sp(g_.size());
    std::vector<std::vector<int>> pblocks;
    for (auto& b : blocks) {
        Bits s(g_.size());
        std::vector<int> blk;
        for (int i : b)
            if (alpha_.class_set(vh.cls[i]).subset_of(P)) {
                s |= alpha_.class_set(vh.cls[i]);
                blk.push_back(vh.cls[i]);
            }
        if (blk.empty()) continue;
        s.for_each([&](int x) { sp.row(x) = s; });
        pblocks.push_back(blk);
    }
    expect(pblocks.size() >= 2, "sigma restricted to P has two blocks");
    KaryRel spk = KaryRel::from_bin(sp);
    KaryRel want = or_relation(spk, spk, P);

    std::string result;
    {
        PPFormula chi;
        chi.num_vars = 4;
        chi.free = {0, 1, 2, 3};
        std::vector<int> xs, ys;
        for (int i = 0; i < nx; ++i) xs.push_back(chi.fresh());
        for (int i = 0; i < nx; ++i) ys.push_back(chi.fresh());
        for (int a : xs)
            for (int b : ys) chi.add(uo.name, {a, b});
        int u1 = chi.fresh(), v1 = chi.fresh(), y1 = chi.fresh(), z1 = chi.fresh();
        chi.add(ap, {u1, 0});
        chi.add(ap, {v1, 1});
        chi.add(ap, {y1, 2});
        chi.add(ap, {z1, 3});
        add_t(chi, u1, v1, xs);
        add_t(chi, y1, z1, ys);
        size_t old = tuple_budget();
        set_tuple_budget(old == 0 ? opt_.literal_budget : std::min(old, opt_.literal_budget));
        try {
            result = define("chi", chi);
        } catch (const ResourceLimit&) {
            result.clear();
        }
        set_tuple_budget(old);
    }
    if (result.empty()) {
        // two transports through OR(σ_P, U)
        PPFormula f1;
        f1.num_vars = 3;
        f1.free = {0, 1, 2};
        std::vector<int> xs;
        for (int i = 0; i < nx; ++i) xs.push_back(f1.fresh());
        int y1 = f1.fresh(), z1 = f1.fresh();
        f1.add(ap, {y1, 0});
        f1.add(ap, {z1, 1});
        add_t(f1, y1, z1, xs);
        for (int x : xs) f1.add(uo.name, {x, 2});
        std::string mid = define("ORsU", f1);
        KaryRel wm(g_.size(), 3);
        P.for_each([&](int y) {
            P.for_each([&](int z) {
                dom_.for_each([&](int w) {
                    if (sp.test(y, z) || U.test(w)) wm.push({y, z, w});
                });
            });
        });
        wm.normalize();
        expect(value(mid) == wm, "OR(sigma_P, U)");
        PPFormula f2;
        f2.num_vars = 4;
        f2.free = {0, 1, 2, 3};
        std::vector<int> x2;
        for (int i = 0; i < nx; ++i) x2.push_back(f2.fresh());
        int u1 = f2.fresh(), v1 = f2.fresh();
        f2.add(ap, {u1, 0});
        f2.add(ap, {v1, 1});
        add_t(f2, u1, v1, x2);
        for (int x : x2) f2.add(mid, {2, 3, x});
        result = define("chi", f2);
        trace_.push_back("OR(sigma,sigma) by two transports (" + std::to_string(nx) + " parameters)");
    } else {
        trace_.push_back("OR(sigma,sigma) by the displayed formula (" + std::to_string(nx) + " parameters)");
    }
    expect(value(result) == want, "OR(sigma_P, sigma_P)");
    return SigmaOr{result, pblocks, P};
}

}  // namespace loopsmith

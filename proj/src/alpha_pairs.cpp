#include "loopsmith/alpha_pairs.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>

namespace loopsmith {

namespace {

LabelledPath flipped(const LabelledPath& p) {
    LabelledPath r = p;
    for (auto& d : r.path.steps) d = flip(d);
    return r;
}

BinRel alpha_on(const Alpha& alpha, const Bits& s) { return alpha.relation().restrict(s); }

// Order of the class permutation induced by rel on the classes of orbit o.
int class_order(const BinRel& rel, const Alpha& alpha, int o) {
    std::map<int, int> img;
    Bits cls = alpha.classes_in_orbit(o);
    cls.for_each([&](int c) {
        const Bits& row = rel.row(alpha.classes[c][0]);
        int d = row.any() ? alpha.class_of[row.first()] : -1;
        if (d < 0 || row != alpha.class_set(d) || !cls.test(d))
            throw std::logic_error("induced relation is not a class bijection");
        img[c] = d;
    });
    int order = 1;
    std::map<int, bool> seen;
    for (auto [c, d] : img) {
        if (seen[c]) continue;
        int len = 0;
        for (int x = c; !seen[x]; x = img[x]) seen[x] = true, ++len;
        order = std::lcm(order, len);
    }
    return order;
}

SeparatedPair separate(const Digraph& g, const Digraph& rev, const std::vector<int>& orb, const LabelledPath& pi,
                       int from, int to) {
    OrbitView v(g, orb);
    if (v.quotient().has_edge(from, to)) return build_separated_pair(v, pi, to);
    OrbitView vr(rev, orb);
    SeparatedPair s = build_separated_pair(vr, flipped(pi), to);
    s.ext = flipped(s.ext);
    s.rho = flipped(s.rho);
    return s;
}

}  // namespace

LabelledPath alpha_defining_path(const Digraph& g, const Alpha& alpha, int O) {
    int n = g.size();
    OrbitView v(g, alpha.orbit_of);
    const auto& orb = alpha.orbit_of;
    BinRel target = alpha_on(alpha, alpha.orbit_set(O));
    LabelledPath pi = LabelledPath::at(O);
    BinRel cur = gamma(v, pi);
    while (cur != target) {
        int a = -1, b = -1;
        for (int x = 0; x < n && a < 0; ++x) {
            Bits miss = target.row(x) - cur.row(x);
            if (miss.any()) a = x, b = miss.first();
        }
        if (a < 0) throw std::logic_error("symmetric path exceeds alpha");
        // pair-graph search from (a,b) to the diagonal
        std::map<std::pair<int, int>, std::pair<std::pair<int, int>, Dir>> par;
        std::deque<std::pair<int, int>> dq{{a, b}};
        par[{a, b}] = {{-1, -1}, Dir::Fwd};
        std::pair<int, int> hit{-1, -1};
        while (!dq.empty() && hit.first < 0) {
            auto [x, y] = dq.front();
            dq.pop_front();
            for (Dir d : {Dir::Fwd, Dir::Bwd}) {
                const auto& nx = d == Dir::Fwd ? g.out(x) : g.in(x);
                const auto& ny = d == Dir::Fwd ? g.out(y) : g.in(y);
                for (int x2 : nx)
                    for (int y2 : ny) {
                        if (orb[x2] != orb[y2] || par.count({x2, y2})) continue;
                        par[{x2, y2}] = {{x, y}, d};
                        if (x2 == y2 && hit.first < 0) hit = {x2, y2};
                        dq.push_back({x2, y2});
                    }
            }
        }
        if (hit.first < 0) throw std::logic_error("alpha pair does not reach the diagonal");
        std::vector<std::pair<int, Dir>> rev_steps;
        for (auto s = hit; par[s].first.first >= 0; s = par[s].first) rev_steps.push_back({s.first, par[s].second});
        LabelledPath q = LabelledPath::at(O);
        for (auto it = rev_steps.rbegin(); it != rev_steps.rend(); ++it) q.push(it->second, orb[it->first]);
        pi = pi + (q + q.reversed());
        cur = gamma(v, pi);
    }
    return pi;
}

PPFormula merged_path_formula(const MergedPath& m, const std::string& edge,
                              const std::function<std::string(int, int)>& union_name) {
    PPFormula f;
    int len = m.path.length();
    f.num_vars = len + 1;
    f.free = {0, len};
    for (int i = 0; i <= len; ++i) f.add(union_name(m.labels[i].first, m.labels[i].second), {i});
    for (int i = 0; i < len; ++i) {
        if (m.path.steps[i] == Dir::Fwd)
            f.add(edge, {i, i + 1});
        else
            f.add(edge, {i + 1, i});
    }
    return f;
}

AlphaPairDef alpha_on_pairs_ppdef(const Digraph& g, const PermGroup& gp, const Alpha& alpha, int O, int P) {
    OrbitView v(g, alpha.orbit_of);
    if (v.quotient().has_loop()) throw std::invalid_argument("orbit quotient has a loop");
    if (!v.quotient().has_edge(O, P) && !v.quotient().has_edge(P, O))
        throw std::invalid_argument("orbits are not adjacent");
    Digraph rev = g.reversed();
    LabelledPath pi = alpha_defining_path(g, alpha, O);
    LabelledPath mu = alpha_defining_path(g, alpha, P);
    SeparatedPair s1 = separate(g, rev, alpha.orbit_of, pi, O, P);  // (pi', rho')
    SeparatedPair s2 = separate(g, rev, alpha.orbit_of, mu, P, O);  // (mu', nu')

    AlphaPairDef out;
    out.kappa = s1.ext + s2.rho.reversed();
    out.lambda = s1.rho + s2.ext.reversed();
    out.kappa2 = s2.ext + s1.rho.reversed();
    out.lambda2 = s2.rho + s1.ext.reversed();
    if (out.kappa.path != out.lambda.path || out.kappa2.path != out.lambda2.path)
        throw std::logic_error("relabelling paths disagree");
    out.k_r = std::lcm(class_order(gamma(v, out.kappa), alpha, O), class_order(gamma(v, out.lambda), alpha, P));
    out.k_s = std::lcm(class_order(gamma(v, out.kappa2), alpha, P), class_order(gamma(v, out.lambda2), alpha, O));

    PPScript& sc = out.script;
    sc.add_primitive("E", PrimKind::Edge, {});
    std::map<std::pair<int, int>, std::string> unions;
    auto union_name = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        auto it = unions.find({a, b});
        if (it != unions.end()) return it->second;
        std::string nm = a == b ? "O" + std::to_string(a) : "O" + std::to_string(a) + "u" + std::to_string(b);
        std::vector<int> reps{alpha.orbit_set(a).first()};
        if (a != b) reps.push_back(alpha.orbit_set(b).first());
        sc.add_primitive(nm, PrimKind::OrbitUnion, reps);
        unions[{a, b}] = nm;
        return nm;
    };
    MergedPath mr = MergedPath::merge(out.kappa.repeat(out.k_r), out.lambda.repeat(out.k_r));
    MergedPath ms = MergedPath::merge(out.kappa2.repeat(out.k_s), out.lambda2.repeat(out.k_s));
    PPFormula fr = merged_path_formula(mr, "E", union_name);
    PPFormula fs = merged_path_formula(ms, "E", union_name);
    std::string tag = std::to_string(O) + "_" + std::to_string(P);
    sc.add_formula("R" + tag, fr);
    sc.add_formula("S" + tag, fs);
    PPFormula both;
    both.num_vars = 2;
    both.free = {0, 1};
    both.add("R" + tag, {0, 1});
    both.add("S" + tag, {0, 1});
    sc.add_formula("alpha" + tag, both);
    sc.output = "alpha" + tag;

    ScriptEvaluator ev(g, gp, alpha);
    ev.run(sc);
    BinRel want = alpha_on(alpha, alpha.orbit_set(O) | alpha.orbit_set(P));
    if (ev.value(sc.output).to_bin() != want) throw std::logic_error("alpha pair definition does not evaluate to alpha");
    return out;
}

}  // namespace loopsmith

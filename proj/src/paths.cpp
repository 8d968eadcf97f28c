#include "loopsmith/paths.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>

namespace loopsmith {

void LabelledPath::push(Dir d, int label) {
    path.steps.push_back(d);
    labels.push_back(label);
}

LabelledPath LabelledPath::reversed() const {
    LabelledPath r;
    r.path = path.reversed();
    r.labels.assign(labels.rbegin(), labels.rend());
    return r;
}

LabelledPath LabelledPath::operator+(const LabelledPath& o) const {
    if (labels.empty()) return o;
    if (o.labels.empty()) return *this;
    if (last() != o.first()) throw std::invalid_argument("concatenated paths do not meet");
    LabelledPath r = *this;
    for (int i = 0; i < o.length(); ++i) r.push(o.path.steps[i], o.labels[i + 1]);
    return r;
}

LabelledPath LabelledPath::repeat(int times) const {
    LabelledPath r = at(first());
    for (int i = 0; i < times; ++i) r = r + *this;
    return r;
}

std::string LabelledPath::str() const {
    std::string s = std::to_string(labels[0]);
    for (int i = 0; i < length(); ++i) {
        s += path.steps[i] == Dir::Fwd ? " > " : " < ";
        s += std::to_string(labels[i + 1]);
    }
    return s;
}

MergedPath MergedPath::merge(const LabelledPath& top, const LabelledPath& bottom) {
    if (!(top.path == bottom.path) || top.labels.size() != bottom.labels.size())
        throw std::invalid_argument("merge needs two labellings of one path");
    MergedPath m;
    m.path = top.path;
    for (size_t i = 0; i < top.labels.size(); ++i) m.labels.emplace_back(top.labels[i], bottom.labels[i]);
    return m;
}

OrbitView::OrbitView(const Digraph& g, const PermGroup& gp) : OrbitView(g, gp.orbit_ids()) {
    if (!gp.is_automorphism_group_of(g)) throw std::invalid_argument("generator is not an automorphism");
}

OrbitView::OrbitView(const Digraph& g, const std::vector<int>& orbit_of) : g_(&g), orbit_of_(orbit_of) {
    if (int(orbit_of.size()) != g.size()) throw std::invalid_argument("orbit map size mismatch");
    int m = orbit_of.empty() ? 0 : *std::max_element(orbit_of.begin(), orbit_of.end()) + 1;
    sets_.assign(m, Bits(g.size()));
    for (int v = 0; v < g.size(); ++v) sets_[orbit_of[v]].set(v);
    q_ = Digraph(m);
    for (auto [a, b] : g.edges()) q_.add_edge(orbit_of[a], orbit_of[b]);
}

namespace {

void check_labels(const OrbitView& v, const std::vector<int>& labels, int len) {
    if (int(labels.size()) != len + 1) throw std::invalid_argument("label count must be path length + 1");
    for (int o : labels)
        if (o < 0 || o >= v.num_orbits()) throw std::invalid_argument("label is not an orbit id");
}

}  // namespace

BinRel gamma(const OrbitView& v, const LabelledPath& p) {
    check_labels(v, p.labels, p.length());
    std::vector<Bits> ls;
    for (int o : p.labels) ls.push_back(v.orbit_set(o));
    return v.graph().path_relation(p.path, ls);
}

BinRel gamma(const OrbitView& v, const MergedPath& p) {
    std::vector<int> top, bot;
    for (auto [a, b] : p.labels) top.push_back(a), bot.push_back(b);
    check_labels(v, top, p.path.length());
    check_labels(v, bot, p.path.length());
    std::vector<Bits> ls;
    for (auto [a, b] : p.labels) ls.push_back(v.orbit_set(a) | v.orbit_set(b));
    return v.graph().path_relation(p.path, ls);
}

BinRel gamma(const Digraph& g, const PermGroup& gp, const LabelledPath& p) { return gamma(OrbitView(g, gp), p); }
BinRel gamma(const Digraph& g, const PermGroup& gp, const MergedPath& p) { return gamma(OrbitView(g, gp), p); }

namespace {

Bits step_image(const Digraph& g, const Bits& s, Dir d) {
    Bits out(g.size());
    s.for_each([&](int x) {
        for (int y : d == Dir::Fwd ? g.out(x) : g.in(x)) out.set(y);
    });
    return out;
}

// reach[i]: vertices at position i reachable along a realisation of the prefix
std::vector<Bits> forward_sets(const OrbitView& v, const LabelledPath& p) {
    std::vector<Bits> r{v.orbit_set(p.labels[0])};
    for (int i = 0; i < p.length(); ++i) r.push_back(step_image(v.graph(), r.back(), p.path.steps[i]) & v.orbit_set(p.labels[i + 1]));
    return r;
}

std::vector<Bits> backward_sets(const OrbitView& v, const LabelledPath& p) {
    int n = p.length();
    std::vector<Bits> r(n + 1);
    r[n] = v.orbit_set(p.labels[n]);
    for (int i = n - 1; i >= 0; --i) r[i] = step_image(v.graph(), r[i + 1], flip(p.path.steps[i])) & v.orbit_set(p.labels[i]);
    return r;
}

}  // namespace

bool realisable(const OrbitView& v, const LabelledPath& p) {
    check_labels(v, p.labels, p.length());
    return forward_sets(v, p).back().any();
}

bool is_properly_separated(const OrbitView& v, const LabelledPath& top, const LabelledPath& bottom) {
    if (!(top.path == bottom.path)) throw std::invalid_argument("separation needs labellings of one path");
    check_labels(v, top.labels, top.length());
    check_labels(v, bottom.labels, bottom.length());
    // hybrid i = top labels 0..i-1 followed by bottom labels i..n
    auto f = forward_sets(v, top);
    auto b = backward_sets(v, bottom);
    for (int i = 1; i <= top.length(); ++i)
        if ((step_image(v.graph(), f[i - 1], top.path.steps[i - 1]) & b[i]).any()) return false;
    return true;
}

bool is_properly_separated(const Digraph& g, const PermGroup& gp, const LabelledPath& top, const LabelledPath& bottom) {
    return is_properly_separated(OrbitView(g, gp), top, bottom);
}

bool is_extension(const LabelledPath& ext, const LabelledPath& base) {
    int L = ext.length(), n = base.length();
    if (L < n || (L - n) % 2) return false;
    // red[a] = positions b such that ext[a..b] cancels to the empty path
    std::vector<Bits> red(L + 1, Bits(L + 1));
    for (int a = 0; a <= L; ++a) {
        std::vector<int> st;  // indices of surviving steps
        red[a].set(a);
        for (int s = a; s < L; ++s) {
            Dir d = ext.path.steps[s];
            if (!st.empty()) {
                int t = st.back();
                if (ext.path.steps[t] == flip(d) && ext.labels[t] == ext.labels[s + 1]) {
                    st.pop_back();
                    if (st.empty()) red[a].set(s + 1);
                    continue;
                }
            }
            st.push_back(s);
        }
    }
    if (ext.labels[0] != base.labels[0]) return false;
    Bits reach = red[0];
    for (int i = 0; i < n; ++i) {
        Bits nxt(L + 1);
        reach.for_each([&](int p) {
            if (p < L && ext.path.steps[p] == base.path.steps[i] && ext.labels[p + 1] == base.labels[i + 1])
                nxt |= red[p + 1];
        });
        reach = nxt;
        if (reach.none()) return false;
    }
    return reach.test(L);
}

std::pair<int, int> euclid_hammer(int k, int l, int n) {
    if (k <= 0 || l <= 0) throw std::invalid_argument("euclid_hammer needs positive k and l");
    if (std::gcd(k, l) != 1) throw std::invalid_argument("k and l must be coprime");
    if (n <= k * l) throw std::invalid_argument("n must exceed k*l");
    if (std::gcd(n, k) != 1 || std::gcd(n, l) != 1) throw std::invalid_argument("n must be coprime with k and l");
    for (int t = 1; t * l < n; ++t)
        if ((n - t * l) % k == 0) return {(n - t * l) / k, t};
    throw std::logic_error("no decomposition found");
}

namespace {

struct Pair {
    LabelledPath top, bot;
    Pair(int a, int b) : top(LabelledPath::at(a)), bot(LabelledPath::at(b)) {}
    void step(Dir d, int a, int b) {
        top.push(d, a);
        bot.push(d, b);
    }
    void append(const Pair& o) {
        top = top + o.top;
        bot = bot + o.bot;
    }
};

// Shortest directed cycle through v inside allowed, as (v = C_0, C_1, ..., C_{k-1}).
std::vector<int> shortest_cycle_through(const Digraph& q, int v, const Bits& allowed) {
    std::vector<int> par(q.size(), -2);
    std::deque<int> dq{v};
    par[v] = -1;
    while (!dq.empty()) {
        int x = dq.front();
        dq.pop_front();
        if (q.has_edge(x, v)) {
            std::vector<int> c;
            for (int y = x; y != -1; y = par[y]) c.push_back(y);
            std::reverse(c.begin(), c.end());
            return c;
        }
        for (int y : q.out(x))
            if (allowed.test(y) && par[y] == -2) par[y] = x, dq.push_back(y);
    }
    return {};
}

std::vector<int> shortest_cycle_in(const Digraph& q, const Bits& comp) {
    std::vector<int> best;
    comp.for_each([&](int v) {
        auto c = shortest_cycle_through(q, v, comp);
        if (!c.empty() && (best.empty() || c.size() < best.size())) best = c;
    });
    return best;
}

// Shortest walk from s along direction d to some vertex of target, optionally expanding only through pass.
// Returns vertices from s to the target vertex.
std::vector<int> walk_to(const Digraph& q, int s, Dir d, const Bits& target, const Bits* pass, const Bits* allowed) {
    std::vector<int> par(q.size(), -2);
    std::deque<int> dq{s};
    par[s] = -1;
    while (!dq.empty()) {
        int x = dq.front();
        dq.pop_front();
        if (target.test(x)) {
            std::vector<int> w;
            for (int y = x; y != -1; y = par[y]) w.push_back(y);
            std::reverse(w.begin(), w.end());
            return w;
        }
        if (pass && !pass->test(x)) continue;
        for (int y : d == Dir::Fwd ? q.out(x) : q.in(x))
            if ((!allowed || allowed->test(y)) && par[y] == -2) par[y] = x, dq.push_back(y);
    }
    return {};
}

int mod(int a, int m) { return ((a % m) + m) % m; }

std::vector<int> scc_ids(const Digraph& q) {
    std::vector<int> id(q.size(), -1);
    auto comps = strong_components(q);
    for (size_t c = 0; c < comps.size(); ++c)
        for (int v : comps[c]) id[v] = int(c);
    return id;
}

// Same strong component for U, V, V2.
Pair case_same_component(const Digraph& q, const std::vector<int>& scc, int U, int V, int U2, int V2) {
    Bits comp(q.size());
    for (int x = 0; x < q.size(); ++x)
        if (scc[x] == scc[U]) comp.set(x);
    auto C = shortest_cycle_in(q, comp);
    int k = int(C.size());
    Bits onC = Bits::from(q.size(), C);
    auto back = walk_to(q, U, Dir::Bwd, onC, nullptr, &comp);  // U = U_{n-1}, ..., U_0
    std::rotate(C.begin(), std::find(C.begin(), C.end(), back.back()), C.end());
    int n = int(back.size());
    std::vector<int> Q(back.rbegin(), back.rend());  // U_0 .. U_{n-1}
    Q.push_back(V);
    auto fwd = walk_to(q, V2, Dir::Fwd, Bits::from(q.size(), {C[0]}), nullptr, &comp);
    Q.insert(Q.end(), fwd.begin(), fwd.end());  // .. U_{q-1} = C_0
    int qq = int(Q.size());
    auto c = [&](int i) { return C[mod(i, k)]; };

    Pair r(U, U2);
    for (int i = n - 2; i >= 0; --i) r.step(Dir::Bwd, Q[i], Q[i + 1]);
    r.step(Dir::Bwd, c(-1), C[0]);
    std::vector<int> t{C[0]}, b;
    for (int i = 1; i < qq; ++i) t.push_back(Q[i]);
    for (int i = 1; i <= k; ++i) t.push_back(c(i));
    for (int i = 1; i <= k; ++i) b.push_back(c(i));
    for (int i = 1; i < qq; ++i) b.push_back(Q[i]);
    b.push_back(c(1));
    for (size_t i = 0; i < t.size(); ++i) r.step(Dir::Fwd, t[i], b[i]);
    t.clear(), b.clear();
    for (int i = 1; i <= k; ++i) t.push_back(c(-i));
    for (int i = qq - 2; i >= n; --i) t.push_back(Q[i]);
    for (int i = 0; i < k; ++i) b.push_back(c(-i));
    b.push_back(c(0));
    for (int i = qq - 2; i >= n + 1; --i) b.push_back(Q[i]);
    for (size_t i = 0; i < t.size(); ++i) r.step(Dir::Bwd, t[i], b[i]);
    return r;
}

// Distinct strong components for U and V.
Pair case_distinct_components(const Digraph& q, int U, int V, int U2, int V2, std::string* method) {
    Bits all(q.size(), true);
    Bits cyc = cyclic_vertices(q, all);
    Bits acyc = cyc.complement();
    auto back = walk_to(q, U, Dir::Bwd, cyc, &acyc, nullptr);  // U, ..., U_0
    int n = int(back.size());
    auto C = shortest_cycle_through(q, back.back(), all);
    int k = int(C.size());
    auto fwd = walk_to(q, V2, Dir::Fwd, cyc, &acyc, nullptr);  // V2, ..., D_0
    auto D = shortest_cycle_through(q, fwd.back(), all);
    int l = int(D.size());
    std::vector<int> Q(back.rbegin(), back.rend());
    Q.push_back(V);
    Q.insert(Q.end(), fwd.begin(), fwd.end());
    int qq = int(Q.size());

    // closed walk through C_0 used in place of C
    std::vector<int> W = C;
    int p = 1, j = 0, i = 1;
    long mp = 0;
    bool chord_a = k >= 3 && q.has_edge(C[k - 1], C[1]);
    bool chord_b = k >= 3 && q.has_edge(C[k - 2], C[0]);
    if (!chord_a && !chord_b) {
        if (method) *method += "2.1";
        int step = l / std::gcd(k, l);
        mp = step;
        while (mp <= qq - 1) mp += step;
    } else {
        if (method) *method += "2.2";
        int best_s = -1, best_t = -1;
        for (int tot = 0; best_s < 0 && tot <= 4 * (k + l); ++tot)
            for (int t = 0; t <= tot; ++t)
                if (std::gcd(k + (tot - t) * k + t * (k - 1), l) == 1) {
                    best_s = tot - t, best_t = t;
                    break;
                }
        if (best_s < 0) throw std::logic_error("coprime cycle length not found");
        W.clear();
        if (chord_a) {
            // C_0, then t laps of C_1..C_{k-1}, then the rest of C, then s laps of C
            W.push_back(C[0]);
            for (int r = 0; r < best_t; ++r)
                for (int x = 1; x < k; ++x) W.push_back(C[x]);
            for (int x = 1; x < k; ++x) W.push_back(C[x]);
        } else {
            for (int x = 0; x < k; ++x) W.push_back(C[x]);
            for (int r = 0; r < best_t; ++r)
                for (int x = 0; x < k - 1; ++x) W.push_back(C[x]);
        }
        for (int r = 0; r < best_s; ++r)
            for (int x = 0; x < k; ++x) W.push_back(C[x]);
        int K = int(W.size());
        p = 0;
        for (int a = 0; a < K; ++a)
            for (int b2 = 0; b2 < K; ++b2)
                if (q.has_edge(W[a], W[b2]) && mod(b2 - a, K) > p) p = mod(b2 - a, K), j = a, i = b2;
        for (long x = qq + p;; ++x)
            if (mod(int((x * K) % l), l) == mod(p - 1, l)) {
                mp = x;
                break;
            }
    }
    int K = int(W.size());
    long ml = mp * K - p + 1;
    auto c = [&](long x) { return W[mod(int(x % K), K)]; };
    auto d = [&](long x) { return D[mod(int(x % l), l)]; };

    Pair r(U, U2);
    for (int x = n - 2; x >= 0; --x) r.step(Dir::Bwd, Q[x], Q[x + 1]);
    int desc = mod(K - j, K);
    for (int x = 1; x <= desc + 1; ++x) r.step(Dir::Bwd, c(-x), c(-x + 1));
    // forward
    std::vector<int> t, b;
    int up = mod(K - j, K);
    for (int x = 1; x <= up + 1; ++x) t.push_back(c(j - 1 + x));
    for (int x = 1; x < qq; ++x) t.push_back(Q[x]);
    for (long x = 1; x <= ml; ++x) t.push_back(d(x));
    b.push_back(c(i));
    for (long x = 1; x <= mp * K - p; ++x) b.push_back(c(i + x));
    for (int x = 1; x <= up; ++x) b.push_back(c(j + x));
    for (int x = 1; x < qq; ++x) b.push_back(Q[x]);
    b.push_back(d(1));
    if (t.size() != b.size()) throw std::logic_error("forward walks differ in length");
    for (size_t x = 0; x < t.size(); ++x) r.step(Dir::Fwd, t[x], b[x]);
    t.clear(), b.clear();
    for (long x = 1; x <= ml; ++x) t.push_back(d(-x));
    for (int x = qq - 2; x >= n; --x) t.push_back(Q[x]);
    for (long x = 1; x <= ml; ++x) b.push_back(d(1 - x));
    b.push_back(d(0));
    for (int x = qq - 2; x >= n + 1; --x) b.push_back(Q[x]);
    if (t.size() != b.size()) throw std::logic_error("backward walks differ in length");
    for (size_t x = 0; x < t.size(); ++x) r.step(Dir::Bwd, t[x], b[x]);
    return r;
}

bool locally_separated(const Digraph& q, const LabelledPath& top, const LabelledPath& bot) {
    if (!(top.path == bot.path)) return false;
    for (int s = 0; s < top.length(); ++s) {
        Dir d = top.path.steps[s];
        auto adj = [&](int a, int b) { return d == Dir::Fwd ? q.has_edge(a, b) : q.has_edge(b, a); };
        if (!adj(top.labels[s], top.labels[s + 1]) || !adj(bot.labels[s], bot.labels[s + 1])) return false;
        if (adj(top.labels[s], bot.labels[s + 1])) return false;
    }
    return true;
}

// Complete search: top = excursion(U) + (U d V) + excursion(V), bottom free.
// R[X][X'] = set of Y' such that a cancelling excursion at X pairs with a bottom walk X' -> Y'.
class ExcursionSearch {
public:
    explicit ExcursionSearch(const Digraph& q) : q_(q), m_(q.size()) {
        R_.assign(m_ * m_, Bits(m_));
        why_.resize(size_t(m_) * m_ * m_);
        for (int x = 0; x < m_; ++x)
            for (int y = 0; y < m_; ++y) set(x, y, y, {0, -1, -1, -1, -1, -1});
        bool changed = true;
        while (changed) {
            changed = false;
            for (int x = 0; x < m_; ++x)
                for (Dir d : {Dir::Fwd, Dir::Bwd})
                    for (int y : nb(x, d))
                        for (int x2 = 0; x2 < m_; ++x2)
                            for (int y1 : nb(x2, d)) {
                                if (adj(x, d, y1)) continue;
                                R_[idx(y, y1)].for_each([&](int y2) {
                                    for (int z : nb(y2, flip(d))) {
                                        if (adj(y, flip(d), z)) continue;
                                        if (!R_[idx(x, x2)].test(z)) {
                                            // wrap then close: x2 -> z directly
                                            set(x, x2, z, {1, y, y1, y2, d == Dir::Fwd ? 0 : 1, -1});
                                            changed = true;
                                        }
                                    }
                                });
                            }
            for (int x = 0; x < m_; ++x)
                for (int x2 = 0; x2 < m_; ++x2)
                    for (int mid : R_[idx(x, x2)].elements())
                        R_[idx(x, mid)].for_each([&](int z) {
                            if (!R_[idx(x, x2)].test(z)) {
                                set(x, x2, z, {2, mid, -1, -1, -1, -1});
                                changed = true;
                            }
                        });
        }
    }

    bool find(int U, Dir d, int V, int U2, int V2, Pair& out) const {
        for (int a : R_[idx(U, U2)].elements())
            for (int b : nb(a, d)) {
                if (adj(U, d, b) || !R_[idx(V, b)].test(V2)) continue;
                Pair r(U, U2);
                emit(U, U2, a, r);
                r.step(d, V, b);
                emit(V, b, V2, r);
                out = r;
                return true;
            }
        return false;
    }

private:
    struct Why {
        int rule, a, b, c, d, e;
    };
    size_t idx(int x, int y) const { return size_t(x) * m_ + y; }
    bool adj(int a, Dir d, int b) const { return d == Dir::Fwd ? q_.has_edge(a, b) : q_.has_edge(b, a); }
    const std::vector<int>& nb(int x, Dir d) const { return d == Dir::Fwd ? q_.out(x) : q_.in(x); }
    void set(int x, int x2, int z, Why w) {
        R_[idx(x, x2)].set(z);
        why_[idx(x, x2) * m_ + z] = w;
    }
    // append the witness for R[x][x2] ∋ z to r (r currently ends at (x, x2))
    void emit(int x, int x2, int z, Pair& r) const {
        const Why& w = why_[idx(x, x2) * m_ + z];
        if (w.rule == 0) return;
        if (w.rule == 2) {
            emit(x, x2, w.a, r);
            emit(x, w.a, z, r);
            return;
        }
        Dir d = w.d == 0 ? Dir::Fwd : Dir::Bwd;
        r.step(d, w.a, w.b);
        emit(w.a, w.b, w.c, r);
        r.step(flip(d), x, z);
    }

    const Digraph& q_;
    int m_;
    std::vector<Bits> R_;
    std::vector<Why> why_;
};

}  // namespace

std::pair<LabelledPath, LabelledPath> separated_step(const Digraph& q, int U, Dir d, int V, int U2, int V2,
                                                     std::string* method) {
    if (!(d == Dir::Fwd ? q.has_edge(U, V) : q.has_edge(V, U)) || !q.has_edge(U, U2) || !q.has_edge(V, V2))
        throw std::invalid_argument("separated_step preconditions violated");
    auto scc = scc_ids(q);
    std::string m;
    auto fwd_case = [&](int u, int v, int u2, int v2) -> Pair {
        if (scc[u] == scc[v] && scc[v] == scc[v2]) {
            m += "1";
            return case_same_component(q, scc, u, v, u2, v2);
        }
        if (scc[u] != scc[v]) {
            m += "2";
            return case_distinct_components(q, u, v, u2, v2, &m);
        }
        m += "3";
        int w = -1, w2 = q.out(v2).front();
        for (int x : q.out(v))
            if (scc[x] == scc[u]) {
                w = x;
                break;
            }
        Pair r = case_same_component(q, scc, u, v, u2, w);
        r.append(case_distinct_components(q, v, v2, w, w2, &m));
        Pair last(v2, w2);
        last.step(Dir::Bwd, v, v2);
        r.append(last);
        return r;
    };
    Pair res(U, U2);
    if (d == Dir::Fwd) {
        res = fwd_case(U, V, U2, V2);
    } else {
        int Q0 = q.in(V).front();
        m += "b";
        Pair nu(U, U2);
        nu.step(Dir::Bwd, V, U);
        nu.step(Dir::Bwd, Q0, V);
        nu.append(fwd_case(Q0, V, V, V2));
        res = nu;
    }
    LabelledPath base = LabelledPath::at(U);
    base.push(d, V);
    if (!locally_separated(q, res.top, res.bot) || !is_extension(res.top, base) || res.bot.first() != U2 ||
        res.bot.last() != V2) {
        ExcursionSearch es(q);
        if (!es.find(U, d, V, U2, V2, res)) throw std::logic_error("no separated pair exists for this step");
        m = "search:" + m;
    }
    if (method) *method = m;
    return {res.top, res.bot};
}

SeparatedPair build_separated_pair(const OrbitView& v, const LabelledPath& pi, int P) {
    const Digraph& q = v.quotient();
    if (q.has_loop()) throw std::invalid_argument("orbit quotient has a loop");
    if (!is_smooth(v.graph())) throw std::invalid_argument("digraph is not smooth");
    if (pi.first() != pi.last()) throw std::invalid_argument("pi must start and end in the same orbit");
    if (!realisable(v, pi)) throw std::invalid_argument("pi is not realisable");
    if (!q.has_edge(pi.first(), P)) throw std::invalid_argument("P must be an out-neighbour of the start orbit");
    SeparatedPair out;
    out.ext = LabelledPath::at(pi.first());
    out.rho = LabelledPath::at(P);
    int cur = P;
    for (int s = 0; s < pi.length(); ++s) {
        int a = pi.labels[s], b = pi.labels[s + 1];
        int nxt = s + 1 == pi.length() ? P : q.out(b).front();
        std::string m;
        auto [t, bt] = separated_step(q, a, pi.path.steps[s], b, cur, nxt, &m);
        out.ext = out.ext + t;
        out.rho = out.rho + bt;
        out.steps.push_back(m);
        cur = nxt;
    }
    if (!is_properly_separated(v, out.ext, out.rho) || !is_extension(out.ext, pi) || !realisable(v, out.rho))
        throw std::logic_error("separated pair failed verification");
    return out;
}

SeparatedPair build_separated_pair(const Digraph& g, const PermGroup& gp, const LabelledPath& pi, int P) {
    return build_separated_pair(OrbitView(g, gp), pi, P);
}

namespace {

// Orientation O_out -> O_in on quotient q; C given as orbit set.
bool central_escape_fwd(const Digraph& q, const Bits& C, int O_in, int O_out, CentralEscape& res) {
    int m = q.size();
    Bits outside = C.complement();
    // case 1: forward walk from O_in staying in C and then leaving it
    {
        std::vector<int> par(m, -2);
        std::deque<int> dq{O_in};
        par[O_in] = -1;
        int hit = -1;
        while (!dq.empty() && hit < 0) {
            int x = dq.front();
            dq.pop_front();
            for (int y : q.out(x)) {
                if (par[y] != -2) continue;
                par[y] = x;
                if (!C.test(y)) {
                    hit = y;
                    break;
                }
                dq.push_back(y);
            }
        }
        if (hit >= 0) {
            std::vector<int> w;
            for (int y = hit; y != -1; y = par[y]) w.push_back(y);
            std::reverse(w.begin(), w.end());  // O_in, O_1, ..., O_n
            Pair r(O_in, O_out);
            for (size_t i = 1; i < w.size(); ++i) r.step(Dir::Fwd, w[i], w[i - 1]);
            res.pi = r.top;
            res.pi_prime = r.bot;
            res.method = "boundary-walk";
            return true;
        }
    }
    // case 2: nearest cycle inside C reachable from O_in, segment of maximal length
    Bits cyc = cyclic_vertices(q, C);
    if (cyc.none()) return false;
    Bits acyc = C - cyc;
    auto route = walk_to(q, O_in, Dir::Fwd, cyc, &acyc, &C);
    if (route.empty()) return false;
    auto P = shortest_cycle_through(q, route.back(), C);
    int k = int(P.size());
    int p = 0, j = 0, i = 0;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            if (q.has_edge(P[a], P[b]) && mod(b - a, k) > p) p = mod(b - a, k), j = a, i = b;
    auto c = [&](int x) { return P[mod(x, k)]; };
    Pair r(O_in, O_out);
    int rl = int(route.size());
    for (int x = 1; x < rl; ++x) r.step(Dir::Fwd, route[x], route[x - 1]);
    for (int x = 1; x <= i; ++x) r.step(Dir::Fwd, c(x), c(x - 1));
    r.step(Dir::Fwd, c(i + 1), c(i));
    r.step(Dir::Bwd, c(i), c(j));
    int tb = 1;
    for (int x = i - 1; x >= 0; --x, ++tb) r.step(Dir::Bwd, c(x), c(j - tb));
    for (int x = rl - 2; x >= 0; --x, ++tb) r.step(Dir::Bwd, route[x], c(j - tb));
    r.step(Dir::Bwd, O_out, c(j - tb));
    res.pi = r.top;
    res.pi_prime = r.bot;
    res.method = "cycle-segment";
    return true;
}

// Breadth-first search over (top, bottom) orbit pairs in both directions.
bool central_escape_search(const Digraph& q, const Bits& C, int O_in, int O_out, CentralEscape& res) {
    int m = q.size();
    auto id = [&](int a, int b) { return a * m + b; };
    std::vector<int> par(m * m, -2);
    std::vector<Dir> how(m * m);
    std::deque<int> dq{id(O_in, O_out)};
    par[id(O_in, O_out)] = -1;
    int goal = -1;
    while (!dq.empty() && goal < 0) {
        int s = dq.front();
        dq.pop_front();
        int a = s / m, b = s % m;
        for (Dir d : {Dir::Fwd, Dir::Bwd}) {
            auto& na = d == Dir::Fwd ? q.out(a) : q.in(a);
            auto& nb = d == Dir::Fwd ? q.out(b) : q.in(b);
            for (int x : na)
                for (int y : nb) {
                    bool bad = d == Dir::Fwd ? q.has_edge(a, y) : q.has_edge(y, a);
                    if (bad || par[id(x, y)] != -2) continue;
                    par[id(x, y)] = s;
                    how[id(x, y)] = d;
                    if (!C.test(x) && C.test(y)) goal = id(x, y);
                    dq.push_back(id(x, y));
                }
        }
    }
    if (goal < 0) return false;
    std::vector<int> states;
    for (int s = goal; s != -1; s = par[s]) states.push_back(s);
    std::reverse(states.begin(), states.end());
    Pair r(O_in, O_out);
    for (size_t x = 1; x < states.size(); ++x) r.step(how[states[x]], states[x] / m, states[x] % m);
    res.pi = r.top;
    res.pi_prime = r.bot;
    res.method = "search";
    return true;
}

}  // namespace

CentralEscape build_central_escape(const OrbitView& v, const Bits& C, int O_in, int O_out) {
    const Digraph& q = v.quotient();
    if (q.has_loop()) throw std::invalid_argument("orbit quotient has a loop");
    Bits corb(v.num_orbits());
    for (int o = 0; o < v.num_orbits(); ++o) {
        bool in = v.orbit_set(o).subset_of(C), meet = v.orbit_set(o).intersects(C);
        if (meet && !in) throw std::invalid_argument("C is not a union of orbits");
        if (in) corb.set(o);
    }
    if (!corb.test(O_in) || corb.test(O_out)) throw std::invalid_argument("O_in must lie in C and O_out outside");
    bool fwd = q.has_edge(O_out, O_in), bwd = q.has_edge(O_in, O_out);
    if (!fwd && !bwd) throw std::invalid_argument("O_in and O_out are not adjacent");
    CentralEscape res;
    bool ok = false;
    if (fwd) {
        ok = central_escape_fwd(q, corb, O_in, O_out, res);
    } else {
        ok = central_escape_fwd(q.reversed(), corb, O_in, O_out, res);
        if (ok) {
            for (auto& s : res.pi.path.steps) s = flip(s);
            res.pi_prime.path = res.pi.path;
        }
    }
    auto valid = [&]() {
        return res.pi.first() == O_in && res.pi_prime.first() == O_out && !corb.test(res.pi.last()) &&
               corb.test(res.pi_prime.last()) && res.pi.length() > 0 && realisable(v, res.pi) &&
               realisable(v, res.pi_prime) && is_properly_separated(v, res.pi, res.pi_prime);
    };
    if (!ok || !valid()) {
        if (!central_escape_search(q, corb, O_in, O_out, res) || !valid())
            throw std::logic_error("no properly separated escape exists");
    }
    res.o_out2 = res.pi.last();
    res.o_in2 = res.pi_prime.last();
    return res;
}

CentralEscape build_central_escape(const Digraph& g, const PermGroup& gp, const Bits& C, int O_in, int O_out) {
    return build_central_escape(OrbitView(g, gp), C, O_in, O_out);
}

}  // namespace loopsmith

#include "loopsmith/digraph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace loopsmith {

int AbstractPath::algebraic_length() const {
    int a = 0;
    for (Dir d : steps) a += d == Dir::Fwd ? 1 : -1;
    return a;
}

AbstractPath AbstractPath::reversed() const {
    AbstractPath r;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) r.steps.push_back(flip(*it));
    return r;
}

AbstractPath AbstractPath::operator+(const AbstractPath& o) const {
    AbstractPath r = *this;
    r.steps.insert(r.steps.end(), o.steps.begin(), o.steps.end());
    return r;
}

AbstractPath AbstractPath::repeat(int times) const {
    AbstractPath r;
    for (int i = 0; i < times; ++i) r = r + *this;
    return r;
}

AbstractPath AbstractPath::forward(int k) { return {std::vector<Dir>(k, Dir::Fwd)}; }
AbstractPath AbstractPath::backward(int k) { return {std::vector<Dir>(k, Dir::Bwd)}; }
AbstractPath AbstractPath::fence(int k, int n) { return (forward(k) + backward(k)).repeat(n); }

std::string AbstractPath::str() const {
    std::string s;
    for (Dir d : steps) s += d == Dir::Fwd ? '>' : '<';
    return s;
}

Digraph::Digraph(int n, const std::vector<std::pair<int, int>>& edges) : Digraph(n) {
    for (auto [a, b] : edges) add_edge(a, b);
}

void Digraph::add_edge(int a, int b) {
    if (a < 0 || b < 0 || a >= n_ || b >= n_) throw std::out_of_range("edge endpoint outside vertex range");
    if (adj_.test(a, b)) return;
    adj_.set(a, b);
    out_[a].insert(std::upper_bound(out_[a].begin(), out_[a].end(), b), b);
    in_[b].insert(std::upper_bound(in_[b].begin(), in_[b].end(), a), a);
}

bool Digraph::has_loop() const {
    for (int v = 0; v < n_; ++v)
        if (adj_.test(v, v)) return true;
    return false;
}

Digraph Digraph::reversed() const {
    Digraph r(n_);
    for (auto [a, b] : edges()) r.add_edge(b, a);
    return r;
}

Digraph Digraph::induced(const Bits& s, std::vector<int>* to_global) const {
    std::vector<int> g = s.elements();
    std::vector<int> local(n_, -1);
    for (size_t i = 0; i < g.size(); ++i) local[g[i]] = int(i);
    Digraph r(int(g.size()));
    for (int a : g)
        for (int b : out_[a])
            if (local[b] >= 0) r.add_edge(local[a], local[b]);
    if (to_global) *to_global = g;
    return r;
}

BinRel Digraph::path_relation(const AbstractPath& p) const {
    BinRel fwd = adj_, bwd = adj_.inverse();
    BinRel r = BinRel::identity(n_);
    for (Dir d : p.steps) r = r.compose(d == Dir::Fwd ? fwd : bwd);
    return r;
}

BinRel Digraph::path_relation(const AbstractPath& p, const std::vector<Bits>& labels) const {
    if (int(labels.size()) != p.length() + 1) throw std::invalid_argument("label count must be path length + 1");
    BinRel fwd = adj_, bwd = adj_.inverse();
    BinRel r = BinRel::identity(n_).restrict(labels[0]);
    for (int i = 0; i < p.length(); ++i) {
        r = r.compose(p.steps[i] == Dir::Fwd ? fwd : bwd);
        for (int a = 0; a < n_; ++a) r.row(a) &= labels[i + 1];
    }
    return r;
}

BinRel fence_relation(const Digraph& g, int k, int n) {
    if (k < 1 || n < 1) throw std::invalid_argument("fence parameters must be positive");
    BinRel ek = g.relation().power(k);
    BinRel f1 = ek.compose(ek.inverse());
    BinRel r = f1;
    for (int i = 1; i < n; ++i) r = r.compose(f1);
    return r;
}

Linkedness linkedness(const Digraph& g, int k) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (!is_smooth(g)) throw std::invalid_argument("linkedness requires a smooth digraph");
    BinRel ek = g.relation().power(k);
    BinRel f1 = ek.compose(ek.inverse());
    Linkedness out;
    BinRel cur = f1;
    int n = 1;
    while (true) {
        BinRel nxt = cur.compose(f1);
        if (nxt == cur) break;
        cur = nxt;
        ++n;
    }
    out.equivalence = cur;
    out.is_full = cur.is_full();
    out.saturation = n;
    return out;
}

int smallest_linked_k(const Digraph& g, int limit) {
    for (int k = 1; k <= limit; ++k)
        if (linkedness(g, k).is_full) return k;
    return -1;
}

bool is_smooth_on(const Digraph& g, const Bits& s) {
    bool ok = true;
    s.for_each([&](int v) {
        if (!(g.relation().row(v).intersects(s))) ok = false;
        bool in = false;
        for (int u : g.in(v))
            if (s.test(u)) in = true;
        if (!in) ok = false;
    });
    return ok;
}

bool is_smooth(const Digraph& g) { return is_smooth_on(g, Bits(g.size(), true)); }

Bits smooth_part(const Digraph& g, const Bits& domain) {
    Bits s = domain;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v : s.elements()) {
            bool out = g.relation().row(v).intersects(s);
            bool in = false;
            for (int u : g.in(v))
                if (s.test(u)) {
                    in = true;
                    break;
                }
            if (!out || !in) {
                s.reset(v);
                changed = true;
            }
        }
    }
    return s;
}

std::vector<std::vector<int>> weak_components_on(const Digraph& g, const Bits& s) {
    int n = g.size();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> out;
    for (int v = 0; v < n; ++v) {
        if (!s.test(v) || comp[v] >= 0) continue;
        int id = int(out.size());
        out.emplace_back();
        std::deque<int> q{v};
        comp[v] = id;
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            out[id].push_back(x);
            auto visit = [&](int y) {
                if (s.test(y) && comp[y] < 0) {
                    comp[y] = id;
                    q.push_back(y);
                }
            };
            for (int y : g.out(x)) visit(y);
            for (int y : g.in(x)) visit(y);
        }
        std::sort(out[id].begin(), out[id].end());
    }
    return out;
}

std::vector<std::vector<int>> weak_components(const Digraph& g) {
    return weak_components_on(g, Bits(g.size(), true));
}

std::vector<std::vector<int>> strong_components(const Digraph& g) {
    // Tarjan, iterative
    int n = g.size();
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<bool> on(n, false);
    std::vector<std::vector<int>> out;
    int counter = 0;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<std::pair<int, size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on[root] = true;
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i < g.out(v).size()) {
                int w = g.out(v)[i++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on[w] = true;
                    call.emplace_back(w, 0);
                } else if (on[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            } else {
                int vv = v;
                call.pop_back();
                if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[vv]);
                if (low[vv] == index[vv]) {
                    std::vector<int> c;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on[w] = false;
                        c.push_back(w);
                    } while (w != vv);
                    std::sort(c.begin(), c.end());
                    out.push_back(c);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Bits cyclic_vertices(const Digraph& g, const Bits& s) {
    std::vector<int> to_global;
    Digraph h = g.induced(s, &to_global);
    Bits out(g.size());
    for (auto& c : strong_components(h)) {
        if (c.size() > 1 || h.has_edge(c[0], c[0]))
            for (int v : c) out.set(to_global[v]);
    }
    return out;
}

bool Walk::realises(const Digraph& g) const {
    if (vertices.size() != path.steps.size() + 1) return false;
    for (size_t i = 0; i < path.steps.size(); ++i) {
        int a = vertices[i], b = vertices[i + 1];
        if (a < 0 || b < 0 || a >= g.size() || b >= g.size()) return false;
        bool ok = path.steps[i] == Dir::Fwd ? g.has_edge(a, b) : g.has_edge(b, a);
        if (!ok) return false;
    }
    return true;
}

int algebraic_gcd(const Digraph& g, int v) {
    int n = g.size();
    std::vector<long> h(n, 0);
    std::vector<bool> seen(n, false);
    std::deque<int> q{v};
    seen[v] = true;
    std::vector<int> comp;
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        comp.push_back(x);
        for (int y : g.out(x))
            if (!seen[y]) seen[y] = true, h[y] = h[x] + 1, q.push_back(y);
        for (int y : g.in(x))
            if (!seen[y]) seen[y] = true, h[y] = h[x] - 1, q.push_back(y);
    }
    long d = 0;
    for (int x : comp)
        for (int y : g.out(x)) d = std::gcd(d, std::labs(h[x] + 1 - h[y]));
    return int(d);
}

std::optional<Walk> find_unit_walk(const Digraph& g) {
    int n = g.size();
    if (n == 0) return std::nullopt;
    const int L = 2 * n * n + 1;
    const int W = 2 * L + 1;
    for (auto& comp : weak_components(g)) {
        int s = comp.front();
        if (algebraic_gcd(g, s) != 1) continue;
        // BFS over (vertex, algebraic offset) with walk length ≤ L
        auto id = [&](int v, int a) { return size_t(v) * W + size_t(a + L); };
        std::vector<int> parent(size_t(n) * W, -2);
        std::vector<int> depth(size_t(n) * W, 0);
        std::deque<std::pair<int, int>> q;
        parent[id(s, 0)] = -1;
        q.emplace_back(s, 0);
        size_t goal = id(s, 1);
        while (!q.empty() && parent[goal] == -2) {
            auto [v, a] = q.front();
            q.pop_front();
            int dp = depth[id(v, a)];
            if (dp >= L) continue;
            auto push = [&](int w, int b) {
                if (b < -L || b > L) return;
                size_t k = id(w, b);
                if (parent[k] != -2) return;
                parent[k] = int(id(v, a));
                depth[k] = dp + 1;
                q.emplace_back(w, b);
            };
            for (int w : g.out(v)) push(w, a + 1);
            for (int w : g.in(v)) push(w, a - 1);
        }
        if (parent[goal] == -2) continue;
        std::vector<std::pair<int, int>> states;
        for (long k = long(goal); k != -1; k = parent[k]) states.emplace_back(int(k / W), int(k % W) - L);
        std::reverse(states.begin(), states.end());
        Walk w;
        for (auto [v, a] : states) w.vertices.push_back(v);
        for (size_t i = 1; i < states.size(); ++i)
            w.path.steps.push_back(states[i].second > states[i - 1].second ? Dir::Fwd : Dir::Bwd);
        return w;
    }
    return std::nullopt;
}

}  // namespace loopsmith

#ifndef LOOPSMITH_DIGRAPH_HPP
#define LOOPSMITH_DIGRAPH_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loopsmith/relation.hpp"

namespace loopsmith {

enum class Dir : uint8_t { Fwd, Bwd };

inline Dir flip(Dir d) { return d == Dir::Fwd ? Dir::Bwd : Dir::Fwd; }

// Sequence of direction tokens.
struct AbstractPath {
    std::vector<Dir> steps;

    int length() const { return int(steps.size()); }
    int algebraic_length() const;
    AbstractPath reversed() const;  // −p
    AbstractPath operator+(const AbstractPath& o) const;
    AbstractPath repeat(int times) const;
    static AbstractPath forward(int k);
    static AbstractPath backward(int k);
    static AbstractPath fence(int k, int n);  // (E^k E^-k)^n
    std::string str() const;
    bool operator==(const AbstractPath& o) const { return steps == o.steps; }
};

class Digraph {
public:
    Digraph() = default;
    explicit Digraph(int n) : n_(n), adj_(n), out_(n), in_(n) {}
    Digraph(int n, const std::vector<std::pair<int, int>>& edges);

    int size() const { return n_; }
    void add_edge(int a, int b);
    bool has_edge(int a, int b) const { return adj_.test(a, b); }
    const BinRel& relation() const { return adj_; }
    const std::vector<int>& out(int v) const { return out_[v]; }
    const std::vector<int>& in(int v) const { return in_[v]; }
    std::vector<std::pair<int, int>> edges() const { return adj_.pairs(); }
    int edge_count() const { return adj_.count(); }
    bool has_loop() const;

    Digraph reversed() const;
    // Induced subgraph on the given set, re-indexed in increasing vertex order.
    Digraph induced(const Bits& s, std::vector<int>* to_global = nullptr) const;

    // Relation realised by an abstract path, with optional per-position vertex constraints.
    BinRel path_relation(const AbstractPath& p) const;
    BinRel path_relation(const AbstractPath& p, const std::vector<Bits>& labels) const;

    BinRel step(Dir d) const { return d == Dir::Fwd ? adj_ : adj_.inverse(); }

    bool operator==(const Digraph& o) const { return adj_ == o.adj_; }

private:
    int n_ = 0;
    BinRel adj_;
    std::vector<std::vector<int>> out_, in_;
};

BinRel fence_relation(const Digraph& g, int k, int n);

struct Linkedness {
    BinRel equivalence;
    bool is_full = false;
    int saturation = 0;  // smallest n with F^k_n equal to the limit
};

Linkedness linkedness(const Digraph& g, int k);
// Smallest k ≤ limit with g k-linked, or -1.
int smallest_linked_k(const Digraph& g, int limit);

bool is_smooth(const Digraph& g);
bool is_smooth_on(const Digraph& g, const Bits& s);
Bits smooth_part(const Digraph& g, const Bits& domain);

std::vector<std::vector<int>> weak_components(const Digraph& g);
std::vector<std::vector<int>> weak_components_on(const Digraph& g, const Bits& s);
std::vector<std::vector<int>> strong_components(const Digraph& g);
// Vertices lying on some directed cycle inside s.
Bits cyclic_vertices(const Digraph& g, const Bits& s);

struct Walk {
    std::vector<int> vertices;  // length = steps + 1
    AbstractPath path;
    bool realises(const Digraph& g) const;
};

std::optional<Walk> find_unit_walk(const Digraph& g);
// gcd of algebraic lengths of closed walks through the component of v (0 if acyclic as an undirected graph).
int algebraic_gcd(const Digraph& g, int v);

}  // namespace loopsmith

#endif

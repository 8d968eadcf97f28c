#ifndef LOOPSMITH_GROUP_HPP
#define LOOPSMITH_GROUP_HPP

#include <optional>
#include <vector>

#include "loopsmith/digraph.hpp"
#include "loopsmith/relation.hpp"

namespace loopsmith {

using Perm = std::vector<int>;

Perm perm_compose(const Perm& outer, const Perm& inner);  // outer ∘ inner
Perm perm_inverse(const Perm& p);
Perm perm_identity(int n);
bool is_bijection(const Perm& p, int n);

class PermGroup {
public:
    PermGroup() = default;
    PermGroup(int n, std::vector<Perm> gens);
    static PermGroup trivial(int n) { return PermGroup(n, {}); }

    int degree() const { return n_; }
    const std::vector<Perm>& generators() const { return gens_; }

    // Breadth-first closure; throws std::length_error past cap.
    std::vector<Perm> elements(size_t cap = 1000000) const;

    std::vector<int> orbit_ids() const;  // 1-orbit id per point, orbits numbered by least element
    std::vector<std::vector<int>> point_orbits() const;
    KaryRel orbit_of_tuple(const std::vector<int>& t) const;
    bool is_automorphism_group_of(const Digraph& g) const;

private:
    int n_ = 0;
    std::vector<Perm> gens_;
};

Bits apply_perm(const Perm& p, const Bits& s);
std::vector<int> apply_perm(const Perm& p, const std::vector<int>& t);

struct OrbitPartition {
    int arity = 0;
    int n = 0;
    std::vector<int> orbit_of;                           // tuple code (base n) -> orbit id
    std::vector<std::vector<std::vector<int>>> orbits;   // tuples per orbit
    static long code(const std::vector<int>& t, int n);
};

OrbitPartition orbits(const PermGroup& gp, int k);

struct OrbitQuotient {
    Digraph quotient;
    std::vector<int> orbit_of;
    std::vector<std::vector<int>> orbits;
    std::optional<std::pair<int, int>> loop_witness;
};

OrbitQuotient orbit_digraph(const Digraph& g, const PermGroup& gp);

bool is_invariant(const BinRel& r, const PermGroup& gp);
bool is_invariant(const KaryRel& r, const PermGroup& gp);
bool is_invariant(const Bits& s, const PermGroup& gp);

// Orbit of a vertex set under the induced set action.
std::vector<Bits> set_orbit(const PermGroup& gp, const Bits& h);
bool is_reductionistic(const Bits& h, const PermGroup& gp);

// Generators of the setwise stabiliser of h (Schreier generators over the set orbit).
std::vector<Perm> setwise_stabiliser(const PermGroup& gp, const Bits& h);

struct RestrictedGroup {
    PermGroup group;            // acts on 0..|H|-1
    std::vector<int> to_global; // local index -> vertex
    std::vector<Perm> global_generators;  // stabiliser generators on the full domain
};

RestrictedGroup restrict_group(const PermGroup& gp, const Bits& h);

// Action of the given permutations on the blocks of a partition compatible with them.
PermGroup block_action(const std::vector<Perm>& gens, const std::vector<int>& block_of, int blocks);

}  // namespace loopsmith

#endif

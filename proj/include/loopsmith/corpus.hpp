#ifndef LOOPSMITH_CORPUS_HPP
#define LOOPSMITH_CORPUS_HPP

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "loopsmith/digraph.hpp"
#include "loopsmith/group.hpp"
#include "loopsmith/relation.hpp"

namespace loopsmith {

struct Instance {
    std::string name;
    Digraph g;
    PermGroup gp;
    std::map<std::string, KaryRel> fixtures;
};

Instance swap_instance();
Instance directed_cycle(int n);
Instance symmetric_k3();
// Three-orbit pattern: 0→2, 2→1, 0↔1.
Digraph siggerscrap_pattern();

enum class GroupMode { Trivial, Sampled, Covering };

struct GenParams {
    int n_min = 3, n_max = 6;
    double density = 0.3;
    GroupMode mode = GroupMode::Trivial;
    int cover_degree = 2;  // covering mode: fibre size
    bool smooth = false;   // restrict to the smooth part, redrawing when it is empty
    bool loopless = false; // no edge inside a vertex orbit (covering mode is always loopless)
    bool pattern = false;  // covering mode: lift the three-orbit pattern instead of a random quotient
};

// Deterministic from the seed. Sampled mode draws a group first and keeps its invariant pair orbits with
// probability density. Covering mode lifts a random loopless quotient along Z_m voltages.
Instance generate(uint64_t seed, const GenParams& params);

// Lift of q along voltages in Z_m (one voltage per edge, in q.edges() order); the group is the fibre rotation.
Instance covering_instance(const Digraph& q, int m, const std::vector<int>& voltages, const std::string& name = "");
Instance random_cover(std::mt19937_64& rng, const Digraph& q, int m);

// Induced instance on an invariant vertex set; generators are restricted.
Instance restrict_instance(const Instance& in, const Bits& s);

// All automorphisms of a small digraph by brute force (n ≤ 8).
std::vector<Perm> all_automorphisms(const Digraph& g);

}  // namespace loopsmith

#endif

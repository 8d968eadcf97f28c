#ifndef LOOPSMITH_FINITISE_HPP
#define LOOPSMITH_FINITISE_HPP

#include <string>
#include <vector>

#include "loopsmith/digraph.hpp"
#include "loopsmith/group.hpp"
#include "loopsmith/relation.hpp"

namespace loopsmith {

// The finitising equivalence together with the orbit partition it refines.
struct Alpha {
    int n = 0;
    std::vector<int> class_of;
    std::vector<std::vector<int>> classes;  // ordered by least element
    std::vector<int> orbit_of;
    std::vector<int> class_orbit;           // orbit id of each class
    int num_orbits = 0;

    int num_classes() const { return int(classes.size()); }
    BinRel relation() const;
    Bits class_set(int c) const;
    Bits blow_up(const Bits& class_set) const;
    Bits classes_meeting(const Bits& vertices) const;
    Bits orbit_set(int o) const;
    Bits classes_in_orbit(int o) const;

    static Alpha from_partition(const std::vector<int>& class_of, const std::vector<int>& orbit_of);
};

Alpha compute_alpha(const Digraph& g, const PermGroup& gp);

struct FinitiseReport {
    bool a1 = true, a2 = true, a3 = true;
    std::vector<std::string> violations;
    bool ok() const { return a1 && a2 && a3; }
};

FinitiseReport check_finitises(const Alpha& alpha, const Digraph& g, const PermGroup& gp);

Digraph quotient(const Digraph& g, const Alpha& alpha);
BinRel blow_up(const BinRel& r, const Alpha& alpha);
KaryRel blow_up(const KaryRel& r, const Alpha& alpha);
Bits blow_up(const Bits& s, const Alpha& alpha);
KaryRel project_quotient(const KaryRel& r, const Alpha& alpha);
BinRel project_quotient(const BinRel& r, const Alpha& alpha);

bool is_alpha_stable(const KaryRel& r, const Alpha& alpha);
bool is_alpha_stable(const BinRel& r, const Alpha& alpha);
bool is_alpha_stable(const Bits& s, const Alpha& alpha);
bool is_omega_stable(const Bits& s, const Alpha& alpha);

}  // namespace loopsmith

#endif

#ifndef LOOPSMITH_PATHS_HPP
#define LOOPSMITH_PATHS_HPP

#include <string>
#include <utility>
#include <vector>

#include "loopsmith/digraph.hpp"
#include "loopsmith/group.hpp"
#include "loopsmith/relation.hpp"

namespace loopsmith {

// Abstract path whose positions carry orbit ids.
struct LabelledPath {
    AbstractPath path;
    std::vector<int> labels;

    static LabelledPath at(int orbit) { return {{}, {orbit}}; }
    int length() const { return path.length(); }
    int first() const { return labels.front(); }
    int last() const { return labels.back(); }
    void push(Dir d, int label);
    LabelledPath reversed() const;
    // Concatenation; the last label of *this must equal the first label of o.
    LabelledPath operator+(const LabelledPath& o) const;
    LabelledPath repeat(int times) const;
    bool operator==(const LabelledPath& o) const { return path == o.path && labels == o.labels; }
    std::string str() const;
};

struct MergedPath {
    AbstractPath path;
    std::vector<std::pair<int, int>> labels;  // (top, bottom)
    static MergedPath merge(const LabelledPath& top, const LabelledPath& bottom);
};

// Instance data shared by the path routines: the digraph, its orbits and the orbit quotient.
class OrbitView {
public:
    OrbitView(const Digraph& g, const PermGroup& gp);
    OrbitView(const Digraph& g, const std::vector<int>& orbit_of);

    const Digraph& graph() const { return *g_; }
    const Digraph& quotient() const { return q_; }
    int num_orbits() const { return q_.size(); }
    int orbit_of(int v) const { return orbit_of_[v]; }
    const Bits& orbit_set(int o) const { return sets_[o]; }
    bool adjacent(int a, Dir d, int b) const { return d == Dir::Fwd ? q_.has_edge(a, b) : q_.has_edge(b, a); }

private:
    const Digraph* g_;
    std::vector<int> orbit_of_;
    std::vector<Bits> sets_;
    Digraph q_;
};

BinRel gamma(const OrbitView& v, const LabelledPath& p);
BinRel gamma(const OrbitView& v, const MergedPath& p);
BinRel gamma(const Digraph& g, const PermGroup& gp, const LabelledPath& p);
BinRel gamma(const Digraph& g, const PermGroup& gp, const MergedPath& p);

bool realisable(const OrbitView& v, const LabelledPath& p);
bool is_properly_separated(const OrbitView& v, const LabelledPath& top, const LabelledPath& bottom);
bool is_properly_separated(const Digraph& g, const PermGroup& gp, const LabelledPath& top,
                           const LabelledPath& bottom);

// ext arises from base by inserting back-and-forth excursions (X d Y d⁻¹ X).
bool is_extension(const LabelledPath& ext, const LabelledPath& base);

// s,t > 0 with s·k + t·l = n, smallest t.
std::pair<int, int> euclid_hammer(int k, int l, int n);

struct SeparatedPair {
    LabelledPath ext;
    LabelledPath rho;
    std::vector<std::string> steps;  // construction used per step of pi
};

SeparatedPair build_separated_pair(const OrbitView& v, const LabelledPath& pi, int P);
SeparatedPair build_separated_pair(const Digraph& g, const PermGroup& gp, const LabelledPath& pi, int P);

// One step of the induction: top extends (U d V), bottom runs from U2 to V2.
// Requires U→U2 and V→V2 in the quotient.
std::pair<LabelledPath, LabelledPath> separated_step(const Digraph& q, int U, Dir d, int V, int U2, int V2,
                                                     std::string* method = nullptr);

struct CentralEscape {
    LabelledPath pi;        // from O_in to O_out'
    LabelledPath pi_prime;  // from O_out to O_in'
    int o_in2 = -1;
    int o_out2 = -1;
    std::string method;
};

// C is a union of orbits given as a vertex set.
CentralEscape build_central_escape(const OrbitView& v, const Bits& C, int O_in, int O_out);
CentralEscape build_central_escape(const Digraph& g, const PermGroup& gp, const Bits& C, int O_in, int O_out);

}  // namespace loopsmith

#endif

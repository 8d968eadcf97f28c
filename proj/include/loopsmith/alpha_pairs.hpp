#ifndef LOOPSMITH_ALPHA_PAIRS_HPP
#define LOOPSMITH_ALPHA_PAIRS_HPP

#include <string>

#include "loopsmith/finitise.hpp"
#include "loopsmith/paths.hpp"
#include "loopsmith/script.hpp"

namespace loopsmith {

// Symmetric labelled path from O to O whose induced relation is α restricted to O.
LabelledPath alpha_defining_path(const Digraph& g, const Alpha& alpha, int O);

struct AlphaPairDef {
    PPScript script;  // primitives: edge and orbit unions only
    LabelledPath kappa, lambda;  // R = γ of kappa^k_r ∨ lambda^k_r
    LabelledPath kappa2, lambda2;  // S, roles of O and P swapped
    int k_r = 1, k_s = 1;
};

// Definition of α on O ∪ P from the edge relation and unions of two orbits.
// Requires a smooth digraph, loopless orbit quotient, and O, P adjacent.
// The result is checked by evaluation; a mismatch throws std::logic_error.
AlphaPairDef alpha_on_pairs_ppdef(const Digraph& g, const PermGroup& gp, const Alpha& alpha, int O, int P);

// Chain formula for γ of a merged path; free variables are the two ends.
// union_name(top, bottom) must name a unary relation for the orbit union.
PPFormula merged_path_formula(const MergedPath& m, const std::string& edge,
                              const std::function<std::string(int, int)>& union_name);

}  // namespace loopsmith

#endif
